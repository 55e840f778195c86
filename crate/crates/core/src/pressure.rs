//! Weighted topological pressure.
//!
//! For depth-1 potentials the pressure has a closed form obtained by pushing
//! per-symbol weights up the chain. Otherwise `s_n = log c_n`, the fully
//! pushed and summed weight at word length `n`, is computed for increasing
//! `n`. The sequence is subadditive and superadditive up to the propagated
//! distortion constant `C`, which gives the enclosure
//! `max_n (s_n - C)/n <= P <= min_n (s_n + C)/n`. The bounds are certified
//! modulo floating-point rounding, which is covered by an explicit slack.
//! The distortion constants are this crate's own construction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{map_range, Workers};
use crate::logspace::{log_sum_exp, LogSumAcc};
use crate::potential::{
    decode, finite_depth_fiber_sum, linear_combination, push_chain, FiniteDepth, Potential, PushMode,
};
use crate::shift_space::{FactorChain, Symbol, WeightVector};

/// Smallest number of top-level prefixes the enumeration is split into.
const MIN_CHUNKS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Enclosure,
}

/// Point estimate and bounds for the weighted pressure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PressureEnclosure {
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
    pub n_used: usize,
    pub method: Method,
}

impl PressureEnclosure {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    fn exact(value: f64) -> Self {
        Self {
            estimate: value,
            lo: value,
            hi: value,
            n_used: 0,
            method: Method::ClosedForm,
        }
    }
}

/// How the limit is extrapolated from `s_1, ..., s_N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Estimator {
    /// Aitken's delta-squared on the increments `s_n - s_{n-1}`.
    #[default]
    Aitken,
    /// The last increment `s_N - s_{N-1}`, a smooth function of the potential.
    LastIncrement,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureOptions {
    pub n_max: usize,
    /// Cap on the number of words evaluated individually at the deepest `n`.
    pub max_words: u64,
    pub workers: Workers,
    pub push_mode: PushMode,
    pub estimator: Estimator,
}

impl Default for PressureOptions {
    fn default() -> Self {
        Self {
            n_max: 12,
            max_words: 10_000_000,
            workers: Workers::default(),
            push_mode: PushMode::Fast,
            estimator: Estimator::Aitken,
        }
    }
}

/// Per-level depth-1 weights `log W^(i)` obtained by pushing `phi`, plus the
/// closed-form pressure.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthOneCascade {
    pub tables: Vec<Vec<f64>>,
    pub pressure: f64,
}

impl DepthOneCascade {
    pub fn new(phi: &FiniteDepth, chain: &FactorChain, a: &WeightVector) -> Result<Self> {
        check_base(phi, chain, a)?;
        if phi.depth() != 1 {
            return Err(Error::InvalidPotential(format!(
                "closed form needs a depth-1 potential, got depth {}",
                phi.depth()
            )));
        }
        let pushed = push_chain(&phi.clone().into(), chain, a, PushMode::Fast)?;
        let tables: Vec<Vec<f64>> = pushed
            .iter()
            .map(|p| p.as_finite_depth().expect("depth-1 push").log_table().to_vec())
            .collect();
        let cap = a.total();
        let top: Vec<f64> = tables.last().expect("k >= 1").iter().map(|w| w / cap).collect();
        let pressure = cap * log_sum_exp(&top);
        Ok(Self { tables, pressure })
    }

    /// Log masses of single symbols under the equilibrium product measure.
    pub fn log_masses(&self, chain: &FactorChain, a: &WeightVector) -> Vec<f64> {
        let k = chain.levels();
        (0..chain.alphabet_size(0) as Symbol)
            .map(|s| {
                let mut v = -self.pressure / a.total() + self.tables[0][s as usize] / a.cumulative(1);
                for i in 1..k {
                    let coef = 1.0 / a.cumulative(i + 1) - 1.0 / a.cumulative(i);
                    v += coef * self.tables[i][chain.tau_symbol(i, s) as usize];
                }
                v
            })
            .collect()
    }
}

fn check_base(phi: &FiniteDepth, chain: &FactorChain, a: &WeightVector) -> Result<()> {
    a.check_against(chain)?;
    if phi.level() != 0 {
        return Err(Error::LevelMismatch {
            expected: 0,
            found: phi.level(),
        });
    }
    if phi.alphabet() != chain.alphabet_size(0) {
        return Err(Error::InvalidPotential(format!(
            "potential has {} symbols, base alphabet has {}",
            phi.alphabet(),
            chain.alphabet_size(0)
        )));
    }
    Ok(())
}

pub fn pressure_closed_form_depth1(
    phi: &FiniteDepth,
    chain: &FactorChain,
    a: &WeightVector,
) -> Result<PressureEnclosure> {
    DepthOneCascade::new(phi, chain, a).map(|c| PressureEnclosure::exact(c.pressure))
}

/// Level whose words are evaluated one by one when summing `top`.
fn enumeration_level(top: &Potential) -> usize {
    match top {
        Potential::Pushed(p) => match p.inner() {
            Potential::Pushed(_) => enumeration_level(p.inner()),
            inner => inner.level(),
        },
        other => other.level(),
    }
}

/// `s_n = log c_n` for the fully pushed chain of `phi`.
pub fn cascaded_log_sum(
    phi: &Potential,
    chain: &FactorChain,
    a: &WeightVector,
    n: usize,
    opts: &PressureOptions,
) -> Result<f64> {
    let pushed = push_chain(phi, chain, a, opts.push_mode)?;
    let top = pushed.last().expect("k >= 1");
    cascaded_from_top(top, chain, a, n, opts).map(|(s, _)| s)
}

/// Returns `s_n` and the number of words evaluated individually.
fn cascaded_from_top(
    top: &Potential,
    chain: &FactorChain,
    a: &WeightVector,
    n: usize,
    opts: &PressureOptions,
) -> Result<(f64, f64)> {
    let cap = a.total();
    let na = top.alphabet();
    if let (Potential::FiniteDepth(fd), PushMode::Fast) = (top, opts.push_mode) {
        let all: Vec<Symbol> = (0..na as Symbol).collect();
        let s = finite_depth_fiber_sum(fd, n, cap, |_| &all);
        return Ok((s, 1.0));
    }
    let words = (chain.alphabet_size(enumeration_level(top)) as f64).powi(n as i32);
    if words > opts.max_words as f64 {
        return Err(Error::Budget {
            n,
            words,
            budget: opts.max_words,
        });
    }
    let mut prefix_len = 0;
    while prefix_len < n && na.pow(prefix_len as u32) < MIN_CHUNKS {
        prefix_len += 1;
    }
    let chunks = na.pow(prefix_len as u32);
    let suffix_count = na.pow((n - prefix_len) as u32);
    let partial = map_range(opts.workers, chunks, |c| {
        let mut w = vec![0 as Symbol; n];
        decode(c, na, &mut w[..prefix_len]);
        let mut acc = LogSumAcc::new();
        for s in 0..suffix_count {
            decode(s, na, &mut w[prefix_len..]);
            acc.push(top.log_phi_direct(&w) / cap);
        }
        acc.value()
    });
    Ok((cap * log_sum_exp(&partial), words))
}

/// Rounding allowance for `s_n / n`.
fn rounding_slack(s: f64, n: usize, words: f64, scale: f64) -> f64 {
    16.0 * f64::EPSILON * (words + n as f64 + 8.0) * (1.0 + s.abs() + n as f64 * scale) / n as f64
}

/// Pressure of a base-level potential: closed form for depth 1, enclosure
/// otherwise.
pub fn pressure(
    phi: &FiniteDepth,
    chain: &FactorChain,
    a: &WeightVector,
    opts: &PressureOptions,
) -> Result<PressureEnclosure> {
    check_base(phi, chain, a)?;
    if phi.depth() == 1 && opts.push_mode == PushMode::Fast {
        return pressure_closed_form_depth1(phi, chain, a);
    }
    pressure_enclosure(&phi.clone().into(), chain, a, opts)
}

/// Enclosure from the cascaded sums, regardless of depth.
pub fn pressure_enclosure(
    phi: &Potential,
    chain: &FactorChain,
    a: &WeightVector,
    opts: &PressureOptions,
) -> Result<PressureEnclosure> {
    let sums = cascaded_sums(phi, chain, a, opts)?;
    let pushed_c = sums.constant;
    let scale = phi
        .as_finite_depth()
        .map_or(1.0, |p| p.log_table().iter().fold(0.0f64, |m, v| m.max(v.abs())) / a.weight(1));
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (i, (&s, &words)) in sums.s.iter().zip(&sums.words).enumerate() {
        let n = i + 1;
        let slack = rounding_slack(s, n, words, scale);
        hi = hi.min((s + pushed_c) / n as f64 + slack);
        lo = lo.max((s - pushed_c) / n as f64 - slack);
    }
    let n_used = sums.s.len();
    let d: Vec<f64> = (0..n_used)
        .map(|i| if i == 0 { sums.s[0] } else { sums.s[i] - sums.s[i - 1] })
        .collect();
    let last = d[n_used - 1];
    let estimate = match opts.estimator {
        Estimator::LastIncrement => last,
        Estimator::Aitken => aitken(&d).unwrap_or(last),
    };
    Ok(PressureEnclosure {
        estimate: estimate.clamp(lo, hi),
        lo,
        hi,
        n_used,
        method: Method::Enclosure,
    })
}

/// Aitken extrapolation of the last three terms, `None` when unstable.
fn aitken(x: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 3 {
        return None;
    }
    let (x0, x1, x2) = (x[n - 3], x[n - 2], x[n - 1]);
    let denom = x2 - 2.0 * x1 + x0;
    if !(denom.abs() >= 1e-12) {
        return None;
    }
    let v = x2 - (x2 - x1).powi(2) / denom;
    v.is_finite().then_some(v)
}

/// `s_1, ..., s_N` with `N` limited by `n_max` and the word budget.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadedSums {
    pub s: Vec<f64>,
    pub words: Vec<f64>,
    /// Distortion constant of the summed sequence.
    pub constant: f64,
}

pub fn cascaded_sums(
    phi: &Potential,
    chain: &FactorChain,
    a: &WeightVector,
    opts: &PressureOptions,
) -> Result<CascadedSums> {
    if opts.n_max < 2 {
        return Err(Error::NMaxTooSmall(opts.n_max));
    }
    let pushed = push_chain(phi, chain, a, opts.push_mode)?;
    let top = pushed.last().expect("k >= 1");
    let mut s = Vec::new();
    let mut words = Vec::new();
    for n in 1..=opts.n_max {
        match cascaded_from_top(top, chain, a, n, opts) {
            Ok((v, w)) => {
                if !v.is_finite() {
                    return Err(Error::NonFinite(n));
                }
                s.push(v);
                words.push(w);
            }
            Err(e @ Error::Budget { .. }) if n <= 2 => return Err(e),
            Err(Error::Budget { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(CascadedSums {
        s,
        words,
        constant: top.qm_log_constant(),
    })
}

/// Options for gradients of the multi-parameter pressure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientOptions {
    /// Central-difference step.
    pub h: f64,
    /// Largest enclosure width accepted, as a multiple of `h`.
    pub width_ratio: f64,
}

impl Default for GradientOptions {
    fn default() -> Self {
        Self {
            h: 1e-4,
            width_ratio: 1e4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMethod {
    AnalyticDepth1,
    FiniteDifference,
}

/// `Q(q)` and its gradient.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PressureFunctionSample {
    pub q: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub gradient_method: GradientMethod,
    pub enclosure: PressureEnclosure,
}

/// `Q(q) = P^a(sum_i q_i Phi_i)`.
pub fn pressure_value(
    phis: &[FiniteDepth],
    chain: &FactorChain,
    a: &WeightVector,
    q: &[f64],
    opts: &PressureOptions,
) -> Result<PressureEnclosure> {
    let combined = linear_combination(phis, q)?;
    pressure(&combined, chain, a, opts)
}

pub fn pressure_function(
    phis: &[FiniteDepth],
    chain: &FactorChain,
    a: &WeightVector,
    q: &[f64],
    opts: &PressureOptions,
    grad: &GradientOptions,
) -> Result<PressureFunctionSample> {
    if q.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidPotential("q must be finite".into()));
    }
    let combined = linear_combination(phis, q)?;
    let depth_one = phis.iter().all(|p| p.depth() == 1) && opts.push_mode == PushMode::Fast;
    if depth_one {
        let cascade = DepthOneCascade::new(&combined, chain, a)?;
        let masses: Vec<f64> = cascade.log_masses(chain, a).iter().map(|v| v.exp()).collect();
        let gradient = phis
            .iter()
            .map(|p| masses.iter().zip(p.log_table()).map(|(m, g)| m * g).sum())
            .collect();
        return Ok(PressureFunctionSample {
            q: q.to_vec(),
            value: cascade.pressure,
            gradient,
            gradient_method: GradientMethod::AnalyticDepth1,
            enclosure: PressureEnclosure::exact(cascade.pressure),
        });
    }
    let centre = pressure(&combined, chain, a, opts)?;
    let h = grad.h;
    let eval = |q: &[f64]| -> Result<f64> {
        let e = pressure_value(phis, chain, a, q, opts)?;
        if e.width() > grad.width_ratio * h {
            return Err(Error::EnclosureTooWide {
                width: e.width(),
                step: h,
            });
        }
        Ok(e.estimate)
    };
    if centre.width() > grad.width_ratio * h {
        return Err(Error::EnclosureTooWide {
            width: centre.width(),
            step: h,
        });
    }
    let mut gradient = Vec::with_capacity(q.len());
    let mut qp = q.to_vec();
    for i in 0..q.len() {
        let mut diff = |step: f64| -> Result<f64> {
            qp[i] = q[i] + step;
            let up = eval(&qp)?;
            qp[i] = q[i] - step;
            let down = eval(&qp)?;
            qp[i] = q[i];
            Ok((up - down) / (2.0 * step))
        };
        let coarse = diff(h)?;
        let fine = diff(h / 2.0)?;
        gradient.push((4.0 * fine - coarse) / 3.0);
    }
    Ok(PressureFunctionSample {
        q: q.to_vec(),
        value: centre.estimate,
        gradient,
        gradient_method: GradientMethod::FiniteDifference,
        enclosure: centre,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convexity {
    StrictlyConvex,
    AffineWithinTol,
}

/// Outcome of sampling `Q` along a line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub verdict: Convexity,
    /// Largest gap between the chord and `Q` on the sampled points.
    pub max_deviation: f64,
    pub tol: f64,
}

/// Samples `Q(q0 + t v)` for `t` in `[-span, span]` and compares it with the
/// chord through the end points. A numerical diagnostic, not a proof.
#[allow(clippy::too_many_arguments)]
pub fn convexity_probe(
    phis: &[FiniteDepth],
    chain: &FactorChain,
    a: &WeightVector,
    direction: &[f64],
    q0: &[f64],
    span: f64,
    samples: usize,
    opts: &PressureOptions,
) -> Result<ConvexityReport> {
    if direction.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidPotential("direction must be non-zero".into()));
    }
    if direction.len() != q0.len() {
        return Err(Error::LengthMismatch(direction.len(), q0.len()));
    }
    let samples = samples.max(3);
    let ts: Vec<f64> = (0..samples)
        .map(|j| -span + 2.0 * span * j as f64 / (samples - 1) as f64)
        .collect();
    let values = ts
        .iter()
        .map(|&t| {
            let q: Vec<f64> = q0.iter().zip(direction).map(|(q, v)| q + t * v).collect();
            pressure_value(phis, chain, a, &q, opts)
        })
        .collect::<Result<Vec<_>>>()?;
    let first = values[0].estimate;
    let last = values[samples - 1].estimate;
    let mut max_dev = 0.0f64;
    let mut max_width = 0.0f64;
    let mut scale = 1.0f64;
    for (j, v) in values.iter().enumerate() {
        let lambda = j as f64 / (samples - 1) as f64;
        let chord = first + lambda * (last - first);
        max_dev = max_dev.max(chord - v.estimate);
        max_width = max_width.max(v.width());
        scale = scale.max(v.estimate.abs());
    }
    let tol = 2.0 * max_width + 1e-9 * scale;
    let verdict = if max_dev <= tol {
        Convexity::AffineWithinTol
    } else {
        Convexity::StrictlyConvex
    };
    Ok(ConvexityReport {
        verdict,
        max_deviation: max_dev,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn carpet() -> (FactorChain, WeightVector) {
        (
            FactorChain::new(vec![3, 2], vec![vec![0, 0, 1]]).unwrap(),
            WeightVector::from_log_scales(&[3.0, 2.0]).unwrap(),
        )
    }

    fn mcmullen() -> f64 {
        (2f64.powf(2f64.ln() / 3f64.ln()) + 1.0).log2()
    }

    #[test]
    fn carpet_closed_form() {
        let (chain, a) = carpet();
        let p = pressure_closed_form_depth1(&FiniteDepth::zero(0, 3), &chain, &a).unwrap();
        assert!((p.estimate - mcmullen()).abs() < 1e-12);
        assert!((p.estimate - 1.349_68).abs() < 1e-5);
        assert_eq!(p.width(), 0.0);
    }

    #[test]
    fn closed_form_examples() {
        let chain = FactorChain::full_shift(5).unwrap();
        let a = WeightVector::new(vec![1.0]).unwrap();
        let p = pressure_closed_form_depth1(&FiniteDepth::zero(0, 5), &chain, &a).unwrap();
        assert!((p.estimate - 5f64.ln()).abs() < 1e-14);

        let chain = FactorChain::new(vec![3, 3], vec![vec![0, 1, 2]]).unwrap();
        let a = WeightVector::new(vec![1.0, 1.0]).unwrap();
        let g = FiniteDepth::depth_one(0, vec![1.0; 3]).unwrap();
        let p = pressure_closed_form_depth1(&g, &chain, &a).unwrap();
        assert!((p.estimate - (2.0 * 3f64.ln() + 1.0)).abs() < 1e-13);
    }

    #[test]
    fn cascade_zero_potential_limits() {
        let opts = PressureOptions::default();
        let a = WeightVector::new(vec![0.6, 0.3]).unwrap();
        let collapse = FactorChain::new(vec![3, 1], vec![vec![0, 0, 0]]).unwrap();
        let zero: Potential = FiniteDepth::zero(0, 3).into();
        let s = cascaded_log_sum(&zero, &collapse, &a, 7, &opts).unwrap();
        assert!((s / 7.0 - 0.6 * 3f64.ln()).abs() < 1e-13);
        let ident = FactorChain::new(vec![3, 3], vec![vec![0, 1, 2]]).unwrap();
        let s = cascaded_log_sum(&zero, &ident, &a, 7, &opts).unwrap();
        assert!((s / 7.0 - 0.9 * 3f64.ln()).abs() < 1e-13);
        let (chain, a) = carpet();
        let enumerate = PressureOptions {
            push_mode: PushMode::Enumerate,
            ..opts
        };
        let s = cascaded_log_sum(&zero, &chain, &a, 9, &enumerate).unwrap();
        assert!((s / 9.0 - mcmullen()).abs() < 1e-12);
    }

    #[test]
    fn disguised_depth_two() {
        let chain = FactorChain::new(vec![3, 2], vec![vec![0, 1, 1]]).unwrap();
        let a = WeightVector::new(vec![0.8, 0.5]).unwrap();
        let g = vec![0.2, -0.4, 0.9];
        let d1 = FiniteDepth::depth_one(0, g).unwrap();
        let d2 = d1.broadcast(2).unwrap();
        let exact = pressure(&d1, &chain, &a, &PressureOptions::default()).unwrap();
        let enc = pressure(&d2, &chain, &a, &PressureOptions::default()).unwrap();
        assert_eq!(enc.method, Method::Enclosure);
        assert!(enc.contains(exact.estimate));
        assert!((enc.estimate - exact.estimate).abs() < 1e-10);
    }

    #[test]
    fn genuine_depth_two_encloses_brute_force() {
        let chain = FactorChain::new(vec![2, 2], vec![vec![0, 1]]).unwrap();
        let a = WeightVector::new(vec![1.0, 0.0]).unwrap();
        // a_2 = 0 and identity map: classical pressure of a Markov-type potential.
        let table = vec![0.3, -0.2, 0.5, 0.1];
        let p = FiniteDepth::new(0, 2, 2, table.clone()).unwrap();
        let enc = pressure(&p, &chain, &a, &PressureOptions::default()).unwrap();
        // Spectral radius of the 2x2 transfer matrix exp(g).
        let m: Vec<f64> = table.iter().map(|v| v.exp()).collect();
        let tr = m[0] + m[3];
        let det = m[0] * m[3] - m[1] * m[2];
        let rho = (tr + (tr * tr - 4.0 * det).sqrt()) / 2.0;
        assert!(enc.contains(rho.ln()), "{enc:?} vs {}", rho.ln());
        assert!((enc.estimate - rho.ln()).abs() < 1e-9);
    }

    #[test]
    fn short_budget_is_error() {
        let (chain, a) = carpet();
        let p = FiniteDepth::new(0, 3, 2, vec![0.1; 9]).unwrap();
        let opts = PressureOptions {
            n_max: 1,
            ..Default::default()
        };
        assert!(matches!(pressure(&p, &chain, &a, &opts), Err(Error::NMaxTooSmall(1))));
        let opts = PressureOptions {
            max_words: 3,
            ..Default::default()
        };
        assert!(matches!(pressure(&p, &chain, &a, &opts), Err(Error::Budget { .. })));
    }

    #[test]
    fn analytic_gradient_classical() {
        let chain = FactorChain::full_shift(3).unwrap();
        let a = WeightVector::new(vec![1.0]).unwrap();
        let g = FiniteDepth::depth_one(0, vec![0.5, -0.3, 1.2]).unwrap();
        let q = 0.7;
        let s = pressure_function(
            std::slice::from_ref(&g),
            &chain,
            &a,
            &[q],
            &PressureOptions::default(),
            &GradientOptions::default(),
        )
        .unwrap();
        let w: Vec<f64> = g.log_table().iter().map(|v| (q * v).exp()).collect();
        let z: f64 = w.iter().sum();
        let mean: f64 = w.iter().zip(g.log_table()).map(|(w, v)| w * v).sum::<f64>() / z;
        assert!((s.value - z.ln()).abs() < 1e-13);
        assert!((s.gradient[0] - mean).abs() < 1e-13);
    }

    #[test]
    fn convexity_verdicts() {
        let (chain, a) = carpet();
        let g = FiniteDepth::depth_one(0, vec![0.5, -0.3, 1.2]).unwrap();
        let opts = PressureOptions::default();
        let r = convexity_probe(
            &[g.clone(), g.clone()],
            &chain,
            &a,
            &[1.0, -1.0],
            &[0.3, 0.2],
            1.0,
            9,
            &opts,
        )
        .unwrap();
        assert_eq!(r.verdict, Convexity::AffineWithinTol);
        let c = FiniteDepth::depth_one(0, vec![0.4; 3]).unwrap();
        let r = convexity_probe(&[c], &chain, &a, &[1.0], &[0.0], 2.0, 9, &opts).unwrap();
        assert_eq!(r.verdict, Convexity::AffineWithinTol);
        let r = convexity_probe(&[g], &chain, &a, &[1.0], &[0.0], 1.0, 9, &opts).unwrap();
        assert_eq!(r.verdict, Convexity::StrictlyConvex);
    }
}
