//! Weighted equilibrium measures and invariant comparison measures.
//!
//! For depth-1 potentials the weighted equilibrium state is the Bernoulli
//! measure with single-symbol masses
//! `p_s = exp(-P/A_k) w_s^{1/A_1} prod_{i<k} W^(i)_{tau_i s}^{1/A_{i+1} - 1/A_i}`,
//! so every mass below is exact. Otherwise masses follow the Gibbs formula
//! `log mu(I) = -nP/A_k + log phi^a(I)` and carry a conservative log-ratio
//! bound assembled from the propagated distortion constants and the pressure
//! enclosure width.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logspace::{log_sum_exp, LogSumAcc};
use crate::potential::{decode, push_chain, FiniteDepth, PushMode, WeightedPotential};
use crate::pressure::{pressure, DepthOneCascade, PressureEnclosure, PressureOptions};
use crate::shift_space::{ball_shape, ell, FactorChain, Symbol, WeightVector, Word};

/// Tolerance for probability vectors summing to one and for stationarity.
const PROB_TOL: f64 = 1e-9;

/// Longest block used for hidden-Markov entropy bounds.
const HMM_MAX_BLOCK: usize = 14;
/// Largest number of observation words at the deepest block length.
const HMM_MAX_WORDS: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    ExactDepth1,
    GibbsRatio,
}

/// A log mass with a bound on `|log true mass - value|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogMass {
    pub value: f64,
    pub log_ratio_bound: f64,
}

impl LogMass {
    fn exact(value: f64) -> Self {
        Self {
            value,
            log_ratio_bound: 0.0,
        }
    }
}

/// A weighted equilibrium (Gibbs) measure of a base-level potential.
#[derive(Debug, Clone)]
pub struct WeightedGibbsMeasure {
    chain: FactorChain,
    a: WeightVector,
    potential: FiniteDepth,
    weighted: WeightedPotential,
    pressure: PressureEnclosure,
    mode: Mode,
    /// Exact mode: `level_masses[i][j]` is the log mass of symbol `j` under
    /// the level-`i` marginal.
    level_masses: Vec<Vec<f64>>,
    constant: f64,
}

impl WeightedGibbsMeasure {
    pub fn new(
        phi: &FiniteDepth,
        chain: &FactorChain,
        a: &WeightVector,
        opts: &PressureOptions,
    ) -> Result<Self> {
        let pressure = pressure(phi, chain, a, opts)?;
        let pushed = push_chain(&phi.clone().into(), chain, a, PushMode::Fast)?;
        let weighted = WeightedPotential::new(chain, a, pushed)?;
        let (mode, level_masses) = if phi.depth() == 1 {
            let cascade = DepthOneCascade::new(phi, chain, a)?;
            let base = cascade.log_masses(chain, a);
            let mut levels = vec![base.clone()];
            for i in 1..chain.levels() {
                let mut acc = vec![LogSumAcc::new(); chain.alphabet_size(i)];
                for (s, &m) in base.iter().enumerate() {
                    acc[chain.tau_symbol(i, s as Symbol) as usize].push(m);
                }
                levels.push(acc.iter().map(LogSumAcc::value).collect());
            }
            (Mode::ExactDepth1, levels)
        } else {
            (Mode::GibbsRatio, Vec::new())
        };
        Ok(Self {
            chain: chain.clone(),
            a: a.clone(),
            potential: phi.clone(),
            constant: phi.qm_log_constant(),
            weighted,
            pressure,
            mode,
            level_masses,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn pressure(&self) -> &PressureEnclosure {
        &self.pressure
    }

    pub fn chain(&self) -> &FactorChain {
        &self.chain
    }

    pub fn weights(&self) -> &WeightVector {
        &self.a
    }

    pub fn potential(&self) -> &FiniteDepth {
        &self.potential
    }

    pub fn weighted_potential(&self) -> &WeightedPotential {
        &self.weighted
    }

    /// Exact mode only: log masses of single symbols at each level.
    pub fn level_masses(&self) -> Result<&[Vec<f64>]> {
        match self.mode {
            Mode::ExactDepth1 => Ok(&self.level_masses),
            Mode::GibbsRatio => Err(Error::NotExact),
        }
    }

    /// The equilibrium state as a Bernoulli measure (exact mode only).
    pub fn as_bernoulli(&self) -> Result<InvariantMeasure> {
        let p = self.level_masses()?[0].iter().map(|v| v.exp()).collect();
        InvariantMeasure::bernoulli(p)
    }

    /// Conservative `|log mu(I) - formula|` for a word of length `n`.
    fn gibbs_ratio(&self, n: usize) -> f64 {
        if self.mode == Mode::ExactDepth1 {
            return 0.0;
        }
        let a1 = self.a.cumulative(1);
        let ak = self.a.total();
        3.0 * self.constant * (2.0 / a1 - 1.0 / ak) + n as f64 * self.pressure.width() / ak
    }

    fn check_base_word(&self, word: &Word) -> Result<()> {
        if word.level() != 0 {
            return Err(Error::LevelMismatch {
                expected: 0,
                found: word.level(),
            });
        }
        self.chain.check_symbols(0, word.symbols())
    }

    /// `log mu(I)` for a raw base-level word.
    pub fn log_cylinder(&self, word: &[Symbol]) -> f64 {
        match self.mode {
            Mode::ExactDepth1 => word.iter().map(|&s| self.level_masses[0][s as usize]).sum(),
            Mode::GibbsRatio => self.gibbs_formula(word),
        }
    }

    /// `-nP/A_k + log phi^a(I)`.
    pub fn gibbs_formula(&self, word: &[Symbol]) -> f64 {
        -(word.len() as f64) * self.pressure.estimate / self.a.total() + self.weighted.log_phi_a(word)
    }

    pub fn cylinder_mass(&self, word: &Word) -> Result<LogMass> {
        self.check_base_word(word)?;
        Ok(LogMass {
            value: self.log_cylinder(word.symbols()),
            log_ratio_bound: self.gibbs_ratio(word.len()),
        })
    }

    /// Marginal Gibbs formula for a level-`i` word (`i >= 1`):
    /// `-nP/A_k + (1/A_{i+1}) log phi^(i)(J)
    ///   + sum_{j>i} (1/A_{j+1} - 1/A_j) log phi^(j)(J projected to level j)`.
    pub fn marginal_formula(&self, level: usize, word: &[Symbol]) -> f64 {
        let a = &self.a;
        let pushed = self.weighted.pushed();
        let mut v = -(word.len() as f64) * self.pressure.estimate / a.total()
            + pushed[level].log_phi(word) / a.cumulative(level + 1);
        for j in level + 1..self.chain.levels() {
            let coef = 1.0 / a.cumulative(j + 1) - 1.0 / a.cumulative(j);
            if coef != 0.0 {
                let image = self.chain.project_symbols(level, j, word);
                v += coef * pushed[j].log_phi(&image);
            }
        }
        v
    }

    /// Mass of a level-`i` cylinder under the pushed-forward measure.
    pub fn marginal_mass(&self, word: &Word) -> Result<LogMass> {
        let level = word.level();
        self.chain.check_symbols(level, word.symbols())?;
        if level == 0 {
            return self.cylinder_mass(word);
        }
        Ok(match self.mode {
            Mode::ExactDepth1 => LogMass::exact(
                word.symbols()
                    .iter()
                    .map(|&j| self.level_masses[level][j as usize])
                    .sum(),
            ),
            Mode::GibbsRatio => LogMass {
                value: self.marginal_formula(level, word.symbols()),
                log_ratio_bound: self.gibbs_ratio(word.len()),
            },
        })
    }

    /// Mass of the closed ball `B(x, e^{-n/a_1})`:
    ///
    /// ```text
    /// -l_k(n) P/A_k + (1/a_1) log phi(x|n)
    ///   + sum_{j=1}^{k-1} [(1/A_{j+1}) log phi^(j)(tau_j x|l_{j+1}(n))
    ///                      - (1/A_j) log phi^(j)(tau_j x|l_j(n))]
    /// ```
    pub fn ball_mass(&self, x_prefix: &Word, n: usize) -> Result<LogMass> {
        self.check_base_word(x_prefix)?;
        let shape = ball_shape(&self.chain, &self.a, x_prefix, n)?;
        let a = &self.a;
        let k = self.chain.levels();
        let pushed = self.weighted.pushed();
        let x = x_prefix.symbols();
        let lk = shape.depth();
        let mut v = -(lk as f64) * self.pressure.estimate / a.total()
            + pushed[0].log_phi(&x[..n]) / a.cumulative(1);
        for j in 1..k {
            let long = self.chain.project_symbols(0, j, &x[..ell(n, j + 1, a)]);
            let short = &long[..ell(n, j, a)];
            v += pushed[j].log_phi(&long) / a.cumulative(j + 1)
                - pushed[j].log_phi(short) / a.cumulative(j);
        }
        let bound = if self.mode == Mode::ExactDepth1 {
            0.0
        } else {
            k as f64 * self.gibbs_ratio(lk) + 2.0 * k as f64 * self.constant / a.cumulative(1)
        };
        Ok(LogMass {
            value: v,
            log_ratio_bound: bound,
        })
    }

    /// Ball mass by summing cylinder masses over every word of length
    /// `l_k(n)` that satisfies the ball constraints (exact mode only).
    pub fn ball_mass_by_fiber_sum(&self, x_prefix: &Word, n: usize) -> Result<f64> {
        self.level_masses()?;
        self.check_base_word(x_prefix)?;
        let shape = ball_shape(&self.chain, &self.a, x_prefix, n)?;
        let x = x_prefix.symbols();
        let lk = shape.depth();
        let k = self.chain.levels();
        // Symbols allowed at each free position: the lowest constrained level
        // decides.
        let allowed: Vec<Vec<Symbol>> = (n..lk)
            .map(|t| {
                let level = (0..k)
                    .find(|&j| t < ell(n, j + 1, &self.a))
                    .expect("t < l_k(n)");
                let target = self.chain.tau_symbol(level, x[t]);
                (0..self.chain.alphabet_size(0) as Symbol)
                    .filter(|&s| self.chain.tau_symbol(level, s) == target)
                    .collect()
            })
            .collect();
        let mut y = x[..lk].to_vec();
        let mut pos = vec![0usize; allowed.len()];
        for (t, fib) in allowed.iter().enumerate() {
            y[n + t] = fib[0];
        }
        let mut acc = LogSumAcc::new();
        loop {
            debug_assert!(shape.contains(&self.chain, &y));
            acc.push(self.log_cylinder(&y));
            let mut t = allowed.len();
            loop {
                if t == 0 {
                    return Ok(acc.value());
                }
                t -= 1;
                pos[t] += 1;
                if pos[t] < allowed[t].len() {
                    y[n + t] = allowed[t][pos[t]];
                    break;
                }
                pos[t] = 0;
                y[n + t] = allowed[t][0];
            }
        }
    }

    /// `E_mu[log mu(B(x, e^{-n/a_1}))] = -sum_i (l_i(n) - l_{i-1}(n)) H(mu_i)`
    /// in exact mode, where `H(mu_i)` is the one-symbol entropy at level `i`.
    pub fn expected_log_ball_mass(&self, n: usize) -> Result<f64> {
        let levels = self.level_masses()?;
        Ok(-(0..self.chain.levels())
            .map(|i| {
                let len = (ell(n, i + 1, &self.a) - ell(n, i, &self.a)) as f64;
                len * shannon_log(&levels[i])
            })
            .sum::<f64>())
    }

    /// `h^a` of the equilibrium state (exact mode).
    pub fn weighted_entropy(&self) -> Result<f64> {
        let levels = self.level_masses()?;
        Ok((0..self.chain.levels())
            .map(|i| self.a.weight(i + 1) * shannon_log(&levels[i]))
            .sum())
    }

    /// `Phi_*(mu)` for a finite-depth potential (exact mode).
    pub fn expectation(&self, phi: &FiniteDepth) -> Result<f64> {
        self.as_bernoulli()?.expectation(phi)
    }

    /// `max_{|I| <= n_max} |a_1 log mu(I) + a_2 log nu(pi I) - log phi(I) + nP|`
    /// for two-level chains, `nu` the level-2 marginal.
    pub fn product_relation_check(&self, n_max: usize) -> Result<f64> {
        if self.chain.levels() != 2 {
            return Err(Error::Unsupported(format!(
                "the two-level product relation needs k = 2, got k = {}",
                self.chain.levels()
            )));
        }
        let na = self.chain.alphabet_size(0);
        let (a1, a2) = (self.a.weight(1), self.a.weight(2));
        let p = self.pressure.estimate;
        let mut worst = 0.0f64;
        let mut w = Vec::new();
        for n in 1..=n_max {
            w.resize(n, 0);
            for idx in 0..na.pow(n as u32) {
                decode(idx, na, &mut w);
                let image = self.chain.project_symbols(0, 1, &w);
                let nu = match self.mode {
                    Mode::ExactDepth1 => image
                        .iter()
                        .map(|&j| self.level_masses[1][j as usize])
                        .sum(),
                    Mode::GibbsRatio => self.marginal_formula(1, &image),
                };
                let dev = a1 * self.log_cylinder(&w) + a2 * nu - self.potential.log_phi(&w)
                    + n as f64 * p;
                worst = worst.max(dev.abs());
            }
        }
        Ok(worst)
    }

    /// Rows `(word, log mass)` for every base word of length `1..=depth`.
    pub fn export_masses(&self, depth: usize) -> Vec<(Vec<Symbol>, f64)> {
        let na = self.chain.alphabet_size(0);
        let mut rows = Vec::new();
        for n in 1..=depth {
            let mut w = vec![0; n];
            for idx in 0..na.pow(n as u32) {
                decode(idx, na, &mut w);
                rows.push((w.clone(), self.log_cylinder(&w)));
            }
        }
        rows
    }
}

/// `-sum p log p` for log probabilities.
fn shannon_log(log_p: &[f64]) -> f64 {
    -log_p
        .iter()
        .filter(|v| v.is_finite())
        .map(|&v| v.exp() * v)
        .sum::<f64>()
}

fn shannon(p: &[f64]) -> f64 {
    -p.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum::<f64>()
}

/// JSON form of a comparison measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureSpec {
    Bernoulli(Vec<f64>),
    Markov {
        initial: Vec<f64>,
        transition: Vec<Vec<f64>>,
    },
}

/// A shift-invariant Bernoulli or stationary Markov measure on the base shift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureSpec", into = "MeasureSpec")]
pub struct InvariantMeasure {
    spec: MeasureSpec,
}

impl TryFrom<MeasureSpec> for InvariantMeasure {
    type Error = Error;
    fn try_from(spec: MeasureSpec) -> Result<Self> {
        match spec {
            MeasureSpec::Bernoulli(p) => Self::bernoulli(p),
            MeasureSpec::Markov {
                initial,
                transition,
            } => Self::markov(initial, transition),
        }
    }
}

impl From<InvariantMeasure> for MeasureSpec {
    fn from(m: InvariantMeasure) -> Self {
        m.spec
    }
}

fn check_probability(p: &[f64], what: &str) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidMeasure(format!("{what} is empty")));
    }
    if p.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidMeasure(format!("{what} has a negative or non-finite entry")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidMeasure(format!("{what} sums to {total}, not 1")));
    }
    Ok(())
}

/// Entropy value with a bracket `[lo, hi]`; `lo == hi` when exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Entropy {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Entropy {
    fn exact(v: f64) -> Self {
        Self { value: v, lo: v, hi: v }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl InvariantMeasure {
    pub fn bernoulli(p: Vec<f64>) -> Result<Self> {
        check_probability(&p, "bernoulli vector")?;
        Ok(Self {
            spec: MeasureSpec::Bernoulli(p),
        })
    }

    pub fn markov(initial: Vec<f64>, transition: Vec<Vec<f64>>) -> Result<Self> {
        check_probability(&initial, "initial distribution")?;
        let n = initial.len();
        if transition.len() != n || transition.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMeasure(format!(
                "transition matrix must be {n} x {n}"
            )));
        }
        for (i, row) in transition.iter().enumerate() {
            check_probability(row, &format!("transition row {i}"))?;
        }
        for j in 0..n {
            let flow: f64 = (0..n).map(|i| initial[i] * transition[i][j]).sum();
            if (flow - initial[j]).abs() > PROB_TOL {
                return Err(Error::InvalidMeasure(format!(
                    "initial distribution is not stationary (state {j}: {} vs {flow})",
                    initial[j]
                )));
            }
        }
        Ok(Self {
            spec: MeasureSpec::Markov {
                initial,
                transition,
            },
        })
    }

    pub fn spec(&self) -> &MeasureSpec {
        &self.spec
    }

    pub fn alphabet(&self) -> usize {
        match &self.spec {
            MeasureSpec::Bernoulli(p) => p.len(),
            MeasureSpec::Markov { initial, .. } => initial.len(),
        }
    }

    fn check_chain(&self, chain: &FactorChain) -> Result<()> {
        if self.alphabet() != chain.alphabet_size(0) {
            return Err(Error::InvalidMeasure(format!(
                "measure has {} symbols, base alphabet has {}",
                self.alphabet(),
                chain.alphabet_size(0)
            )));
        }
        Ok(())
    }

    /// `log eta([I])`.
    pub fn log_cylinder(&self, word: &[Symbol]) -> f64 {
        match &self.spec {
            MeasureSpec::Bernoulli(p) => word.iter().map(|&s| p[s as usize].ln()).sum(),
            MeasureSpec::Markov {
                initial,
                transition,
            } => {
                let Some((&first, rest)) = word.split_first() else {
                    return 0.0;
                };
                let mut v = initial[first as usize].ln();
                let mut prev = first;
                for &s in rest {
                    v += transition[prev as usize][s as usize].ln();
                    prev = s;
                }
                v
            }
        }
    }

    /// Masses of all `n`-words in lexicographic order.
    pub fn block_marginals(&self, n: usize) -> Vec<f64> {
        let na = self.alphabet();
        let mut w = vec![0; n];
        (0..na.pow(n as u32))
            .map(|idx| {
                decode(idx, na, &mut w);
                self.log_cylinder(&w).exp()
            })
            .collect()
    }

    /// `Phi_*(eta) = E_eta[g(x_1 ... x_m)]`.
    pub fn expectation(&self, phi: &FiniteDepth) -> Result<f64> {
        if phi.alphabet() != self.alphabet() {
            return Err(Error::InvalidMeasure(format!(
                "measure has {} symbols, potential has {}",
                self.alphabet(),
                phi.alphabet()
            )));
        }
        let masses = self.block_marginals(phi.depth());
        Ok(masses.iter().zip(phi.log_table()).map(|(m, g)| m * g).sum())
    }

    /// Entropy of the base measure.
    pub fn entropy(&self) -> f64 {
        match &self.spec {
            MeasureSpec::Bernoulli(p) => shannon(p),
            MeasureSpec::Markov {
                initial,
                transition,
            } => initial
                .iter()
                .zip(transition)
                .map(|(pi, row)| pi * shannon(row))
                .sum(),
        }
    }

    /// Entropy of the pushforward under `tau_level`. Bernoulli images are
    /// Bernoulli; Markov images are hidden-Markov and get bracketed.
    pub fn level_entropy(&self, chain: &FactorChain, level: usize) -> Result<Entropy> {
        self.check_chain(chain)?;
        if level == 0 {
            return Ok(Entropy::exact(self.entropy()));
        }
        let nb = chain.alphabet_size(level);
        let obs: Vec<Symbol> = (0..self.alphabet() as Symbol)
            .map(|s| chain.tau_symbol(level, s))
            .collect();
        match &self.spec {
            MeasureSpec::Bernoulli(p) => {
                let mut q = vec![0.0; nb];
                for (s, &ps) in p.iter().enumerate() {
                    q[obs[s] as usize] += ps;
                }
                Ok(Entropy::exact(shannon(&q)))
            }
            MeasureSpec::Markov {
                initial,
                transition,
            } => {
                let mut injective = vec![false; nb];
                let is_recoding = obs.iter().all(|&o| !std::mem::replace(&mut injective[o as usize], true));
                if is_recoding {
                    return Ok(Entropy::exact(self.entropy()));
                }
                let mut block = 1;
                while block < HMM_MAX_BLOCK && nb.pow(block as u32 + 1) <= HMM_MAX_WORDS {
                    block += 1;
                }
                let (lo, hi) = hidden_markov_bracket(initial, transition, &obs, nb, block);
                Ok(Entropy {
                    value: 0.5 * (lo + hi),
                    lo,
                    hi,
                })
            }
        }
    }

    /// `h^a = sum_i a_i h(eta o tau_{i-1}^{-1})`.
    pub fn weighted_entropy(&self, chain: &FactorChain, a: &WeightVector) -> Result<Entropy> {
        a.check_against(chain)?;
        let mut out = Entropy::exact(0.0);
        for i in 0..chain.levels() {
            let h = self.level_entropy(chain, i)?;
            let w = a.weight(i + 1);
            out.value += w * h.value;
            out.lo += w * h.lo;
            out.hi += w * h.hi;
        }
        Ok(out)
    }
}

/// Dimension of the generic set of `eta`, which equals its weighted entropy.
pub fn generic_set_dimension(
    eta: &InvariantMeasure,
    chain: &FactorChain,
    a: &WeightVector,
) -> Result<Entropy> {
    eta.weighted_entropy(chain, a)
}

/// Bounds `H(Y_n | Y^{n-1}, X_1) <= h(Y) <= H(Y_n | Y^{n-1})` for the
/// observation process `Y_t = obs(X_t)` of a stationary Markov chain.
fn hidden_markov_bracket(
    initial: &[f64],
    transition: &[Vec<f64>],
    obs: &[Symbol],
    nb: usize,
    n: usize,
) -> (f64, f64) {
    let ns = initial.len();
    // h_joint[t] = H(Y^t), h_cond[t] = H(Y^t | X_1), for t = 1..=n.
    let mut h_joint = vec![0.0; n + 1];
    let mut h_cond = vec![0.0; n + 1];
    // alpha[x1 * ns + x] = P(X_1 = x1, Y^t = y, X_t = x).
    let mut stack: Vec<(usize, Vec<f64>)> = Vec::new();
    for y in 0..nb {
        let mut alpha = vec![0.0; ns * ns];
        for x in 0..ns {
            if obs[x] as usize == y {
                alpha[x * ns + x] = initial[x];
            }
        }
        stack.push((1, alpha));
    }
    while let Some((t, alpha)) = stack.pop() {
        let total: f64 = alpha.iter().sum();
        if total <= 0.0 {
            continue;
        }
        h_joint[t] -= total * total.ln();
        for x1 in 0..ns {
            let joint: f64 = alpha[x1 * ns..(x1 + 1) * ns].iter().sum();
            if joint > 0.0 {
                h_cond[t] -= joint * (joint / initial[x1]).ln();
            }
        }
        if t == n {
            continue;
        }
        for y in 0..nb {
            let mut next = vec![0.0; ns * ns];
            for x1 in 0..ns {
                for x in 0..ns {
                    let v = alpha[x1 * ns + x];
                    if v == 0.0 {
                        continue;
                    }
                    for (xn, &p) in transition[x].iter().enumerate() {
                        if obs[xn] as usize == y {
                            next[x1 * ns + xn] += v * p;
                        }
                    }
                }
            }
            stack.push((t + 1, next));
        }
    }
    let hi = h_joint[n] - h_joint[n - 1];
    let lo = h_cond[n] - h_cond[n - 1];
    (lo.min(hi), hi)
}

/// `max |log mu(IJ) - log mu(I) - log mu(J)|` over `|I|, |J| <= n_max`;
/// infinite when some involved mass vanishes.
pub fn quasi_bernoulli_diagnostic(
    alphabet: usize,
    n_max: usize,
    log_mass: impl Fn(&[Symbol]) -> f64,
) -> f64 {
    let mut worst = 0.0f64;
    let words: Vec<Vec<Symbol>> = (1..=n_max)
        .flat_map(|n| {
            (0..alphabet.pow(n as u32)).map(move |idx| {
                let mut w = vec![0; n];
                decode(idx, alphabet, &mut w);
                w
            })
        })
        .collect();
    let logs: Vec<f64> = words.iter().map(|w| log_mass(w)).collect();
    let mut joined = Vec::with_capacity(2 * n_max);
    for (i, u) in words.iter().enumerate() {
        for (j, v) in words.iter().enumerate() {
            joined.clear();
            joined.extend_from_slice(u);
            joined.extend_from_slice(v);
            let whole = log_mass(&joined);
            if !whole.is_finite() || !logs[i].is_finite() || !logs[j].is_finite() {
                return f64::INFINITY;
            }
            worst = worst.max((whole - logs[i] - logs[j]).abs());
        }
    }
    worst
}

/// Total log mass of all words of length `n`; zero for a probability measure.
pub fn total_log_mass(alphabet: usize, n: usize, log_mass: impl Fn(&[Symbol]) -> f64) -> f64 {
    let mut w = vec![0; n];
    let logs: Vec<f64> = (0..alphabet.pow(n as u32))
        .map(|idx| {
            decode(idx, alphabet, &mut w);
            log_mass(&w)
        })
        .collect();
    log_sum_exp(&logs)
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

    #[test]
    fn carpet_masses_sum_to_one() {
        let (chain, a) = carpet();
        let mu = WeightedGibbsMeasure::new(&FiniteDepth::zero(0, 3), &chain, &a, &Default::default()).unwrap();
        let p: Vec<f64> = mu.level_masses().unwrap()[0].iter().map(|v| v.exp()).collect();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // sum_j N_j^{a/(a+b)} = e^{P/(a+b)} for fiber counts N = (2, 1).
        let (a1, ak) = (a.weight(1), a.total());
        let lhs = 2f64.powf(a1 / ak) + 1.0;
        assert!((lhs.ln() - mu.pressure().estimate / ak).abs() < 1e-13);
        assert!((p[0] - p[1]).abs() < 1e-15);
    }

    #[test]
    fn classical_and_uniform_masses() {
        let chain = FactorChain::full_shift(3).unwrap();
        let a = WeightVector::new(vec![1.0]).unwrap();
        let w = [1.0f64, 2.0, 5.0];
        let phi = FiniteDepth::depth_one(0, w.iter().map(|v| v.ln()).collect()).unwrap();
        let mu = WeightedGibbsMeasure::new(&phi, &chain, &a, &Default::default()).unwrap();
        for (s, m) in mu.level_masses().unwrap()[0].iter().enumerate() {
            assert!((m.exp() - w[s] / 8.0).abs() < 1e-15);
        }
        let chain = FactorChain::new(vec![4, 4], vec![vec![0, 1, 2, 3]]).unwrap();
        let a = WeightVector::new(vec![0.3, 0.9]).unwrap();
        let mu = WeightedGibbsMeasure::new(&FiniteDepth::zero(0, 4), &chain, &a, &Default::default()).unwrap();
        for m in &mu.level_masses().unwrap()[0] {
            assert!((m.exp() - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn marginal_matches_formula() {
        let chain = FactorChain::new(vec![3, 2], vec![vec![1, 0, 1]]).unwrap();
        let a = WeightVector::new(vec![0.4, 0.7]).unwrap();
        let phi = FiniteDepth::depth_one(0, vec![0.3, -0.8, 1.1]).unwrap();
        let mu = WeightedGibbsMeasure::new(&phi, &chain, &a, &Default::default()).unwrap();
        let j = Word::new(&chain, 1, vec![0, 1, 1, 0]).unwrap();
        let m = mu.marginal_mass(&j).unwrap().value;
        assert!((m - mu.marginal_formula(1, j.symbols())).abs() < 1e-12);
        let collapse = FactorChain::new(vec![3, 1], vec![vec![0, 0, 0]]).unwrap();
        let mu = WeightedGibbsMeasure::new(&phi, &collapse, &a, &Default::default()).unwrap();
        let j = Word::new(&collapse, 1, vec![0, 0, 0]).unwrap();
        assert!(mu.marginal_mass(&j).unwrap().value.abs() < 1e-14);
    }

    #[test]
    fn uniform_carpet_ball_mass() {
        let (chain, a) = carpet();
        let mu = WeightedGibbsMeasure::new(&FiniteDepth::zero(0, 3), &chain, &a, &Default::default()).unwrap();
        let x = Word::parse(&chain, 0, "01201201201").unwrap();
        for n in 1..=6 {
            let got = mu.ball_mass(&x, n).unwrap().value;
            let brute = mu.ball_mass_by_fiber_sum(&x, n).unwrap();
            assert!((got - brute).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn entropies() {
        let chain = FactorChain::new(vec![3, 3], vec![vec![0, 1, 2]]).unwrap();
        let a = WeightVector::new(vec![0.5, 0.25]).unwrap();
        let u = InvariantMeasure::bernoulli(vec![1.0 / 3.0; 3]).unwrap();
        let h = u.weighted_entropy(&chain, &a).unwrap();
        assert!((h.value - 0.75 * 3f64.ln()).abs() < 1e-14);
        let point = InvariantMeasure::bernoulli(vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(point.weighted_entropy(&chain, &a).unwrap().value, 0.0);
    }

    #[test]
    fn hidden_markov_bracket_contains_known_rates() {
        // Lumping two states with identical rows gives a Markov image.
        let chain = FactorChain::new(vec![3, 2], vec![vec![0, 0, 1]]).unwrap();
        let t = vec![
            vec![0.2, 0.3, 0.5],
            vec![0.2, 0.3, 0.5],
            vec![0.4, 0.4, 0.2],
        ];
        let pi = stationary(&t);
        let eta = InvariantMeasure::markov(pi.clone(), t).unwrap();
        let h = eta.level_entropy(&chain, 1).unwrap();
        // Image chain on {0,1}: P(0->0) = 0.5, P(1->0) = 0.8.
        let img = [vec![0.5, 0.5], vec![0.8, 0.2]];
        let rho0 = pi[0] + pi[1];
        let exact = rho0 * shannon(&img[0]) + (1.0 - rho0) * shannon(&img[1]);
        assert!(h.lo <= exact + 1e-12 && exact <= h.hi + 1e-12);
        assert!(h.width() < 1e-6);
    }

    #[test]
    fn markov_validation() {
        assert!(InvariantMeasure::markov(vec![0.5, 0.5], vec![vec![0.9, 0.1], vec![0.9, 0.1]]).is_err());
        assert!(InvariantMeasure::bernoulli(vec![0.5, 0.6]).is_err());
        let m: InvariantMeasure = serde_json::from_str(r#"{"bernoulli":[0.25,0.75]}"#).unwrap();
        assert_eq!(m.alphabet(), 2);
    }

    #[test]
    fn quasi_bernoulli() {
        let b = InvariantMeasure::bernoulli(vec![0.2, 0.8]).unwrap();
        assert!(quasi_bernoulli_diagnostic(2, 3, |w| b.log_cylinder(w)) < 1e-12);
        let t = vec![vec![0.0, 1.0], vec![0.5, 0.5]];
        let m = InvariantMeasure::markov(stationary(&t), t).unwrap();
        assert_eq!(quasi_bernoulli_diagnostic(2, 2, |w| m.log_cylinder(w)), f64::INFINITY);
    }

    fn stationary(t: &[Vec<f64>]) -> Vec<f64> {
        let n = t.len();
        let mut pi = vec![1.0 / n as f64; n];
        for _ in 0..10_000 {
            let next: Vec<f64> = (0..n).map(|j| (0..n).map(|i| pi[i] * t[i][j]).sum()).collect();
            pi = next;
        }
        pi
    }
}
