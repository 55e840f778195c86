//! Legendre-transform spectra.
//!
//! Spectra are sampled parametrically: for each `q` on a grid,
//! `alpha(q) = Q'(q)` and `f(alpha(q)) = Q(q) - q alpha(q)`. The end points
//! `alpha(+-q_max)` are inner approximations of the domain, not its exact
//! end points. Level sets are described through the potential alone; how it
//! splits across levels does not enter.

use std::fmt::Write as _;

use serde::Serialize;

use crate::equilibrium::WeightedGibbsMeasure;
use crate::error::{Error, Result};
use crate::exec::map_slice;
use crate::optimize::{minimize, BfgsOptions, Stop};
use crate::potential::{linear_combination, FiniteDepth};
use crate::pressure::{
    pressure, pressure_function, GradientOptions, PressureEnclosure, PressureOptions,
};
use crate::shift_space::{FactorChain, Symbol, WeightVector};

/// Relative spread of `alpha` below which a spectrum counts as a single point.
const DEGENERATE_SPREAD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumSample {
    pub q: f64,
    pub alpha: f64,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub samples: Vec<SpectrumSample>,
    /// `[alpha_min, alpha_max]`, an inner approximation of the domain.
    pub domain: (f64, f64),
    pub q_range: (f64, f64),
    pub description: String,
}

impl Spectrum {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,alpha,f\n");
        for s in &self.samples {
            writeln!(out, "{},{},{}", s.q, s.alpha, s.f).expect("writing to a String");
        }
        out
    }

    pub fn is_degenerate(&self) -> bool {
        self.samples.len() == 1
    }

    /// Largest `f` and the sample attaining it.
    pub fn max_f(&self) -> Option<SpectrumSample> {
        self.samples
            .iter()
            .copied()
            .max_by(|a, b| a.f.total_cmp(&b.f))
    }
}

/// `steps` evenly spaced points in `[-q_max, q_max]`.
pub fn q_grid(q_max: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 || q_max == 0.0 {
        return vec![0.0];
    }
    (0..steps)
        .map(|j| {
            let v = -q_max + 2.0 * q_max * j as f64 / (steps - 1) as f64;
            if v.abs() < 1e-15 * q_max {
                0.0
            } else {
                v
            }
        })
        .collect()
}

/// Birkhoff spectrum of a scalar potential.
pub fn birkhoff_spectrum(
    phi: &FiniteDepth,
    chain: &FactorChain,
    a: &WeightVector,
    q_grid: &[f64],
    opts: &PressureOptions,
    grad: &GradientOptions,
) -> Result<Spectrum> {
    if q_grid.windows(2).any(|w| !(w[0] < w[1])) || q_grid.iter().any(|q| !q.is_finite()) {
        return Err(Error::InvalidPotential("q grid must be finite and increasing".into()));
    }
    if q_grid.is_empty() {
        return Err(Error::InvalidPotential("q grid is empty".into()));
    }
    let phis = [phi.clone()];
    let samples = map_slice(opts.workers, q_grid, |&q| {
        pressure_function(&phis, chain, a, &[q], opts, grad).map(|s| SpectrumSample {
            q,
            alpha: s.gradient[0],
            f: s.value - q * s.gradient[0],
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.alpha), hi.max(s.alpha)));
    let q_range = (q_grid[0], q_grid[q_grid.len() - 1]);
    let description = format!("birkhoff spectrum of a depth-{} potential", phi.depth());
    if hi - lo <= DEGENERATE_SPREAD * lo.abs().max(hi.abs()).max(1.0) {
        let s = pressure_function(&phis, chain, a, &[0.0], opts, grad)?;
        let alpha = s.gradient[0];
        return Ok(Spectrum {
            samples: vec![SpectrumSample {
                q: 0.0,
                alpha,
                f: s.value,
            }],
            domain: (alpha, alpha),
            q_range,
            description,
        });
    }
    Ok(Spectrum {
        domain: (lo, hi),
        samples,
        q_range,
        description,
    })
}

/// `psi(s) = sum_i a_i log mu_i(tau_{i-1} s)` for an exact equilibrium state.
pub fn local_dimension_potential(mu: &WeightedGibbsMeasure) -> Result<FiniteDepth> {
    let levels = mu.level_masses()?;
    let chain = mu.chain();
    let a = mu.weights();
    let table = (0..chain.alphabet_size(0) as Symbol)
        .map(|s| {
            (0..chain.levels())
                .map(|i| a.weight(i + 1) * levels[i][chain.tau_symbol(i, s) as usize])
                .sum()
        })
        .collect();
    FiniteDepth::depth_one(0, table)
}

/// Spectrum of local dimensions of an exact weighted equilibrium state: the
/// Birkhoff spectrum of `-psi`.
pub fn local_dimension_spectrum(
    mu: &WeightedGibbsMeasure,
    q_grid: &[f64],
    opts: &PressureOptions,
    grad: &GradientOptions,
) -> Result<Spectrum> {
    let psi = local_dimension_potential(mu)?;
    let neg = linear_combination(&[psi], &[-1.0])?;
    let mut s = birkhoff_spectrum(&neg, mu.chain(), mu.weights(), q_grid, opts, grad)?;
    s.description = "local dimension spectrum".into();
    Ok(s)
}

/// Dimension of the generic set of a Bernoulli/Markov measure is its
/// weighted entropy; see [`crate::equilibrium::generic_set_dimension`].
pub use crate::equilibrium::generic_set_dimension;

/// Hausdorff dimension of the symbolic space: the pressure of zero.
pub fn dimension_of_space(chain: &FactorChain, a: &WeightVector) -> Result<PressureEnclosure> {
    pressure(
        &FiniteDepth::zero(0, chain.alphabet_size(0)),
        chain,
        a,
        &PressureOptions::default(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum VectorSpectrumValue {
    Inside { f: f64, q: Vec<f64>, iterations: usize },
    /// The dual objective is unbounded below: `alpha` lies outside the domain.
    Outside { objective: f64, q: Vec<f64> },
}

/// `inf_q { Q(q) - alpha . q }` for `d >= 1` potentials.
#[allow(clippy::too_many_arguments)]
pub fn vector_spectrum(
    phis: &[FiniteDepth],
    chain: &FactorChain,
    a: &WeightVector,
    alpha: &[f64],
    q_init: &[f64],
    opts: &PressureOptions,
    grad: &GradientOptions,
    bfgs: &BfgsOptions,
) -> Result<VectorSpectrumValue> {
    if alpha.len() != phis.len() || q_init.len() != phis.len() {
        return Err(Error::LengthMismatch(alpha.len(), phis.len()));
    }
    if alpha.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidPotential("alpha must be finite".into()));
    }
    // Inside the domain the infimum is a dimension, hence non-negative.
    let threshold = -1e-9;
    let bfgs = BfgsOptions {
        stop_below: Some(threshold),
        max_abs_x: Some(1e6),
        ..*bfgs
    };
    let objective = |q: &[f64]| -> Result<(f64, Vec<f64>)> {
        let s = pressure_function(phis, chain, a, q, opts, grad)?;
        let value = s.value - alpha.iter().zip(q).map(|(x, y)| x * y).sum::<f64>();
        let g = s.gradient.iter().zip(alpha).map(|(d, x)| d - x).collect();
        Ok((value, g))
    };
    let r = minimize(objective, q_init, &bfgs)?;
    Ok(match r.stop {
        Stop::BelowThreshold | Stop::RanAway => VectorSpectrumValue::Outside {
            objective: r.value,
            q: r.x,
        },
        Stop::Converged | Stop::Stalled if r.value < threshold => VectorSpectrumValue::Outside {
            objective: r.value,
            q: r.x,
        },
        Stop::Converged | Stop::Stalled => VectorSpectrumValue::Inside {
            f: r.value.max(0.0),
            q: r.x,
            iterations: r.iterations,
        },
    })
}
