//! Maximal weighted entropy under prescribed block marginals.
//!
//! The optimum is the equilibrium state of `sum_I q(I) 1_[I]` for the `q`
//! minimizing the convex dual `G(q) = Q(q) - p . q`, and the maximal weighted
//! entropy is `G` at the minimizer. `G` is invariant under `q -> q + c`, so
//! iterates are kept in the gauge `sum q = 0`.

use serde::{Deserialize, Serialize};

use crate::equilibrium::WeightedGibbsMeasure;
use crate::error::{Error, Result};
use crate::optimize::{minimize, BfgsOptions};
use crate::potential::{decode, index_of, indicator, FiniteDepth};
use crate::pressure::{pressure_function, Estimator, GradientOptions, PressureOptions};
use crate::shift_space::{FactorChain, Symbol, WeightVector};

/// Tolerance for normalization and shift-consistency of a constraint.
pub const CONSISTENCY_TOL: f64 = 1e-10;

/// A probability vector over base words of length `n`, indexed
/// lexicographically (first symbol most significant).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalConstraint {
    pub n: usize,
    pub p: Vec<f64>,
}

impl MarginalConstraint {
    /// Checks shape against `alphabet` and that `p` lies in the relative
    /// interior of the shift-consistent simplex.
    pub fn validate(&self, alphabet: usize) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidMeasure("block length must be at least 1".into()));
        }
        let len = (alphabet as u64)
            .checked_pow(self.n as u32)
            .filter(|&l| l <= 1 << 24)
            .ok_or_else(|| Error::InvalidMeasure(format!("block length {} is too large", self.n)))?;
        if self.p.len() as u64 != len {
            return Err(Error::InvalidMeasure(format!(
                "expected {len} probabilities for words of length {}, got {}",
                self.n,
                self.p.len()
            )));
        }
        if let Some(i) = self.p.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidMeasure(format!("entry {i} is not finite")));
        }
        if let Some(i) = self.p.iter().position(|&v| v <= 0.0) {
            return Err(Error::BoundaryConstraint(format!(
                "entry {i} is {}; the constraint must be strictly positive",
                self.p[i]
            )));
        }
        let total: f64 = self.p.iter().sum();
        if (total - 1.0).abs() > CONSISTENCY_TOL {
            return Err(Error::BoundaryConstraint(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let worst = self.consistency_violation(alphabet);
        if worst > CONSISTENCY_TOL {
            return Err(Error::BoundaryConstraint(format!(
                "not shift-consistent: left and right marginals differ by {worst:e}"
            )));
        }
        Ok(())
    }

    /// `max_u |sum_e p(e u) - sum_e p(u e)|` over words `u` of length `n - 1`.
    pub fn consistency_violation(&self, alphabet: usize) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let inner = alphabet.pow(self.n as u32 - 1);
        (0..inner)
            .map(|u| {
                let left: f64 = (0..alphabet).map(|e| self.p[e * inner + u]).sum();
                let right: f64 = (0..alphabet).map(|e| self.p[u * alphabet + e]).sum();
                (left - right).abs()
            })
            .fold(0.0, f64::max)
    }

    /// The block law of `n`-words.
    pub fn from_block_law(n: usize, p: Vec<f64>) -> Self {
        Self { n, p }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionOptions {
    /// Target sup-norm of `grad Q(q) - p`.
    pub tol: f64,
    pub max_iter: usize,
    pub pressure: PressureOptions,
    pub grad: GradientOptions,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 500,
            pressure: PressureOptions::default(),
            grad: GradientOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Projection {
    /// Dual variables in the gauge `sum q = 0`.
    pub q: Vec<f64>,
    /// Maximal weighted entropy, `G(q)`.
    pub entropy: f64,
    /// `h^a` of the optimizing measure computed from its masses (`n = 1`).
    pub entropy_check: Option<f64>,
    /// `max_I |mu_q([I]) - p(I)|`.
    pub marginal_error: f64,
    pub iterations: usize,
    pub measure: WeightedGibbsMeasure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionSummary {
    pub q: Vec<f64>,
    pub entropy: f64,
    pub marginal_error: f64,
    pub iterations: usize,
}

impl Projection {
    pub fn summary(&self) -> ProjectionSummary {
        ProjectionSummary {
            q: self.q.clone(),
            entropy: self.entropy,
            marginal_error: self.marginal_error,
            iterations: self.iterations,
        }
    }
}

fn indicators(alphabet: usize, n: usize) -> Result<Vec<FiniteDepth>> {
    let mut w = vec![0 as Symbol; n];
    (0..alphabet.pow(n as u32))
        .map(|idx| {
            decode(idx, alphabet, &mut w);
            debug_assert_eq!(index_of(&w, alphabet), idx);
            indicator(0, alphabet, &w)
        })
        .collect()
}

fn centre(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
}

/// Solves the marginal problem for `c`.
pub fn project(
    c: &MarginalConstraint,
    chain: &FactorChain,
    a: &WeightVector,
    opts: &ProjectionOptions,
) -> Result<Projection> {
    a.check_against(chain)?;
    let alphabet = chain.alphabet_size(0);
    c.validate(alphabet)?;
    let phis = indicators(alphabet, c.n)?;
    let mut popts = opts.pressure;
    if c.n >= 2 {
        // Differences of extrapolated estimates are not smooth in q.
        popts.estimator = Estimator::LastIncrement;
    }
    let objective = |q: &[f64]| -> Result<(f64, Vec<f64>)> {
        let s = pressure_function(&phis, chain, a, q, &popts, &opts.grad)?;
        let value = s.value - c.p.iter().zip(q).map(|(p, x)| p * x).sum::<f64>();
        let mut g: Vec<f64> = s.gradient.iter().zip(&c.p).map(|(d, p)| d - p).collect();
        centre(&mut g);
        Ok((value, g))
    };
    let bfgs = BfgsOptions {
        tol: opts.tol,
        max_iter: opts.max_iter,
        ..Default::default()
    };
    let r = minimize(objective, &vec![0.0; c.p.len()], &bfgs)?;
    let mut q = r.x;
    centre(&mut q);
    let s = pressure_function(&phis, chain, a, &q, &popts, &opts.grad)?;
    let entropy = s.value - c.p.iter().zip(&q).map(|(p, x)| p * x).sum::<f64>();
    let marginal_error = s
        .gradient
        .iter()
        .zip(&c.p)
        .map(|(d, p)| (d - p).abs())
        .fold(0.0, f64::max);
    let potential = FiniteDepth::new(0, alphabet, c.n, q.clone())?;
    let measure = WeightedGibbsMeasure::new(&potential, chain, a, &popts)?;
    let entropy_check = measure.weighted_entropy().ok();
    Ok(Projection {
        q,
        entropy,
        entropy_check,
        marginal_error,
        iterations: r.iterations,
        measure,
    })
}
