//! Potentials as functions on cylinders, the push operators between levels
//! and the weighted potential assembled from a chain of pushes.
//!
//! Every potential stores `log phi(I)`, the log of the supremum of `phi_n`
//! over the cylinder `[I]`. The push of a level-`l` potential is
//!
//! ```text
//! psi(J) = ( sum_{I : pi_l(I) = J} phi(I)^{1/A} )^A,   A = a_1 + ... + a_{l+1}.
//! ```
//!
//! The supremum is taken over the full cylinder `[I]`; on full shifts this
//! coincides with the supremum restricted to a fiber. Supporting subshifts
//! would require the restricted supremum.

mod finite_depth;
mod pushed;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use finite_depth::FiniteDepth;
pub(crate) use finite_depth::{decode, index_of};
pub(crate) use pushed::finite_depth_fiber_sum;
pub use pushed::{MatrixCocycle, Pushed};

use crate::error::{Error, Result};
use crate::logspace::LogSumAcc;
use crate::shift_space::{FactorChain, Symbol, WeightVector, Word};

/// How a potential is represented and evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Repr {
    FiniteDepth(usize),
    MatrixCocycle,
    GenericPushed,
}

/// Whether pushes may use the closed-form and transfer-matrix fast paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PushMode {
    #[default]
    Fast,
    /// Always enumerate fibers; an independent check of the fast paths.
    Enumerate,
}

/// A cylinder potential at some level of the chain.
#[derive(Debug, Clone)]
pub enum Potential {
    FiniteDepth(Arc<FiniteDepth>),
    Cocycle(Arc<MatrixCocycle>),
    Pushed(Arc<Pushed>),
}

impl From<FiniteDepth> for Potential {
    fn from(p: FiniteDepth) -> Self {
        Potential::FiniteDepth(Arc::new(p))
    }
}

impl Potential {
    pub fn level(&self) -> usize {
        match self {
            Potential::FiniteDepth(p) => p.level(),
            Potential::Cocycle(p) => p.level(),
            Potential::Pushed(p) => p.level(),
        }
    }

    pub fn alphabet(&self) -> usize {
        match self {
            Potential::FiniteDepth(p) => p.alphabet(),
            Potential::Cocycle(p) => p.alphabet(),
            Potential::Pushed(p) => p.alphabet(),
        }
    }

    pub fn repr(&self) -> Repr {
        match self {
            Potential::FiniteDepth(p) => Repr::FiniteDepth(p.depth()),
            Potential::Cocycle(_) => Repr::MatrixCocycle,
            Potential::Pushed(_) => Repr::GenericPushed,
        }
    }

    /// `log c >= 0` with `|log phi(IJ) - log phi(I) - log phi(J)| <= log c`.
    pub fn qm_log_constant(&self) -> f64 {
        match self {
            Potential::FiniteDepth(p) => p.qm_log_constant(),
            Potential::Cocycle(p) => p.qm_log_constant(),
            Potential::Pushed(p) => p.qm_log_constant(),
        }
    }

    pub fn as_finite_depth(&self) -> Option<&FiniteDepth> {
        match self {
            Potential::FiniteDepth(p) => Some(p),
            _ => None,
        }
    }

    /// `log phi(I)` for a raw word at this potential's level (unchecked).
    pub fn log_phi(&self, word: &[Symbol]) -> f64 {
        match self {
            Potential::FiniteDepth(p) => p.log_phi(word),
            Potential::Cocycle(p) => p.log_phi(word),
            Potential::Pushed(p) => p.log_phi(word),
        }
    }

    /// As [`Potential::log_phi`] but bypassing memo tables, for one-shot sweeps.
    pub fn log_phi_direct(&self, word: &[Symbol]) -> f64 {
        match self {
            Potential::Pushed(p) => p.log_phi_direct(word),
            other => other.log_phi(word),
        }
    }

    /// Checked evaluation on a level-tagged word.
    pub fn eval(&self, word: &Word) -> Result<f64> {
        if word.level() != self.level() {
            return Err(Error::LevelMismatch {
                expected: self.level(),
                found: word.level(),
            });
        }
        Ok(self.log_phi(word.symbols()))
    }
}

/// `log sup_{[I]} phi_n` for a finite-depth potential.
pub fn phi_of_cylinder(p: &FiniteDepth, word: &Word) -> Result<f64> {
    if word.level() != p.level() {
        return Err(Error::LevelMismatch {
            expected: p.level(),
            found: word.level(),
        });
    }
    Ok(p.log_phi(word.symbols()))
}

/// Push from level `l` to `l + 1` with exponent `A_{l+1}`.
pub fn theta_push(
    p: &Potential,
    chain: &FactorChain,
    a: &WeightVector,
    mode: PushMode,
) -> Result<Potential> {
    a.check_against(chain)?;
    let l = p.level();
    if l + 1 >= chain.levels() {
        return Err(Error::InvalidPotential(format!(
            "cannot push a level-{l} potential in a {}-level chain",
            chain.levels()
        )));
    }
    if p.alphabet() != chain.alphabet_size(l) {
        return Err(Error::InvalidPotential(format!(
            "potential alphabet {} does not match level {l} alphabet {}",
            p.alphabet(),
            chain.alphabet_size(l)
        )));
    }
    let cap_a = a.cumulative(l + 1);
    let fibers = chain.fibers(l).to_vec();
    let out = match (p, mode) {
        (Potential::FiniteDepth(fd), PushMode::Fast) if fd.depth() == 1 => {
            let table = fibers
                .iter()
                .map(|fib| {
                    let mut acc = LogSumAcc::new();
                    fib.iter().for_each(|&s| acc.push(fd.g(s as usize) / cap_a));
                    cap_a * acc.value()
                })
                .collect();
            FiniteDepth::depth_one(l + 1, table)?.into()
        }
        (Potential::FiniteDepth(fd), PushMode::Fast) => {
            Potential::Cocycle(Arc::new(MatrixCocycle::new(fd.clone(), fibers, cap_a)))
        }
        _ => Potential::Pushed(Arc::new(Pushed::new(p.clone(), fibers, cap_a))),
    };
    Ok(out)
}

/// `[phi^(0), ..., phi^(k-1)]`, starting from a level-0 potential.
pub fn push_chain(
    p: &Potential,
    chain: &FactorChain,
    a: &WeightVector,
    mode: PushMode,
) -> Result<Vec<Potential>> {
    if p.level() != 0 {
        return Err(Error::LevelMismatch {
            expected: 0,
            found: p.level(),
        });
    }
    let mut out = vec![p.clone()];
    for _ in 1..chain.levels() {
        let next = theta_push(out.last().expect("non-empty"), chain, a, mode)?;
        out.push(next);
    }
    Ok(out)
}

/// The weighted potential built from a chain of pushes:
/// `log phi^a(I) = (1/A_1) log phi^(0)(I)
///   + sum_{i=1}^{k-1} (1/A_{i+1} - 1/A_i) log phi^(i)(tau_i I)`.
#[derive(Debug, Clone)]
pub struct WeightedPotential {
    chain: FactorChain,
    a: WeightVector,
    pushed: Vec<Potential>,
}

impl WeightedPotential {
    pub fn new(chain: &FactorChain, a: &WeightVector, pushed: Vec<Potential>) -> Result<Self> {
        a.check_against(chain)?;
        if pushed.len() != chain.levels() {
            return Err(Error::InvalidPotential(format!(
                "expected {} pushed potentials, got {}",
                chain.levels(),
                pushed.len()
            )));
        }
        for (i, p) in pushed.iter().enumerate() {
            if p.level() != i || p.alphabet() != chain.alphabet_size(i) {
                return Err(Error::InvalidPotential(format!(
                    "pushed potential {i} sits at level {} over {} symbols",
                    p.level(),
                    p.alphabet()
                )));
            }
        }
        Ok(Self {
            chain: chain.clone(),
            a: a.clone(),
            pushed,
        })
    }

    pub fn from_potential(
        p: &Potential,
        chain: &FactorChain,
        a: &WeightVector,
        mode: PushMode,
    ) -> Result<Self> {
        let pushed = push_chain(p, chain, a, mode)?;
        Self::new(chain, a, pushed)
    }

    pub fn pushed(&self) -> &[Potential] {
        &self.pushed
    }

    pub fn chain(&self) -> &FactorChain {
        &self.chain
    }

    pub fn weights(&self) -> &WeightVector {
        &self.a
    }

    /// `log phi^a(I)` for a base-level word.
    pub fn log_phi_a(&self, word: &[Symbol]) -> f64 {
        let a = &self.a;
        let mut total = self.pushed[0].log_phi(word) / a.cumulative(1);
        for i in 1..self.pushed.len() {
            let coef = 1.0 / a.cumulative(i + 1) - 1.0 / a.cumulative(i);
            if coef != 0.0 {
                let image = self.chain.project_symbols(0, i, word);
                total += coef * self.pushed[i].log_phi(&image);
            }
        }
        total
    }

    pub fn eval(&self, word: &Word) -> Result<f64> {
        if word.level() != 0 {
            return Err(Error::LevelMismatch {
                expected: 0,
                found: word.level(),
            });
        }
        Ok(self.log_phi_a(word.symbols()))
    }
}

/// `sum_i q_i Phi_i` for finite-depth potentials on one level.
///
/// Tables are broadcast to the largest depth and added; the distortion
/// constant is recomputed from the combined table, which never exceeds
/// `sum_i |q_i| C_i`.
pub fn linear_combination(ps: &[FiniteDepth], q: &[f64]) -> Result<FiniteDepth> {
    if ps.len() != q.len() {
        return Err(Error::LengthMismatch(ps.len(), q.len()));
    }
    let Some(first) = ps.first() else {
        return Err(Error::InvalidPotential("empty combination".into()));
    };
    if let Some(p) = ps
        .iter()
        .find(|p| p.level() != first.level() || p.alphabet() != first.alphabet())
    {
        return Err(Error::LevelMismatch {
            expected: first.level(),
            found: p.level(),
        });
    }
    let depth = ps.iter().map(FiniteDepth::depth).max().unwrap_or(1);
    let mut table = vec![0.0; first.alphabet().pow(depth as u32)];
    for (p, &c) in ps.iter().zip(q) {
        if c == 0.0 {
            continue;
        }
        let b = p.broadcast(depth)?;
        table
            .iter_mut()
            .zip(b.log_table())
            .for_each(|(t, &v)| *t += c * v);
    }
    FiniteDepth::new(first.level(), first.alphabet(), depth, table)
}

/// JSON description of a base-level potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialSpec {
    Table {
        #[serde(default = "default_level")]
        level: usize,
        depth: usize,
        log_table: Vec<f64>,
    },
    Zero {
        zero: bool,
    },
}

fn default_level() -> usize {
    1
}

impl PotentialSpec {
    /// Builds the potential on level 1 (the base shift) of `chain`.
    pub fn build(&self, chain: &FactorChain) -> Result<FiniteDepth> {
        let na = chain.alphabet_size(0);
        match self {
            PotentialSpec::Zero { zero: true } => Ok(FiniteDepth::zero(0, na)),
            PotentialSpec::Zero { zero: false } => Err(Error::InvalidPotential(
                "\"zero\" must be true when present".into(),
            )),
            PotentialSpec::Table {
                level,
                depth,
                log_table,
            } => {
                if *level != 1 {
                    return Err(Error::InvalidPotential(format!(
                        "input potentials live on level 1, got level {level}"
                    )));
                }
                FiniteDepth::new(0, na, *depth, log_table.clone())
            }
        }
    }
}

/// A named entry: a single potential or a vector of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialEntry {
    Single(PotentialSpec),
    Vector(Vec<PotentialSpec>),
}

impl PotentialEntry {
    pub fn build(&self, chain: &FactorChain) -> Result<Vec<FiniteDepth>> {
        match self {
            PotentialEntry::Single(s) => Ok(vec![s.build(chain)?]),
            PotentialEntry::Vector(v) if v.is_empty() => {
                Err(Error::InvalidPotential("empty potential vector".into()))
            }
            PotentialEntry::Vector(v) => v.iter().map(|s| s.build(chain)).collect(),
        }
    }
}

/// Indicator potential of the cylinder `[I]` as a depth-`|I|` table.
pub fn indicator(level: usize, alphabet: usize, word: &[Symbol]) -> Result<FiniteDepth> {
    let depth = word.len();
    let mut table = vec![0.0; alphabet.pow(depth as u32)];
    table[index_of(word, alphabet)] = 1.0;
    FiniteDepth::new(level, alphabet, depth, table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_level(fibers_map: Vec<Symbol>, top: usize, a: Vec<f64>) -> (FactorChain, WeightVector) {
        let n = fibers_map.len();
        (
            FactorChain::new(vec![n, top], vec![fibers_map]).unwrap(),
            WeightVector::new(a).unwrap(),
        )
    }

    #[test]
    fn push_counts_fibers() {
        let (chain, a) = two_level(vec![0, 0, 1], 2, vec![1.0, 1.0]);
        let p: Potential = FiniteDepth::zero(0, 3).into();
        let q = theta_push(&p, &chain, &a, PushMode::Fast).unwrap();
        let t = q.as_finite_depth().unwrap().log_table().to_vec();
        assert!((t[0] - 2f64.ln()).abs() < 1e-15);
        assert!(t[1].abs() < 1e-15);
    }

    #[test]
    fn push_carpet_weights() {
        let chain = FactorChain::new(vec![3, 2], vec![vec![0, 0, 1]]).unwrap();
        let a = WeightVector::from_log_scales(&[3.0, 2.0]).unwrap();
        let p: Potential = FiniteDepth::zero(0, 3).into();
        let q = theta_push(&p, &chain, &a, PushMode::Fast).unwrap();
        let t = q.as_finite_depth().unwrap().log_table().to_vec();
        let expect = 2f64.ln() / 3f64.ln();
        assert!((t[0] - expect).abs() < 1e-15);
        assert!(t[1].abs() < 1e-15);
    }

    #[test]
    fn weighted_depth_one_expansion() {
        let (chain, a) = two_level(vec![0, 1, 1], 2, vec![0.7, 0.4]);
        let g = vec![0.3, -0.5, 1.1];
        let p: Potential = FiniteDepth::depth_one(0, g.clone()).unwrap().into();
        let wp = WeightedPotential::from_potential(&p, &chain, &a, PushMode::Fast).unwrap();
        let w_top = wp.pushed()[1].as_finite_depth().unwrap().log_table().to_vec();
        let word = [2u32, 0, 1, 1];
        let expect: f64 = word
            .iter()
            .map(|&s| g[s as usize] / 0.7 + (1.0 / 1.1 - 1.0 / 0.7) * w_top[chain.tau_symbol(1, s) as usize])
            .sum();
        assert!((wp.log_phi_a(&word) - expect).abs() < 1e-13);
    }

    #[test]
    fn single_level_weighted_is_power() {
        let chain = FactorChain::full_shift(2).unwrap();
        let a = WeightVector::new(vec![0.5]).unwrap();
        let p: Potential = FiniteDepth::depth_one(0, vec![0.2, 0.9]).unwrap().into();
        let wp = WeightedPotential::from_potential(&p, &chain, &a, PushMode::Fast).unwrap();
        assert!((wp.log_phi_a(&[0, 1, 1]) - 2.0 * 2.0).abs() < 1e-14);
    }

    #[test]
    fn combinations() {
        let u = FiniteDepth::depth_one(0, vec![1.0, 2.0]).unwrap();
        let v = FiniteDepth::depth_one(0, vec![0.5, -1.0]).unwrap();
        let c = linear_combination(&[u.clone(), v.clone()], &[2.0, -1.0]).unwrap();
        assert_eq!(c.log_table(), &[1.5, 5.0]);
        let z = linear_combination(std::slice::from_ref(&u), &[0.0]).unwrap();
        assert_eq!(z.log_table(), &[0.0, 0.0]);
        let id = linear_combination(std::slice::from_ref(&u), &[1.0]).unwrap();
        assert_eq!(id, u);
        let w = FiniteDepth::new(0, 2, 2, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let c = linear_combination(&[u.clone(), w.clone()], &[1.0, 0.5]).unwrap();
        assert_eq!(c.depth(), 2);
        assert_eq!(c.log_table(), &[1.0, 1.5, 3.0, 3.5]);
        assert!(c.qm_log_constant() <= 0.5 * w.qm_log_constant() + 1e-15);
    }

    #[test]
    fn level_checks() {
        let (chain, a) = two_level(vec![0, 0, 1], 2, vec![1.0, 1.0]);
        let p: Potential = FiniteDepth::zero(0, 3).into();
        let top = theta_push(&p, &chain, &a, PushMode::Fast).unwrap();
        assert!(theta_push(&top, &chain, &a, PushMode::Fast).is_err());
        let w = Word::new(&chain, 1, vec![0, 1]).unwrap();
        assert!(matches!(p.eval(&w), Err(Error::LevelMismatch { .. })));
        assert!(top.eval(&w).is_ok());
    }

    #[test]
    fn spec_parsing() {
        let chain = FactorChain::new(vec![3, 2], vec![vec![0, 0, 1]]).unwrap();
        let s: PotentialEntry = serde_json::from_str(r#"{"zero":true}"#).unwrap();
        assert_eq!(s.build(&chain).unwrap()[0].log_table(), &[0.0; 3]);
        let s: PotentialEntry =
            serde_json::from_str(r#"[{"level":1,"depth":1,"log_table":[1,2,3]},{"zero":true}]"#)
                .unwrap();
        assert_eq!(s.build(&chain).unwrap().len(), 2);
        let s: PotentialEntry =
            serde_json::from_str(r#"{"level":2,"depth":1,"log_table":[1,2]}"#).unwrap();
        assert!(s.build(&chain).is_err());
    }
}
