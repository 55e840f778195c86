use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use super::finite_depth::FiniteDepth;
use super::Potential;
use crate::logspace::{log_add, LogSumAcc};
use crate::shift_space::Symbol;

/// Entries kept in the per-potential memo before it stops growing.
const MEMO_CAP: usize = 1 << 20;

/// `A * log sum_{I} phi(I)^{1/A}` over the words `I` whose symbol at position
/// `t` lies in `allowed(t)`, for a finite-depth `phi`.
///
/// A left-to-right transfer over states formed by the last `m - 1` symbols;
/// each completed window contributes `g / A` and the joint boundary maximum
/// is added at the end.
pub(crate) fn finite_depth_fiber_sum<'a>(
    p: &FiniteDepth,
    n: usize,
    cap_a: f64,
    allowed: impl Fn(usize) -> &'a [Symbol],
) -> f64 {
    let na = p.alphabet();
    let m = p.depth();
    let inv = 1.0 / cap_a;
    let full_states = na.pow(m as u32 - 1);
    let mut cur = vec![0.0];
    let mut r = 0usize;
    for t in 0..n {
        let syms = allowed(t);
        if r + 1 < m {
            let mut next = vec![f64::NEG_INFINITY; cur.len() * na];
            for (state, &v) in cur.iter().enumerate() {
                if v == f64::NEG_INFINITY {
                    continue;
                }
                for &s in syms {
                    next[state * na + s as usize] = v;
                }
            }
            cur = next;
            r += 1;
        } else {
            let mut next = vec![f64::NEG_INFINITY; full_states];
            for (state, &v) in cur.iter().enumerate() {
                if v == f64::NEG_INFINITY {
                    continue;
                }
                for &s in syms {
                    let block = state * na + s as usize;
                    let target = block % full_states;
                    next[target] = log_add(next[target], v + p.g(block) * inv);
                }
            }
            cur = next;
        }
    }
    let mut acc = LogSumAcc::new();
    for (state, &v) in cur.iter().enumerate() {
        if v > f64::NEG_INFINITY {
            acc.push(v + p.tail(r, state) * inv);
        }
    }
    cap_a * acc.value()
}

/// Push of a finite-depth potential of depth `m >= 2`: the fiber sum is a
/// path sum of positive transfer matrices indexed by `(m-1)`-blocks, raised
/// to the power `A`.
pub struct MatrixCocycle {
    base: Arc<FiniteDepth>,
    fibers: Vec<Vec<Symbol>>,
    exponent: f64,
    level: usize,
}

impl MatrixCocycle {
    pub(crate) fn new(base: Arc<FiniteDepth>, fibers: Vec<Vec<Symbol>>, exponent: f64) -> Self {
        let level = base.level() + 1;
        Self {
            base,
            fibers,
            exponent,
            level,
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn alphabet(&self) -> usize {
        self.fibers.len()
    }

    pub fn base(&self) -> &FiniteDepth {
        &self.base
    }

    pub fn qm_log_constant(&self) -> f64 {
        self.base.qm_log_constant()
    }

    pub fn log_phi(&self, word: &[Symbol]) -> f64 {
        finite_depth_fiber_sum(&self.base, word.len(), self.exponent, |t| {
            &self.fibers[word[t] as usize]
        })
    }
}

impl fmt::Debug for MatrixCocycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixCocycle")
            .field("level", &self.level)
            .field("depth", &self.base.depth())
            .field("exponent", &self.exponent)
            .finish()
    }
}

/// Push evaluated by explicit enumeration of the fiber of each word.
///
/// Cost is the product of fiber sizes along the word, so exponential in the
/// word length.
pub struct Pushed {
    inner: Potential,
    fibers: Vec<Vec<Symbol>>,
    exponent: f64,
    level: usize,
    memo: RwLock<HashMap<Vec<Symbol>, f64>>,
}

impl Pushed {
    pub(crate) fn new(inner: Potential, fibers: Vec<Vec<Symbol>>, exponent: f64) -> Self {
        let level = inner.level() + 1;
        Self {
            inner,
            fibers,
            exponent,
            level,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn alphabet(&self) -> usize {
        self.fibers.len()
    }

    pub fn inner(&self) -> &Potential {
        &self.inner
    }

    pub fn qm_log_constant(&self) -> f64 {
        self.inner.qm_log_constant()
    }

    /// Memoized evaluation.
    pub fn log_phi(&self, word: &[Symbol]) -> f64 {
        if let Some(&v) = self.memo.read().expect("memo lock").get(word) {
            return v;
        }
        let v = self.log_phi_direct(word);
        let mut memo = self.memo.write().expect("memo lock");
        if memo.len() < MEMO_CAP {
            memo.insert(word.to_vec(), v);
        }
        v
    }

    /// Evaluation without touching any memo.
    pub fn log_phi_direct(&self, word: &[Symbol]) -> f64 {
        let n = word.len();
        let fibers: Vec<&[Symbol]> = word.iter().map(|&j| self.fibers[j as usize].as_slice()).collect();
        let mut pos = vec![0usize; n];
        let mut pre: Vec<Symbol> = fibers.iter().map(|f| f[0]).collect();
        let inv = 1.0 / self.exponent;
        let mut acc = LogSumAcc::new();
        loop {
            acc.push(self.inner.log_phi_direct(&pre) * inv);
            let mut t = n;
            loop {
                if t == 0 {
                    return self.exponent * acc.value();
                }
                t -= 1;
                pos[t] += 1;
                if pos[t] < fibers[t].len() {
                    pre[t] = fibers[t][pos[t]];
                    break;
                }
                pos[t] = 0;
                pre[t] = fibers[t][0];
            }
        }
    }
}

impl fmt::Debug for Pushed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Pushed")
            .field("level", &self.level)
            .field("exponent", &self.exponent)
            .field("inner", &self.inner)
            .finish()
    }
}
