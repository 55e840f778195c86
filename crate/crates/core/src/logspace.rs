//! Log-domain arithmetic.
//!
//! Cylinder weights at word length 30 routinely span hundreds of orders of
//! magnitude, so every sum of weights in this crate is carried out as a
//! log-sum-exp. Reductions over slices use a fixed pairwise tree so that the
//! result depends only on the order of the inputs, never on how work was split
//! between threads.

/// `log(exp(a) + exp(b))` without overflow.
#[inline]
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Log-sum-exp of a slice, reduced along a fixed balanced binary tree.
///
/// Empty input gives `-inf`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    match values.len() {
        0 => f64::NEG_INFINITY,
        1 => values[0],
        2 => log_add(values[0], values[1]),
        n => {
            let mid = n / 2;
            log_add(log_sum_exp(&values[..mid]), log_sum_exp(&values[mid..]))
        }
    }
}

/// Streaming log-sum-exp accumulator.
///
/// Keeps a running maximum and a rescaled linear sum, so pushing values in a
/// fixed order always yields the same bits.
#[derive(Debug, Clone, Copy)]
pub struct LogSumAcc {
    max: f64,
    scaled: f64,
}

impl Default for LogSumAcc {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSumAcc {
    pub fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }

    #[inline]
    pub fn push(&mut self, v: f64) {
        if v == f64::NEG_INFINITY {
            return;
        }
        if v <= self.max {
            self.scaled += (v - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - v).exp() + 1.0;
            self.max = v;
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}
