//! Quasi-Newton minimization (BFGS with Armijo backtracking) for the small,
//! smooth convex problems in this crate.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfgsOptions {
    /// Stop when the sup-norm of the gradient falls to this level.
    pub tol: f64,
    pub max_iter: usize,
    /// Stop early once the objective drops below this value.
    pub stop_below: Option<f64>,
    /// Stop early once some coordinate exceeds this magnitude.
    pub max_abs_x: Option<f64>,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 500,
            stop_below: None,
            max_abs_x: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stop {
    Converged,
    BelowThreshold,
    RanAway,
    /// No descent step could be found; the gradient is at rounding level.
    Stalled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BfgsResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub iterations: usize,
    pub stop: Stop,
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `f`, which returns the value and gradient at a point.
pub fn minimize<F>(mut f: F, x0: &[f64], opts: &BfgsOptions) -> Result<BfgsResult>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let d = x0.len();
    let mut x = x0.to_vec();
    let (mut fx, mut g) = f(&x)?;
    let mut h = identity(d);
    let mut fresh = true;
    // Consecutive accepted steps that did not lower `f` beyond rounding.
    let mut flat = 0;
    for iter in 0..opts.max_iter {
        if sup_norm(&g) <= opts.tol {
            return Ok(done(x, fx, g, iter, Stop::Converged));
        }
        if opts.stop_below.is_some_and(|t| fx < t) {
            return Ok(done(x, fx, g, iter, Stop::BelowThreshold));
        }
        if opts.max_abs_x.is_some_and(|m| sup_norm(&x) > m) {
            return Ok(done(x, fx, g, iter, Stop::RanAway));
        }
        let mut p: Vec<f64> = (0..d).map(|i| -dot(&h[i], &g)).collect();
        let mut slope = dot(&p, &g);
        if !(slope < 0.0) {
            h = identity(d);
            p = g.iter().map(|v| -v).collect();
            slope = dot(&p, &g);
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<f64> = x.iter().zip(&p).map(|(xi, pi)| xi + t * pi).collect();
            if let Ok((fxn, gn)) = f(&xn) {
                if fxn.is_finite() && fxn <= fx + 1e-4 * t * slope {
                    accepted = Some((xn, fxn, gn));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((xn, fxn, gn)) = accepted else {
            if !fresh {
                h = identity(d);
                fresh = true;
                continue;
            }
            return if sup_norm(&g) <= opts.tol.max(1e-10) * 1e3 {
                Ok(done(x, fx, g, iter, Stop::Stalled))
            } else {
                Err(Error::NoConvergence {
                    iterations: iter,
                    grad_norm: sup_norm(&g),
                })
            };
        };
        flat = if fx - fxn <= 1e-14 * fx.abs().max(1.0) { flat + 1 } else { 0 };
        if flat >= 5 && sup_norm(&gn) <= opts.tol.max(1e-10) * 1e3 {
            return Ok(done(xn, fxn, gn, iter + 1, Stop::Stalled));
        }
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if fresh {
                let scale = sy / dot(&y, &y);
                h = identity(d);
                (0..d).for_each(|i| h[i][i] = scale);
            }
            update_inverse_hessian(&mut h, &s, &y, sy);
            fresh = false;
        }
        x = xn;
        fx = fxn;
        g = gn;
    }
    if sup_norm(&g) <= opts.tol {
        return Ok(done(x, fx, g, opts.max_iter, Stop::Converged));
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        grad_norm: sup_norm(&g),
    })
}

fn done(x: Vec<f64>, value: f64, gradient: Vec<f64>, iterations: usize, stop: Stop) -> BfgsResult {
    BfgsResult {
        x,
        value,
        gradient,
        iterations,
        stop,
    }
}

fn identity(d: usize) -> Vec<Vec<f64>> {
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// `H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T`.
fn update_inverse_hessian(h: &mut [Vec<f64>], s: &[f64], y: &[f64], sy: f64) {
    let d = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..d).map(|i| dot(&h[i], y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..d {
        for j in 0..d {
            h[i][j] += (1.0 + rho * yhy) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}
