//! Derivative-free univariate maximization.
//!
//! [`maximize_bounded`] is Brent's golden-section search with parabolic
//! steps, applied to `-f`. The objective here is usually an expected Bayes
//! factor computed by nested quadrature, so no derivatives are available and
//! evaluations are expensive.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_X_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub argmax: f64,
    pub max_value: f64,
    pub evaluations: usize,
}

const GOLDEN: f64 = 0.381_966_011_250_105_15; // (3 - √5) / 2
const MAX_ITERATIONS: usize = 500;

/// Maximizes `f` on `[lo, hi]`.
///
/// The interior search stops when the bracket around the best point is
/// within `x_tol`. Both endpoints are evaluated as well and win if they
/// beat the interior optimum, so a maximum sitting on the boundary is
/// returned exactly.
pub fn maximize_bounded<F>(f: F, lo: f64, hi: f64, x_tol: f64) -> Result<OptResult>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidBracket { lo, hi });
    }
    if !(x_tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "x_tol",
            value: x_tol,
        });
    }

    let mut evaluations = 0;
    let mut neg = |x: f64| -> Result<f64> {
        evaluations += 1;
        Ok(-f(x)?)
    };

    let (mut a, mut b) = (lo, hi);
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = neg(x)?;
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;

    for _ in 0..MAX_ITERATIONS {
        let mid = 0.5 * (a + b);
        let tol1 = f64::EPSILON.sqrt() * x.abs() + x_tol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - mid).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }

        let mut golden = true;
        if e.abs() > tol1 {
            // parabola through x, w, v
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < mid { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < mid { b - x } else { a - x };
            d = GOLDEN * e;
        }

        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = neg(u)?;

        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }

    let mut best = (x, -fx);
    for edge in [lo, hi] {
        let value = -neg(edge)?;
        if value > best.1 {
            best = (edge, value);
        }
    }
    Ok(OptResult {
        argmax: best.0,
        max_value: best.1,
        evaluations,
    })
}

/// Returns the grid point with the largest objective, smallest point on ties.
///
/// Points are evaluated in parallel; the outcome does not depend on the
/// evaluation order.
pub fn maximize_grid<F>(f: F, points: &[f64]) -> Result<OptResult>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let values = evaluate_grid(&f, points)?;
    let (argmax, max_value) =
        values.iter().copied().fold(
            (points[0], values[0].1),
            |best, (x, fx)| if fx > best.1 { (x, fx) } else { best },
        );
    Ok(OptResult {
        argmax,
        max_value,
        evaluations: points.len(),
    })
}

/// Evaluates `f` on every grid point, in grid order.
pub fn evaluate_grid<F>(f: &F, points: &[f64]) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    check_grid(points)?;
    points.par_iter().map(|&x| f(x).map(|fx| (x, fx))).collect()
}

pub fn check_grid(points: &[f64]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for (index, pair) in points.windows(2).enumerate() {
        if !(pair[0] < pair[1]) {
            return Err(Error::UnsortedGrid { index: index + 1 });
        }
    }
    Ok(())
}
