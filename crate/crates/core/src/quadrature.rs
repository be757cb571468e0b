//! Adaptive one-dimensional quadrature.
//!
//! Panels are integrated with the 7-point Gauss / 15-point Kronrod pair and
//! the panel with the largest error estimate is bisected first. Neither rule
//! uses its endpoints, so integrands with integrable endpoint singularities
//! (`ln(1/p)` near `p = 0`, Beta poles) are never evaluated where they blow up.
//!
//! Rays are compactified with `x = bound ± u/(1-u)`, `u ∈ (0, 1)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and panel budget of the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_panels: 2048,
        }
    }
}

impl QuadConfig {
    pub fn new(rel_tol: f64, abs_tol: f64, max_panels: usize) -> Result<Self> {
        let cfg = Self {
            rel_tol,
            abs_tol,
            max_panels,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "rel_tol",
                value: self.rel_tol,
            });
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "abs_tol",
                value: self.abs_tol,
            });
        }
        if self.max_panels == 0 {
            return Err(Error::InvalidParameter {
                name: "max_panels",
                value: 0.0,
            });
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub panels_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    ToPlusInf,
    ToMinusInf,
}

// Kronrod abscissae on [-1, 1] (non-negative half), Gauss points are the odd
// indices.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap on the error; ties resolved by position for determinism
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

fn checked<F>(f: &F, x: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    match f(x) {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(v) => Err(Error::NonFiniteIntegrand { x, value: v }),
        Err(e) => Err(Error::Integrand { x, source: Box::new(e) }),
    }
}

fn gauss_kronrod_15<F>(f: &F, lo: f64, hi: f64) -> Result<Panel>
where
    F: Fn(f64) -> Result<f64>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let f_center = checked(f, center)?;

    let mut res_k = f_center * WGK[7];
    let mut res_g = f_center * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = checked(f, center - dx)?;
        let f2 = checked(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Panel { lo, hi, value, error })
}

// Panels narrower than this cannot be bisected without Kronrod nodes
// collapsing onto the panel edges.
fn too_narrow(lo: f64, hi: f64) -> bool {
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    hi - lo <= 1e3 * f64::EPSILON * scale
}

/// Integrates `f` over `(lo, hi)`.
///
/// `f` is never called at `lo` or `hi`. Converges when the summed error
/// estimate drops below `max(abs_tol, rel_tol·|value|)`; otherwise fails
/// with [`Error::NonConvergence`] once `max_panels` panels are in use.
pub fn integrate_finite<F>(f: F, lo: f64, hi: f64, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: Fn(f64) -> Result<f64>,
{
    cfg.validate()?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidBracket { lo, hi });
    }

    let first = gauss_kronrod_15(&f, lo, hi)?;
    let mut total = first.value;
    let mut total_error = first.error;
    let mut heap = BinaryHeap::with_capacity(cfg.max_panels.min(4096));
    heap.push(first);

    loop {
        if total_error <= cfg.target(total) {
            // re-add from scratch so that running-sum drift cannot fake convergence
            let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
            total = value;
            total_error = error;
            if total_error <= cfg.target(total) {
                return Ok(QuadResult {
                    value: total,
                    error_estimate: total_error,
                    panels_used: heap.len(),
                });
            }
        }
        if heap.len() >= cfg.max_panels {
            break;
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        if too_narrow(worst.lo, worst.hi) {
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let left = gauss_kronrod_15(&f, worst.lo, mid)?;
        let right = gauss_kronrod_15(&f, mid, worst.hi)?;
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    let (value, error_estimate) = heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    Err(Error::NonConvergence {
        value,
        error_estimate,
        panels: heap.len(),
    })
}

/// Integrates `f` over `[bound, ∞)` or `(-∞, bound]`.
///
/// Uses `x = bound ± u/(1-u)` with Jacobian `1/(1-u)²` and delegates to
/// [`integrate_finite`] on `u ∈ (0, 1)`. Failures report the original
/// abscissa `x`, not `u`.
pub fn integrate_semi_infinite<F>(f: F, bound: f64, direction: Direction, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: Fn(f64) -> Result<f64>,
{
    if !bound.is_finite() {
        return Err(Error::InvalidBracket { lo: bound, hi: bound });
    }
    let sign = match direction {
        Direction::ToPlusInf => 1.0,
        Direction::ToMinusInf => -1.0,
    };
    let mapped = |u: f64| -> Result<f64> {
        let w = 1.0 - u;
        let x = bound + sign * u / w;
        match f(x) {
            Ok(v) if v.is_finite() => {
                // v = 0 in the far tail must not turn into 0 * inf
                if v == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(v / (w * w))
                }
            }
            Ok(v) => Err(Error::NonFiniteIntegrand { x, value: v }),
            Err(e) => Err(Error::Integrand { x, source: Box::new(e) }),
        }
    };
    integrate_finite(mapped, 0.0, 1.0, cfg).map_err(|e| match e {
        // unwrap the u-level wrapper added by integrate_finite
        Error::Integrand { source, .. } => *source,
        other => other,
    })
}

/// Integrates over the whole real line as the sum of two rays meeting at
/// `split`.
pub fn integrate_real_line<F>(f: F, split: f64, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: Fn(f64) -> Result<f64>,
{
    let left = integrate_semi_infinite(&f, split, Direction::ToMinusInf, cfg)?;
    let right = integrate_semi_infinite(&f, split, Direction::ToPlusInf, cfg)?;
    Ok(QuadResult {
        value: left.value + right.value,
        error_estimate: left.error_estimate + right.error_estimate,
        panels_used: left.panels_used + right.panels_used,
    })
}
