//! Expected Bayes factor under a parameter and the calibration constant
//! `μ* = max_{θ ∈ Θ0} E_θ[BF]`.
//!
//! Strategies, cheapest first:
//!
//! * simple null `Θ0 = {θ0}`: `E_θ0[BF] = 1` by Fubini, nothing to compute;
//! * monotone shortcut: a family that is increasing in `s` on the null and
//!   decreasing on the alternative attains the maximum at `θ = 0`;
//! * grid tabulation over a finite null set;
//! * bounded search with Brent's method on a bracket inside `Θ0`.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{integrate_interval, ModelProblem, NullSet};
use crate::montecarlo::{mc_mean, uniform_open};
use crate::optimize::{evaluate_grid, maximize_bounded, DEFAULT_X_TOL};
use crate::quadrature::{integrate_finite, QuadConfig};

pub const DEFAULT_N_REPS: usize = 500_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

/// `E_θ[BF]` at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationEstimate {
    pub theta: f64,
    pub mean: f64,
    /// Zero for quadrature.
    pub std_error: f64,
    pub method: Method,
    /// Zero for quadrature.
    pub n_reps: usize,
}

/// Tolerances of the outer `s`-integral. Looser than the inner θ-integrals
/// so that inner noise stays below the outer error target.
pub fn outer_quad_config() -> QuadConfig {
    QuadConfig {
        rel_tol: 1e-7,
        abs_tol: 1e-10,
        max_panels: 2048,
    }
}

/// `∫ h(s) g_θ(s) ds` over the support; `h` is skipped where `g_θ` vanishes.
pub(crate) fn expectation_by_quadrature<H>(problem: &ModelProblem, theta: f64, h: H, cfg: &QuadConfig) -> Result<f64>
where
    H: Fn(f64) -> Result<f64>,
{
    let family = problem.likelihood();
    let (lo, hi) = family.support();
    let integrand = |s: f64| -> Result<f64> {
        let g = family.density(theta, s)?;
        if g == 0.0 {
            return Ok(0.0);
        }
        Ok(h(s)? * g)
    };
    Ok(integrate_finite(integrand, lo, hi, cfg)?.value)
}

/// `E_θ[BF] = ∫ BF(s) g_θ(s) ds` by adaptive quadrature.
pub fn expected_bf_quadrature(problem: &ModelProblem, theta: f64, cfg: &QuadConfig) -> Result<ExpectationEstimate> {
    let mean = expectation_by_quadrature(problem, theta, |s| problem.bayes_factor(s), cfg)?;
    Ok(ExpectationEstimate {
        theta,
        mean,
        std_error: 0.0,
        method: Method::Quadrature,
        n_reps: 0,
    })
}

/// One Bayes-factor-like statistic evaluated at an inverse-CDF draw of `S`
/// under `theta`. Non-finite values are errors: dropping them would bias the
/// mean downwards.
pub(crate) fn draw_statistic<H>(problem: &ModelProblem, theta: f64, h: &H, u: f64) -> Result<f64>
where
    H: Fn(f64) -> Result<f64>,
{
    let s = problem.likelihood().sample(theta, u)?;
    let value = h(s)?;
    if !value.is_finite() {
        return Err(Error::NonFiniteDraw { s, value });
    }
    Ok(value)
}

/// `E_θ[BF]` as the mean of `n_reps` Bayes factors at draws from `g_θ`.
pub fn expected_bf_monte_carlo(
    problem: &ModelProblem,
    theta: f64,
    n_reps: usize,
    seed: u64,
) -> Result<ExpectationEstimate> {
    let bf = |s: f64| problem.bayes_factor(s);
    let summary = mc_mean(n_reps, seed, |rng| {
        draw_statistic(problem, theta, &bf, uniform_open(rng))
    })?;
    Ok(ExpectationEstimate {
        theta,
        mean: summary.mean,
        std_error: summary.std_error,
        method: Method::MonteCarlo,
        n_reps: summary.n,
    })
}

/// How `μ*` is to be found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StrategySelector {
    /// Simple null, then monotone shortcut, then grid, then bounded search.
    #[default]
    Auto,
    SimpleNull,
    MonotoneShortcut,
    /// Brent search; without a bracket, `[q, c]` for `Θ0 = (-∞, c]` where
    /// `q` is the lower `tail_quantile` of the prior restricted to `Θ0`.
    BoundedSearch {
        bracket: Option<(f64, f64)>,
    },
    /// Tabulation over the given points, or over the atoms of a finite null.
    GridTabulation {
        points: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    SimpleNull,
    MonotoneShortcut,
    BoundedSearch,
    GridTabulation,
}

impl Strategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::SimpleNull => "simple_null",
            Strategy::MonotoneShortcut => "monotone_shortcut",
            Strategy::BoundedSearch => "bounded_search",
            Strategy::GridTabulation => "grid_tabulation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuStarConfig {
    pub outer: QuadConfig,
    pub x_tol: f64,
    pub tail_quantile: f64,
}

impl Default for MuStarConfig {
    fn default() -> Self {
        Self {
            outer: outer_quad_config(),
            x_tol: DEFAULT_X_TOL,
            tail_quantile: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuStarResult {
    pub mu_star: f64,
    pub theta_star: f64,
    pub strategy: Strategy,
    /// Every objective evaluation made on the way.
    pub diagnostics: Vec<ExpectationEstimate>,
    /// Distance of `theta_star` to the nearer end of the search bracket
    /// (bounded search only). Zero means the maximum sits on the bracket.
    pub boundary_distance: Option<f64>,
}

pub fn compute_mu_star(
    problem: &ModelProblem,
    selector: &StrategySelector,
    cfg: &MuStarConfig,
) -> Result<MuStarResult> {
    let result = match selector {
        StrategySelector::Auto => {
            let null = problem.null_set();
            if null.singleton().is_some() {
                simple_null(problem)
            } else if shortcut_applies(problem).is_ok() {
                monotone_shortcut(problem, cfg)
            } else if matches!(null, NullSet::Points(_)) {
                grid_tabulation(problem, None, cfg)
            } else {
                bounded_search(problem, None, cfg)
            }
        }
        StrategySelector::SimpleNull => simple_null(problem),
        StrategySelector::MonotoneShortcut => monotone_shortcut(problem, cfg),
        StrategySelector::BoundedSearch { bracket } => bounded_search(problem, *bracket, cfg),
        StrategySelector::GridTabulation { points } => grid_tabulation(problem, points.as_deref(), cfg),
    }?;
    if !(result.mu_star > 0.0 && result.mu_star.is_finite()) {
        return Err(Error::InvalidModel(format!(
            "maximal expected Bayes factor {} is not in (0, inf)",
            result.mu_star
        )));
    }
    debug_assert!(problem.null_set().contains(result.theta_star) || result.strategy == Strategy::SimpleNull);
    Ok(result)
}

fn simple_null(problem: &ModelProblem) -> Result<MuStarResult> {
    let theta0 = problem.null_set().singleton().ok_or_else(|| Error::InvalidStrategy {
        strategy: "simple_null",
        reason: "the null set is not a singleton".into(),
    })?;
    Ok(MuStarResult {
        mu_star: 1.0,
        theta_star: theta0,
        strategy: Strategy::SimpleNull,
        diagnostics: Vec::new(),
        boundary_distance: None,
    })
}

fn shortcut_applies(problem: &ModelProblem) -> Result<()> {
    if !problem.likelihood().monotone_declared() {
        return Err(Error::InvalidStrategy {
            strategy: "monotone_shortcut",
            reason: format!("family `{}` is not declared monotone", problem.likelihood().name()),
        });
    }
    match problem.null_set() {
        NullSet::HalfLine { upper } if *upper == 0.0 => Ok(()),
        other => Err(Error::InvalidStrategy {
            strategy: "monotone_shortcut",
            reason: format!("needs the null (-inf, 0], got {other:?}"),
        }),
    }
}

fn monotone_shortcut(problem: &ModelProblem, cfg: &MuStarConfig) -> Result<MuStarResult> {
    shortcut_applies(problem)?;
    let estimate = expected_bf_quadrature(problem, 0.0, &cfg.outer)?;
    Ok(MuStarResult {
        mu_star: estimate.mean,
        theta_star: 0.0,
        strategy: Strategy::MonotoneShortcut,
        diagnostics: vec![estimate],
        boundary_distance: None,
    })
}

fn bounded_search(problem: &ModelProblem, bracket: Option<(f64, f64)>, cfg: &MuStarConfig) -> Result<MuStarResult> {
    let (lo, hi) = match bracket {
        Some((lo, hi)) => {
            if !(problem.null_set().contains(lo) && problem.null_set().contains(hi)) {
                return Err(Error::InvalidStrategy {
                    strategy: "bounded_search",
                    reason: format!("bracket [{lo}, {hi}] leaves the null set"),
                });
            }
            (lo, hi)
        }
        None => default_bracket(problem, cfg.tail_quantile)?,
    };
    let trace = RefCell::new(Vec::new());
    let opt = maximize_bounded(
        |theta| {
            let estimate = expected_bf_quadrature(problem, theta, &cfg.outer)?;
            trace.borrow_mut().push(estimate);
            Ok(estimate.mean)
        },
        lo,
        hi,
        cfg.x_tol,
    )?;
    Ok(MuStarResult {
        mu_star: opt.max_value,
        theta_star: opt.argmax,
        strategy: Strategy::BoundedSearch,
        diagnostics: trace.into_inner(),
        boundary_distance: Some((opt.argmax - lo).min(hi - opt.argmax)),
    })
}

/// Search bracket for a continuous null when none is given.
pub fn default_bracket(problem: &ModelProblem, tail_quantile: f64) -> Result<(f64, f64)> {
    match problem.null_set() {
        NullSet::Interval { lo, hi } => Ok((*lo, *hi)),
        NullSet::HalfLine { upper } => Ok((null_lower_quantile(problem, *upper, tail_quantile)?, *upper)),
        NullSet::Points(_) => Err(Error::InvalidStrategy {
            strategy: "bounded_search",
            reason: "a finite null set needs grid tabulation".into(),
        }),
    }
}

// Solves ∫_{-∞}^q π / π0 = level by bisection.
fn null_lower_quantile(problem: &ModelProblem, upper: f64, level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter {
            name: "tail_quantile",
            value: level,
        });
    }
    let prior = problem.prior();
    let cfg = problem.inner_config();
    let mass_below = |q: f64| -> Result<f64> {
        Ok(integrate_interval(|t| Ok(prior.density(t)), f64::NEG_INFINITY, q, &[], cfg)? / prior.pi0())
    };
    let mut hi = upper;
    let mut step = 1.0;
    let mut lo = upper - step;
    while mass_below(lo)? > level {
        hi = lo;
        step *= 2.0;
        lo = upper - step;
        if step > 1e12 {
            return Err(Error::InvalidModel("prior tail does not decay".into()));
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mass_below(mid)? > level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn grid_tabulation(problem: &ModelProblem, points: Option<&[f64]>, cfg: &MuStarConfig) -> Result<MuStarResult> {
    let owned;
    let points = match (points, problem.null_set()) {
        (Some(points), _) => points,
        (None, NullSet::Points(atoms)) => {
            owned = atoms.iter().map(|a| a.theta).collect::<Vec<_>>();
            &owned
        }
        (None, _) => {
            return Err(Error::InvalidStrategy {
                strategy: "grid_tabulation",
                reason: "a continuous null set needs explicit grid points".into(),
            })
        }
    };
    if let Some(&theta) = points.iter().find(|&&t| !problem.null_set().contains(t)) {
        return Err(Error::NotInNull { theta });
    }
    let rows = evaluate_grid(
        &|theta| expected_bf_quadrature(problem, theta, &cfg.outer).map(|e| e.mean),
        points,
    )?;
    let (theta_star, mu_star) = rows
        .iter()
        .copied()
        .fold(rows[0], |best, row| if row.1 > best.1 { row } else { best });
    let diagnostics = rows
        .into_iter()
        .map(|(theta, mean)| ExpectationEstimate {
            theta,
            mean,
            std_error: 0.0,
            method: Method::Quadrature,
            n_reps: 0,
        })
        .collect();
    Ok(MuStarResult {
        mu_star,
        theta_star,
        strategy: Strategy::GridTabulation,
        diagnostics,
        boundary_distance: None,
    })
}
