//! E-variables built from Bayes factors, their simulation check, and the
//! running-product e-process.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelProblem;
use crate::montecarlo::{derive_seed, mc_mean, stream_rng, uniform_open, McSummary};
use crate::mustar::{draw_statistic, expectation_by_quadrature};
use crate::quadrature::QuadConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EVariableKind {
    /// `BF / μ*`.
    Rescaled,
    /// `m_1(s) / g_0(s)`, for monotone families with `Θ0 = (-∞, 0]`.
    Reduced,
}

impl EVariableKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EVariableKind::Rescaled => "rescaled",
            EVariableKind::Reduced => "reduced",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EVariable<'a> {
    problem: &'a ModelProblem,
    mu_star: f64,
    kind: EVariableKind,
}

impl<'a> EVariable<'a> {
    pub fn new(problem: &'a ModelProblem, mu_star: f64, kind: EVariableKind) -> Result<Self> {
        if !(mu_star > 0.0 && mu_star.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "mu_star",
                value: mu_star,
            });
        }
        if kind == EVariableKind::Reduced && !problem.likelihood().monotone_declared() {
            return Err(Error::MonotonicityNotDeclared {
                family: problem.likelihood().name().to_string(),
            });
        }
        Ok(Self { problem, mu_star, kind })
    }

    pub fn problem(&self) -> &ModelProblem {
        self.problem
    }

    pub fn mu_star(&self) -> f64 {
        self.mu_star
    }

    pub fn kind(&self) -> EVariableKind {
        self.kind
    }

    /// The e-value at the observed statistic.
    pub fn evaluate(&self, s: f64) -> Result<f64> {
        match self.kind {
            EVariableKind::Rescaled => Ok(self.problem.bayes_factor(s)? / self.mu_star),
            EVariableKind::Reduced => self.problem.reduced_bayes_factor(s),
        }
    }

    /// `E_θ[E]` by quadrature.
    pub fn expected_value_quadrature(&self, theta: f64, cfg: &QuadConfig) -> Result<f64> {
        expectation_by_quadrature(self.problem, theta, |s| self.evaluate(s), cfg)
    }

    /// `E_θ[E]` by Monte Carlo.
    pub fn expected_value_monte_carlo(&self, theta: f64, n_reps: usize, seed: u64) -> Result<McSummary> {
        let e = |s: f64| self.evaluate(s);
        mc_mean(n_reps, seed, |rng| {
            draw_statistic(self.problem, theta, &e, uniform_open(rng))
        })
    }

    /// Checks `E_θ[E] ≤ 1` by simulation at every grid point. A row passes
    /// when its mean is at most `1 + 3·std_error`.
    pub fn validate(&self, theta_grid: &[f64], n_reps: usize, seed: u64) -> Result<ValidationReport> {
        if theta_grid.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if let Some(&theta) = theta_grid.iter().find(|&&t| !self.problem.null_set().contains(t)) {
            return Err(Error::NotInNull { theta });
        }
        let mut rows = Vec::with_capacity(theta_grid.len());
        for (i, &theta) in theta_grid.iter().enumerate() {
            let summary = self.expected_value_monte_carlo(theta, n_reps, derive_seed(seed, i as u64))?;
            rows.push(ValidationRow {
                theta,
                mean: summary.mean,
                std_error: summary.std_error,
                pass: summary.mean <= 1.0 + 3.0 * summary.std_error,
            });
        }
        Ok(ValidationReport {
            overall_pass: rows.iter().all(|r| r.pass),
            rows,
            n_reps,
            seed,
        })
    }

    /// Monte Carlo mean of the product of `k` independent copies under
    /// `theta`; at most one (up to noise) for an e-variable.
    pub fn product_mean(&self, theta: f64, k: usize, n_reps: usize, seed: u64) -> Result<McSummary> {
        let e = |s: f64| self.evaluate(s);
        mc_mean(n_reps, seed, |rng| {
            let mut product = 1.0;
            for _ in 0..k {
                product *= draw_statistic(self.problem, theta, &e, uniform_open(rng))?;
            }
            Ok(product)
        })
    }

    /// Runs `n_trajectories` independent e-processes of `n_steps` i.i.d.
    /// observations drawn under `theta_true`.
    pub fn simulate_eprocess(
        &self,
        theta_true: f64,
        n_steps: usize,
        n_trajectories: usize,
        alpha: f64,
        seed: u64,
    ) -> Result<EProcessSummary> {
        let paths = self.eprocess_paths(theta_true, n_steps, n_trajectories, alpha, seed)?;
        Ok(EProcessSummary::from_paths(theta_true, alpha, n_steps, &paths))
    }

    /// Running products of each trajectory, one entry per step.
    pub fn eprocess_paths(
        &self,
        theta_true: f64,
        n_steps: usize,
        n_trajectories: usize,
        alpha: f64,
        seed: u64,
    ) -> Result<Vec<Trajectory>> {
        EProcessState::new(alpha)?;
        if n_steps == 0 || n_trajectories == 0 {
            return Err(Error::InvalidParameter {
                name: if n_steps == 0 { "n_steps" } else { "n_trajectories" },
                value: 0.0,
            });
        }
        let e = |s: f64| self.evaluate(s);
        let results: Vec<Result<Trajectory>> = (0..n_trajectories)
            .into_par_iter()
            .map(|k| {
                let mut rng = stream_rng(seed, k as u64);
                let mut state = EProcessState::new(alpha)?;
                let mut products = Vec::with_capacity(n_steps);
                let mut rejected_at = None;
                for step in 1..=n_steps {
                    let value = draw_statistic(self.problem, theta_true, &e, uniform_open(&mut rng))?;
                    state = state.update(value)?;
                    if state.rejected && rejected_at.is_none() {
                        rejected_at = Some(step);
                    }
                    products.push(state.running_product);
                }
                Ok(Trajectory { products, rejected_at })
            })
            .collect();
        results.into_iter().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub theta: f64,
    pub mean: f64,
    pub std_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
    pub overall_pass: bool,
    pub n_reps: usize,
    pub seed: u64,
}

impl ValidationReport {
    pub fn failing(&self) -> impl Iterator<Item = &ValidationRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

/// Running product of e-values with the Ville threshold `1/α`.
///
/// Rejection latches: once the product reached `1/α` it stays rejected even
/// if later factors pull the product back down. A zero factor zeroes the
/// product for good and sets `hit_zero`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EProcessState {
    pub running_product: f64,
    pub steps: usize,
    pub alpha: f64,
    pub rejected: bool,
    pub hit_zero: bool,
}

impl EProcessState {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
            });
        }
        Ok(Self {
            running_product: 1.0,
            steps: 0,
            alpha,
            rejected: false,
            hit_zero: false,
        })
    }

    pub fn threshold(&self) -> f64 {
        1.0 / self.alpha
    }

    /// Multiplies in one e-value. `+∞` rejects at once; negative or NaN
    /// inputs are not e-values and are refused.
    pub fn update(self, e_value: f64) -> Result<Self> {
        if !(e_value >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "e_value",
                value: e_value,
            });
        }
        let running_product = if self.running_product == 0.0 {
            0.0
        } else {
            self.running_product * e_value
        };
        Ok(Self {
            running_product,
            steps: self.steps + 1,
            alpha: self.alpha,
            rejected: self.rejected || running_product >= self.threshold(),
            hit_zero: self.hit_zero || e_value == 0.0,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub products: Vec<f64>,
    /// First step (1-based) at which the threshold was reached.
    pub rejected_at: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EProcessSummary {
    pub theta_true: f64,
    pub alpha: f64,
    pub n_steps: usize,
    pub n_trajectories: usize,
    pub n_rejected: usize,
    pub rejection_frequency: f64,
    /// Binomial standard error of `rejection_frequency` at level `alpha`.
    pub binomial_std_error: f64,
    /// 5%, 50% and 95% quantiles of the final running product.
    pub final_product_quantiles: [f64; 3],
    /// Fraction of trajectories rejected at or before each step.
    pub rejection_curve: Vec<f64>,
}

impl EProcessSummary {
    pub fn from_paths(theta_true: f64, alpha: f64, n_steps: usize, paths: &[Trajectory]) -> Self {
        let n = paths.len();
        let mut curve = vec![0usize; n_steps];
        for step in paths.iter().filter_map(|p| p.rejected_at) {
            for c in &mut curve[step - 1..] {
                *c += 1;
            }
        }
        let n_rejected = curve.last().copied().unwrap_or(0);
        let mut finals: Vec<f64> = paths.iter().map(|p| *p.products.last().unwrap_or(&1.0)).collect();
        finals.sort_by(f64::total_cmp);
        let quantile = |q: f64| finals[((q * (n - 1) as f64).round() as usize).min(n - 1)];
        Self {
            theta_true,
            alpha,
            n_steps,
            n_trajectories: n,
            n_rejected,
            rejection_frequency: n_rejected as f64 / n as f64,
            binomial_std_error: (alpha * (1.0 - alpha) / n as f64).sqrt(),
            final_product_quantiles: [quantile(0.05), quantile(0.5), quantile(0.95)],
            rejection_curve: curve.into_iter().map(|c| c as f64 / n as f64).collect(),
        }
    }
}
