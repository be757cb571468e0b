//! Run configuration.
//!
//! The document is TOML written with dotted keys, one setting per line:
//!
//! ```text
//! model.family = "beta_pvalue_t_prior"
//! model.prior_df = 5.0
//! method.strategy = "monotone_shortcut"
//! mc.n_reps = 500000
//! mc.seed = 1
//! ```
//!
//! Every key is optional; unknown keys are rejected.

use std::fmt::Write as _;

use bfcal::evariable::EVariableKind;
use bfcal::model::ModelProblem;
use bfcal::mustar::{MuStarConfig, StrategySelector};
use bfcal::quadrature::QuadConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Default parameter grid for `table`.
pub const TABLE_THETAS: [f64; 6] = [-2.5, -2.0, -1.5, -1.0, -0.5, -0.25];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub method: MethodConfig,
    pub quad: QuadSection,
    pub mc: McConfig,
    pub output: OutputConfig,
    pub evariable: EVariableConfig,
    pub validate: ValidateConfig,
    pub table: TableConfig,
    pub eprocess: EProcessConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Beta p-value likelihood, Student-t prior, `Θ0 = (-∞, null_upper]`.
    #[default]
    BetaPvalueTPrior,
    /// Same likelihood and continuous prior, `Θ0 = {null_point}`.
    PointNull,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub family: Family,
    pub prior_df: f64,
    pub null_upper: f64,
    pub null_point: f64,
    pub null_weight: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            family: Family::BetaPvalueTPrior,
            prior_df: 5.0,
            null_upper: 0.0,
            null_point: 0.0,
            null_weight: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StrategyName {
    #[default]
    Auto,
    SimpleNull,
    MonotoneShortcut,
    BoundedSearch,
    GridTabulation,
}

impl std::str::FromStr for StrategyName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "auto" => Self::Auto,
            "simple_null" => Self::SimpleNull,
            "monotone_shortcut" => Self::MonotoneShortcut,
            "bounded_search" => Self::BoundedSearch,
            "grid_tabulation" => Self::GridTabulation,
            other => return Err(format!("unknown strategy `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MethodConfig {
    pub strategy: StrategyName,
    pub bracket_lo: Option<f64>,
    pub bracket_hi: Option<f64>,
    pub grid: Option<Vec<f64>>,
    pub x_tol: f64,
    pub tail_quantile: f64,
}

impl Default for MethodConfig {
    fn default() -> Self {
        Self {
            strategy: StrategyName::Auto,
            bracket_lo: None,
            bracket_hi: None,
            grid: None,
            x_tol: bfcal::optimize::DEFAULT_X_TOL,
            tail_quantile: 1e-4,
        }
    }
}

/// Tolerances of the outer integral over the statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadSection {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadSection {
    fn default() -> Self {
        let cfg = bfcal::mustar::outer_quad_config();
        Self {
            rel_tol: cfg.rel_tol,
            abs_tol: cfg.abs_tol,
            max_panels: cfg.max_panels,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McConfig {
    pub n_reps: usize,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_reps: bfcal::mustar::DEFAULT_N_REPS,
            seed: 20_240_601,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub format: Format,
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EVariableConfig {
    pub kind: EVariableKind,
    /// Overrides the computed calibration constant.
    pub mu_star: Option<f64>,
}

impl Default for EVariableConfig {
    fn default() -> Self {
        Self {
            kind: EVariableKind::Rescaled,
            mu_star: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateConfig {
    pub theta_grid: Vec<f64>,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        let mut theta_grid = TABLE_THETAS.to_vec();
        theta_grid.push(0.0);
        Self { theta_grid }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TableMethod {
    Quadrature,
    #[default]
    MonteCarlo,
    Both,
}

impl std::str::FromStr for TableMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quadrature" => Ok(Self::Quadrature),
            "monte_carlo" => Ok(Self::MonteCarlo),
            "both" => Ok(Self::Both),
            other => Err(format!("unknown table method `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TableConfig {
    pub thetas: Vec<f64>,
    pub method: TableMethod,
}

impl Default for TableConfig {
    fn default() -> Self {
        Self {
            thetas: TABLE_THETAS.to_vec(),
            method: TableMethod::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EProcessConfig {
    pub n_steps: usize,
    pub n_trajectories: usize,
    pub theta_true: f64,
    pub alpha: f64,
}

impl Default for EProcessConfig {
    fn default() -> Self {
        Self {
            n_steps: 50,
            n_trajectories: 10_000,
            theta_true: 0.0,
            alpha: 0.05,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Flat `section.key = value` document; parses back to the same config.
    pub fn to_document(&self) -> String {
        let value = toml::Table::try_from(self).expect("config serializes to a table");
        let mut out = String::new();
        for (section, body) in &value {
            let Some(body) = body.as_table() else { continue };
            for (key, v) in body {
                writeln!(out, "{section}.{key} = {v}").expect("writing to a String");
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |what: &str| Err(CliError::Config(what.to_string()));
        let m = &self.model;
        if !(m.prior_df > 0.0 && m.prior_df.is_finite()) {
            return bad("model.prior_df must be positive");
        }
        if !m.null_upper.is_finite() || !m.null_point.is_finite() {
            return bad("model.null_upper and model.null_point must be finite");
        }
        if !(m.null_weight > 0.0 && m.null_weight < 1.0) {
            return bad("model.null_weight must lie in (0, 1)");
        }
        if self.method.bracket_lo.is_some() != self.method.bracket_hi.is_some() {
            return bad("method.bracket_lo and method.bracket_hi go together");
        }
        if let (Some(lo), Some(hi)) = (self.method.bracket_lo, self.method.bracket_hi) {
            if !(lo < hi) {
                return bad("method.bracket_lo must be below method.bracket_hi");
            }
        }
        if !(self.method.x_tol > 0.0) {
            return bad("method.x_tol must be positive");
        }
        if !(self.method.tail_quantile > 0.0 && self.method.tail_quantile < 1.0) {
            return bad("method.tail_quantile must lie in (0, 1)");
        }
        self.quad_config()?;
        if self.mc.n_reps < 2 {
            return bad("mc.n_reps must be at least 2");
        }
        if let Some(mu) = self.evariable.mu_star {
            if !(mu > 0.0 && mu.is_finite()) {
                return bad("evariable.mu_star must be positive");
            }
        }
        let e = &self.eprocess;
        if !(e.alpha > 0.0 && e.alpha < 1.0) {
            return bad("eprocess.alpha must lie in (0, 1)");
        }
        if e.n_steps == 0 || e.n_trajectories == 0 {
            return bad("eprocess.n_steps and eprocess.n_trajectories must be positive");
        }
        if self
            .validate
            .theta_grid
            .iter()
            .chain(&self.table.thetas)
            .any(|t| !t.is_finite())
        {
            return bad("theta values must be finite");
        }
        Ok(())
    }

    pub fn quad_config(&self) -> Result<QuadConfig, CliError> {
        QuadConfig::new(self.quad.rel_tol, self.quad.abs_tol, self.quad.max_panels)
            .map_err(|e| CliError::Config(format!("quad: {e}")))
    }

    pub fn mustar_config(&self) -> Result<MuStarConfig, CliError> {
        Ok(MuStarConfig {
            outer: self.quad_config()?,
            x_tol: self.method.x_tol,
            tail_quantile: self.method.tail_quantile,
        })
    }

    pub fn strategy(&self) -> StrategySelector {
        let m = &self.method;
        match m.strategy {
            StrategyName::Auto => StrategySelector::Auto,
            StrategyName::SimpleNull => StrategySelector::SimpleNull,
            StrategyName::MonotoneShortcut => StrategySelector::MonotoneShortcut,
            StrategyName::BoundedSearch => StrategySelector::BoundedSearch {
                bracket: m.bracket_lo.zip(m.bracket_hi),
            },
            StrategyName::GridTabulation => StrategySelector::GridTabulation { points: m.grid.clone() },
        }
    }

    pub fn build_model(&self) -> Result<ModelProblem, CliError> {
        let m = &self.model;
        let built = match m.family {
            Family::BetaPvalueTPrior if m.null_upper == 0.0 => ModelProblem::case_study(m.prior_df),
            Family::BetaPvalueTPrior => {
                use bfcal::distributions::{StudentT, StudentTParams};
                use bfcal::model::{inner_quad_config, BetaPValueFamily, NullSet, Prior};
                StudentTParams::new(m.prior_df).and_then(|p| {
                    let prior = Prior::new(
                        std::sync::Arc::new(StudentT::new(p)),
                        NullSet::HalfLine { upper: m.null_upper },
                        &inner_quad_config(),
                    )?;
                    Ok(ModelProblem::new(std::sync::Arc::new(BetaPValueFamily), prior))
                })
            }
            Family::PointNull => ModelProblem::point_null(m.prior_df, m.null_point, m.null_weight),
        };
        built.map_err(|e| CliError::Config(format!("model: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_case_study() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.model.family, Family::BetaPvalueTPrior);
        assert_eq!(c.mc.n_reps, 500_000);
        assert_eq!(c.validate.theta_grid.len(), 7);
    }

    #[test]
    fn dotted_keys() {
        let c = RunConfig::parse(
            "model.family = \"point_null\"\nmodel.null_point = -1.0\nmethod.strategy = \"bounded_search\"\n\
             method.bracket_lo = -10.0\nmethod.bracket_hi = 0.0\nmc.seed = 9\n# comment\noutput.format = \"json\"\n",
        )
        .unwrap();
        assert_eq!(c.model.family, Family::PointNull);
        assert_eq!(c.model.null_point, -1.0);
        assert_eq!(
            c.strategy(),
            StrategySelector::BoundedSearch {
                bracket: Some((-10.0, 0.0))
            }
        );
        assert_eq!(c.mc.seed, 9);
        assert_eq!(c.output.format, Format::Json);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            RunConfig::parse("model.famly = \"x\""),
            Err(CliError::Config(_))
        ));
        assert!(matches!(RunConfig::parse("nosuch.key = 1"), Err(CliError::Config(_))));
        assert!(matches!(
            RunConfig::parse("model.family = \"gauss\""),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn invalid_values_rejected() {
        for doc in [
            "eprocess.alpha = 1.5",
            "eprocess.alpha = 0.0",
            "model.prior_df = -1.0",
            "mc.n_reps = 1",
            "quad.rel_tol = 0.0",
            "method.bracket_lo = -1.0",
            "method.bracket_lo = 1.0\nmethod.bracket_hi = 0.0",
            "model.null_weight = 1.0",
            "evariable.mu_star = -2.0",
        ] {
            assert!(matches!(RunConfig::parse(doc), Err(CliError::Config(_))), "{doc}");
        }
    }

    #[test]
    fn document_round_trip() {
        let mut c = RunConfig::default();
        c.model.family = Family::PointNull;
        c.method.grid = Some(vec![-1.0, 0.0]);
        c.method.bracket_lo = Some(-3.0);
        c.method.bracket_hi = Some(-0.5);
        c.evariable.mu_star = Some(1.25);
        c.table.thetas = vec![-0.5, 0.0];
        c.output.path = Some("out.csv".into());
        let doc = c.to_document();
        assert!(doc.lines().all(|l| l.contains('.') && l.contains(" = ")));
        assert_eq!(RunConfig::parse(&doc).unwrap(), c);
    }
}
