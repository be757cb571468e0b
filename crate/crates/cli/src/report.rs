//! Report documents written by the subcommands.
//!
//! CSV: header row, comma separator, `.` decimals, one record per line.
//! JSON: one object per report. Numbers carry 12 significant digits in both.

use bfcal::evariable::{EProcessSummary, ValidationReport};
use bfcal::mustar::{ExpectationEstimate, MuStarResult};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::number::{fmt3, fmt_sig, sig, sig_opt, sig_vec};

pub trait Report: Serialize {
    fn header(&self) -> Vec<&'static str>;
    fn records(&self) -> Vec<Vec<String>>;
    /// Human-readable line with values rounded to three decimals.
    fn summary(&self) -> String;

    fn to_csv(&self) -> String {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(self.header()).expect("in-memory csv");
        for record in self.records() {
            writer.write_record(record).expect("in-memory csv");
        }
        String::from_utf8(writer.into_inner().expect("in-memory csv")).expect("csv output is utf-8")
    }

    fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    #[serde(serialize_with = "sig")]
    pub theta: f64,
    #[serde(serialize_with = "sig")]
    pub mean: f64,
    #[serde(serialize_with = "sig")]
    pub std_error: f64,
    pub method: String,
    pub n_reps: usize,
}

impl From<&ExpectationEstimate> for EstimateRow {
    fn from(e: &ExpectationEstimate) -> Self {
        Self {
            theta: e.theta,
            mean: e.mean,
            std_error: e.std_error,
            method: e.method.as_str().to_string(),
            n_reps: e.n_reps,
        }
    }
}

impl EstimateRow {
    fn record(&self) -> Vec<String> {
        vec![
            fmt_sig(self.theta),
            fmt_sig(self.mean),
            fmt_sig(self.std_error),
            self.method.clone(),
            self.n_reps.to_string(),
        ]
    }
}

const ESTIMATE_HEADER: [&str; 5] = ["theta", "mean", "std_error", "method", "n_reps"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuStarReport {
    #[serde(serialize_with = "sig")]
    pub mu_star: f64,
    #[serde(serialize_with = "sig")]
    pub theta_star: f64,
    pub strategy: String,
    #[serde(serialize_with = "sig_opt")]
    pub boundary_distance: Option<f64>,
    pub diagnostics: Vec<EstimateRow>,
}

impl From<&MuStarResult> for MuStarReport {
    fn from(r: &MuStarResult) -> Self {
        Self {
            mu_star: r.mu_star,
            theta_star: r.theta_star,
            strategy: r.strategy.as_str().to_string(),
            boundary_distance: r.boundary_distance,
            diagnostics: r.diagnostics.iter().map(EstimateRow::from).collect(),
        }
    }
}

impl Report for MuStarReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["mu_star", "theta_star", "strategy", "boundary_distance", "evaluations"]
    }

    fn records(&self) -> Vec<Vec<String>> {
        vec![vec![
            fmt_sig(self.mu_star),
            fmt_sig(self.theta_star),
            self.strategy.clone(),
            self.boundary_distance.map(fmt_sig).unwrap_or_default(),
            self.diagnostics.len().to_string(),
        ]]
    }

    fn summary(&self) -> String {
        format!(
            "mu* = {} at theta* = {} ({})",
            fmt3(self.mu_star),
            fmt3(self.theta_star),
            self.strategy
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    pub rows: Vec<EstimateRow>,
}

impl Report for TableReport {
    fn header(&self) -> Vec<&'static str> {
        ESTIMATE_HEADER.to_vec()
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows.iter().map(EstimateRow::record).collect()
    }

    fn summary(&self) -> String {
        self.rows
            .iter()
            .map(|r| format!("E[BF | theta = {}] = {} ({})", fmt3(r.theta), fmt3(r.mean), r.method))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Reads a table CSV back into rows.
pub fn parse_table_csv(text: &str) -> Result<Vec<EstimateRow>, CliError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| CliError::Io(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ESTIMATE_HEADER {
        return Err(CliError::Io(format!("unexpected table header {headers:?}")));
    }
    reader
        .deserialize()
        .map(|row| row.map_err(|e| CliError::Io(e.to_string())))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRowOut {
    #[serde(serialize_with = "sig")]
    pub theta: f64,
    #[serde(serialize_with = "sig")]
    pub mean: f64,
    #[serde(serialize_with = "sig")]
    pub std_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidateReport {
    pub kind: String,
    #[serde(serialize_with = "sig")]
    pub mu_star: f64,
    pub n_reps: usize,
    pub seed: u64,
    pub overall_pass: bool,
    pub rows: Vec<ValidationRowOut>,
}

impl ValidateReport {
    pub fn new(kind: &str, mu_star: f64, report: &ValidationReport) -> Self {
        Self {
            kind: kind.to_string(),
            mu_star,
            n_reps: report.n_reps,
            seed: report.seed,
            overall_pass: report.overall_pass,
            rows: report
                .rows
                .iter()
                .map(|r| ValidationRowOut {
                    theta: r.theta,
                    mean: r.mean,
                    std_error: r.std_error,
                    pass: r.pass,
                })
                .collect(),
        }
    }
}

impl Report for ValidateReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["theta", "mean", "std_error", "pass"]
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    fmt_sig(r.theta),
                    fmt_sig(r.mean),
                    fmt_sig(r.std_error),
                    r.pass.to_string(),
                ]
            })
            .collect()
    }

    fn summary(&self) -> String {
        let failing: Vec<String> = self.rows.iter().filter(|r| !r.pass).map(|r| fmt3(r.theta)).collect();
        if failing.is_empty() {
            format!(
                "{} e-variable (mu* = {}): all {} rows pass",
                self.kind,
                fmt3(self.mu_star),
                self.rows.len()
            )
        } else {
            format!(
                "{} e-variable (mu* = {}): FAIL at theta = {}",
                self.kind,
                fmt3(self.mu_star),
                failing.join(", ")
            )
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    #[serde(serialize_with = "sig")]
    pub s: f64,
    #[serde(serialize_with = "sig")]
    pub bf: f64,
    #[serde(serialize_with = "sig_opt")]
    pub reduced_bf: Option<f64>,
    #[serde(serialize_with = "sig")]
    pub e_value: f64,
    #[serde(serialize_with = "sig")]
    pub mu_star: f64,
    pub kind: String,
}

impl Report for EvalReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["s", "bf", "reduced_bf", "e_value", "mu_star", "kind"]
    }

    fn records(&self) -> Vec<Vec<String>> {
        vec![vec![
            fmt_sig(self.s),
            fmt_sig(self.bf),
            self.reduced_bf.map(fmt_sig).unwrap_or_default(),
            fmt_sig(self.e_value),
            fmt_sig(self.mu_star),
            self.kind.clone(),
        ]]
    }

    fn summary(&self) -> String {
        format!(
            "s = {}: BF = {}, e-value = {} (mu* = {})",
            fmt_sig(self.s),
            fmt3(self.bf),
            fmt3(self.e_value),
            fmt3(self.mu_star)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EProcessReport {
    #[serde(serialize_with = "sig")]
    pub theta_true: f64,
    #[serde(serialize_with = "sig")]
    pub alpha: f64,
    #[serde(serialize_with = "sig")]
    pub mu_star: f64,
    pub n_steps: usize,
    pub n_trajectories: usize,
    pub n_rejected: usize,
    #[serde(serialize_with = "sig")]
    pub rejection_frequency: f64,
    /// `alpha + 3` binomial standard errors.
    #[serde(serialize_with = "sig")]
    pub ville_bound: f64,
    #[serde(serialize_with = "sig_vec")]
    pub final_product_quantiles: Vec<f64>,
    #[serde(serialize_with = "sig_vec")]
    pub rejection_curve: Vec<f64>,
}

impl EProcessReport {
    pub fn new(mu_star: f64, s: &EProcessSummary) -> Self {
        Self {
            theta_true: s.theta_true,
            alpha: s.alpha,
            mu_star,
            n_steps: s.n_steps,
            n_trajectories: s.n_trajectories,
            n_rejected: s.n_rejected,
            rejection_frequency: s.rejection_frequency,
            ville_bound: s.alpha + 3.0 * s.binomial_std_error,
            final_product_quantiles: s.final_product_quantiles.to_vec(),
            rejection_curve: s.rejection_curve.clone(),
        }
    }
}

impl Report for EProcessReport {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "theta_true",
            "alpha",
            "mu_star",
            "n_steps",
            "n_trajectories",
            "n_rejected",
            "rejection_frequency",
            "ville_bound",
            "product_q05",
            "product_q50",
            "product_q95",
        ]
    }

    fn records(&self) -> Vec<Vec<String>> {
        let q = &self.final_product_quantiles;
        vec![vec![
            fmt_sig(self.theta_true),
            fmt_sig(self.alpha),
            fmt_sig(self.mu_star),
            self.n_steps.to_string(),
            self.n_trajectories.to_string(),
            self.n_rejected.to_string(),
            fmt_sig(self.rejection_frequency),
            fmt_sig(self.ville_bound),
            fmt_sig(q[0]),
            fmt_sig(q[1]),
            fmt_sig(q[2]),
        ]]
    }

    fn summary(&self) -> String {
        format!(
            "theta = {}: rejected {} of {} trajectories ({}), Ville bound {}",
            fmt3(self.theta_true),
            self.n_rejected,
            self.n_trajectories,
            fmt3(self.rejection_frequency),
            fmt3(self.ville_bound)
        )
    }
}
