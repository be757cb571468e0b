//! Subcommand implementations. Each returns the rendered document plus the
//! exit status; writing files is left to [`crate::run`].

use std::path::PathBuf;

use bfcal::evariable::{EVariable, EVariableKind};
use bfcal::montecarlo::derive_seed;
use bfcal::mustar::{compute_mu_star, expected_bf_monte_carlo, expected_bf_quadrature};
use clap::{Args, Parser, Subcommand};

use crate::config::{Format, RunConfig, StrategyName, TableMethod};
use crate::error::{CliError, EXIT_OK, EXIT_VALIDATION_FAILED};
use crate::report::{EProcessReport, EstimateRow, EvalReport, MuStarReport, Report, TableReport, ValidateReport};

#[derive(Debug, Parser)]
#[command(name = "bfcal", version, about = "Calibrate Bayes factors into e-variables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Default)]
pub struct CommonArgs {
    /// Run configuration (dotted-key TOML)
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Write the report here instead of stdout
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "csv|json")]
    pub format: Option<Format>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo repetitions
    #[arg(long)]
    pub reps: Option<usize>,
    /// Force the calibration constant instead of computing it
    #[arg(long = "mu-star", value_name = "X")]
    pub mu_star: Option<f64>,
    #[arg(long, value_name = "NAME")]
    pub strategy: Option<StrategyName>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute mu* = max over the null of E[BF]
    Mustar {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Tabulate E_theta[BF] on a list of parameters
    Table {
        #[command(flatten)]
        common: CommonArgs,
        /// Parameter value (repeatable)
        #[arg(long = "theta", allow_negative_numbers = true)]
        thetas: Vec<f64>,
        #[arg(long, value_name = "quadrature|monte_carlo|both")]
        method: Option<TableMethod>,
    },
    /// Check E_theta[E] <= 1 by simulation on a null grid
    Validate {
        #[command(flatten)]
        common: CommonArgs,
        /// Null grid point (repeatable); replaces validate.theta_grid
        #[arg(long = "theta", allow_negative_numbers = true)]
        thetas: Vec<f64>,
    },
    /// Bayes factor, reduced Bayes factor and e-value at one observation
    Eval {
        #[command(flatten)]
        common: CommonArgs,
        /// Observed statistic
        #[arg(long, allow_negative_numbers = true)]
        s: f64,
    },
    /// Simulate running products of the e-variable
    Eprocess {
        #[command(flatten)]
        common: CommonArgs,
        /// Data-generating parameter
        #[arg(long, allow_negative_numbers = true)]
        theta: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        trajectories: Option<usize>,
    },
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Mustar { common }
            | Command::Table { common, .. }
            | Command::Validate { common, .. }
            | Command::Eval { common, .. }
            | Command::Eprocess { common, .. } => common,
        }
    }
}

/// Rendered report and the exit status it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub document: String,
    pub summary: String,
    pub exit_code: i32,
}

fn render<R: Report>(report: &R, format: Format, exit_code: i32) -> Outcome {
    let document = match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    Outcome {
        document,
        summary: report.summary(),
        exit_code,
    }
}

/// Loads the config file (if any) and applies command-line overrides.
pub fn resolve_config(command: &Command) -> Result<RunConfig, CliError> {
    let common = command.common();
    let mut config = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(format) = common.format {
        config.output.format = format;
    }
    if let Some(out) = &common.out {
        config.output.path = Some(out.display().to_string());
    }
    if let Some(seed) = common.seed {
        config.mc.seed = seed;
    }
    if let Some(reps) = common.reps {
        config.mc.n_reps = reps;
    }
    if let Some(mu) = common.mu_star {
        config.evariable.mu_star = Some(mu);
    }
    if let Some(strategy) = common.strategy {
        config.method.strategy = strategy;
    }
    match command {
        Command::Table { thetas, method, .. } => {
            if !thetas.is_empty() {
                config.table.thetas = thetas.clone();
            }
            if let Some(method) = method {
                config.table.method = *method;
            }
        }
        Command::Validate { thetas, .. } if !thetas.is_empty() => {
            config.validate.theta_grid = thetas.clone();
        }
        Command::Eprocess {
            theta,
            alpha,
            steps,
            trajectories,
            ..
        } => {
            let e = &mut config.eprocess;
            e.theta_true = theta.unwrap_or(e.theta_true);
            e.alpha = alpha.unwrap_or(e.alpha);
            e.n_steps = steps.unwrap_or(e.n_steps);
            e.n_trajectories = trajectories.unwrap_or(e.n_trajectories);
        }
        _ => {}
    }
    config.validate()?;
    Ok(config)
}

pub fn execute(command: &Command, config: &RunConfig) -> Result<Outcome, CliError> {
    match command {
        Command::Mustar { .. } => cmd_mustar(config),
        Command::Table { .. } => cmd_table(config),
        Command::Validate { .. } => cmd_validate(config),
        Command::Eval { s, .. } => cmd_eval(config, *s),
        Command::Eprocess { .. } => cmd_eprocess(config),
    }
}

pub fn cmd_mustar(config: &RunConfig) -> Result<Outcome, CliError> {
    let model = config.build_model()?;
    let result = compute_mu_star(&model, &config.strategy(), &config.mustar_config()?)?;
    Ok(render(&MuStarReport::from(&result), config.output.format, EXIT_OK))
}

pub fn cmd_table(config: &RunConfig) -> Result<Outcome, CliError> {
    let thetas = &config.table.thetas;
    if thetas.is_empty() {
        return Err(CliError::Usage("table needs at least one --theta".into()));
    }
    let model = config.build_model()?;
    let outer = config.quad_config()?;
    let mut rows = Vec::new();
    for (i, &theta) in thetas.iter().enumerate() {
        if matches!(config.table.method, TableMethod::Quadrature | TableMethod::Both) {
            rows.push(EstimateRow::from(&expected_bf_quadrature(&model, theta, &outer)?));
        }
        if matches!(config.table.method, TableMethod::MonteCarlo | TableMethod::Both) {
            let seed = derive_seed(config.mc.seed, i as u64);
            rows.push(EstimateRow::from(&expected_bf_monte_carlo(
                &model,
                theta,
                config.mc.n_reps,
                seed,
            )?));
        }
    }
    Ok(render(&TableReport { rows }, config.output.format, EXIT_OK))
}

fn mu_star_for(config: &RunConfig, model: &bfcal::model::ModelProblem) -> Result<f64, CliError> {
    match config.evariable.mu_star {
        Some(mu) => Ok(mu),
        None => Ok(compute_mu_star(model, &config.strategy(), &config.mustar_config()?)?.mu_star),
    }
}

pub fn cmd_validate(config: &RunConfig) -> Result<Outcome, CliError> {
    if config.validate.theta_grid.is_empty() {
        return Err(CliError::Usage("validate needs a non-empty theta grid".into()));
    }
    let model = config.build_model()?;
    let kind = config.evariable.kind;
    let mu_star = match kind {
        EVariableKind::Rescaled => mu_star_for(config, &model)?,
        EVariableKind::Reduced => 1.0,
    };
    let evar = EVariable::new(&model, mu_star, kind)?;
    let report = evar.validate(&config.validate.theta_grid, config.mc.n_reps, config.mc.seed)?;
    let exit = if report.overall_pass {
        EXIT_OK
    } else {
        EXIT_VALIDATION_FAILED
    };
    Ok(render(
        &ValidateReport::new(kind.as_str(), mu_star, &report),
        config.output.format,
        exit,
    ))
}

pub fn cmd_eval(config: &RunConfig, s: f64) -> Result<Outcome, CliError> {
    let model = config.build_model()?;
    model.check_support(s)?;
    let bf = model.bayes_factor(s)?;
    let reduced_bf = if model.likelihood().monotone_declared() && model.boundary_point().is_some() {
        Some(model.reduced_bayes_factor(s)?)
    } else {
        None
    };
    let mu_star = mu_star_for(config, &model)?;
    let kind = config.evariable.kind;
    let e_value = match kind {
        EVariableKind::Rescaled => bf / mu_star,
        EVariableKind::Reduced => reduced_bf.ok_or_else(|| {
            CliError::Config("the reduced e-variable needs a monotone family with a half-line null".into())
        })?,
    };
    let report = EvalReport {
        s,
        bf,
        reduced_bf,
        e_value,
        mu_star,
        kind: kind.as_str().to_string(),
    };
    Ok(render(&report, config.output.format, EXIT_OK))
}

pub fn cmd_eprocess(config: &RunConfig) -> Result<Outcome, CliError> {
    let model = config.build_model()?;
    let kind = config.evariable.kind;
    let mu_star = match kind {
        EVariableKind::Rescaled => mu_star_for(config, &model)?,
        EVariableKind::Reduced => 1.0,
    };
    let evar = EVariable::new(&model, mu_star, kind)?;
    let e = &config.eprocess;
    let summary = evar.simulate_eprocess(e.theta_true, e.n_steps, e.n_trajectories, e.alpha, config.mc.seed)?;
    Ok(render(
        &EProcessReport::new(mu_star, &summary),
        config.output.format,
        EXIT_OK,
    ))
}
