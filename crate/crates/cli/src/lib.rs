//! Command-line front end for the `bfcal` calibration library.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod number;
pub mod report;

use std::io::Write;

use commands::{execute, resolve_config, Command};
use error::CliError;

/// Runs one subcommand: the report goes to `--out` (with a short summary on
/// stdout) or to stdout. Returns the process exit code.
pub fn run(command: &Command) -> Result<i32, CliError> {
    let config = resolve_config(command)?;
    let outcome = execute(command, &config)?;
    match &config.output.path {
        Some(path) => {
            std::fs::write(path, &outcome.document).map_err(|e| CliError::Io(format!("cannot write {path}: {e}")))?;
            println!("{}", outcome.summary);
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(outcome.document.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    Ok(outcome.exit_code)
}
