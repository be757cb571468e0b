//! Turning Bayes factors into e-variables.
//!
//! A Bayes factor `BF` is an e-variable for `H0: θ ∈ Θ0` only when its
//! expectation under every null parameter is at most one. This crate computes
//!
//! ```text
//! μ* = max_{θ ∈ Θ0} E_θ[BF]
//! ```
//!
//! by adaptive quadrature or seeded Monte Carlo, and divides the Bayes factor
//! by it. It also checks the resulting e-variable by simulation and runs the
//! running-product e-process with the `1/α` rejection threshold.
//!
//! Module map:
//!
//! * [`distributions`]: Beta and Student-t densities, inverse-CDF sampling.
//! * [`quadrature`]: adaptive Gauss–Kronrod integration on finite and
//!   semi-infinite ranges.
//! * [`optimize`]: Brent maximization on a bracket, grid tabulation.
//! * [`model`]: likelihood families, priors with a null/alternative
//!   partition, Bayes factors.
//! * [`montecarlo`]: reproducible chunked Monte Carlo means.
//! * [`mustar`]: expected Bayes factor and the calibration constant `μ*`.
//! * [`evariable`]: rescaled/reduced e-variables, validation, e-processes.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod error;
pub mod evariable;
pub mod model;
pub mod montecarlo;
pub mod mustar;
pub mod optimize;
pub mod quadrature;

pub use error::{Error, Result};
