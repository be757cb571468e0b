use thiserror::Error;

/// Errors produced while evaluating densities, integrals, Bayes factors and
/// the calibration constant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("{name} = {value} lies outside {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("density has a pole at x = {x}")]
    Pole { x: f64 },

    #[error("quadrature did not converge within {panels} panels (value {value}, error estimate {error_estimate})")]
    NonConvergence {
        value: f64,
        error_estimate: f64,
        panels: usize,
    },

    #[error("integrand is non-finite ({value}) at x = {x}")]
    NonFiniteIntegrand { x: f64, value: f64 },

    #[error("integrand failed at x = {x}: {source}")]
    Integrand { x: f64, source: Box<Error> },

    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("grid is empty")]
    EmptyGrid,

    #[error("grid is not strictly increasing at index {index}")]
    UnsortedGrid { index: usize },

    #[error("likelihood family `{family}` does not declare the monotonicity conditions")]
    MonotonicityNotDeclared { family: String },

    #[error("boundary density vanishes at s = {s}")]
    DivisionByZero { s: f64 },

    #[error("non-finite Bayes factor draw {value} at s = {s}")]
    NonFiniteDraw { s: f64, value: f64 },

    #[error("strategy `{strategy}` is not applicable: {reason}")]
    InvalidStrategy { strategy: &'static str, reason: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("parameter {theta} is not in the null set")]
    NotInNull { theta: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
