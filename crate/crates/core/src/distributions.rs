//! Beta and Student-t densities and the inverse-CDF sampler of the Beta
//! p-value family.
//!
//! Normalizing constants go through log-gamma so that large shape
//! parameters do not overflow.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Shape parameters of a Beta distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    a: f64,
    b: f64,
}

impl BetaParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter { name: "a", value: a });
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidParameter { name: "b", value: b });
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `ln B(a, b)`, exact when one shape is 1.
    pub fn ln_beta(&self) -> f64 {
        if self.a == 1.0 {
            -self.b.ln()
        } else if self.b == 1.0 {
            -self.a.ln()
        } else {
            ln_gamma(self.a) + ln_gamma(self.b) - ln_gamma(self.a + self.b)
        }
    }
}

/// Beta density at `x ∈ [0, 1]`.
///
/// At an endpoint the finite limit is returned (`0` or the boundary value
/// when the exponent is exactly zero). Where the density diverges
/// (`a < 1` at `0`, `b < 1` at `1`) the call fails with [`Error::Pole`]
/// instead of returning infinity.
pub fn beta_pdf(params: BetaParams, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            name: "x",
            value: x,
            domain: "[0, 1]",
        });
    }
    let BetaParams { a, b } = params;
    let ln_b = params.ln_beta();
    if x == 0.0 {
        return endpoint(a, ln_b, x);
    }
    if x == 1.0 {
        return endpoint(b, ln_b, x);
    }
    Ok(((a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_b).exp())
}

// `near` is the shape whose factor vanishes at this endpoint; the other
// factor equals one there.
fn endpoint(near: f64, ln_b: f64, x: f64) -> Result<f64> {
    if near < 1.0 {
        Err(Error::Pole { x })
    } else if near == 1.0 {
        Ok((-ln_b).exp())
    } else {
        Ok(0.0)
    }
}

/// Degrees of freedom of a standard Student-t distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudentTParams {
    nu: f64,
}

impl StudentTParams {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::InvalidParameter { name: "nu", value: nu });
        }
        Ok(Self { nu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

/// Standard Student-t density.
pub fn student_t_pdf(params: StudentTParams, x: f64) -> f64 {
    StudentT::new(params).pdf(x)
}

/// Student-t density with its normalizing constant precomputed.
///
/// This is the hot path of every marginal likelihood, so the kernel
/// `(1 + x²/ν)^(-(ν+1)/2)` uses an integer power when the exponent allows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudentT {
    params: StudentTParams,
    norm: f64,
    half_exponent: f64,
    integer_exponent: Option<i32>,
}

impl StudentT {
    pub fn new(params: StudentTParams) -> Self {
        let nu = params.nu;
        let ln_norm = ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * std::f64::consts::PI).ln();
        let half_exponent = 0.5 * (nu + 1.0);
        let integer_exponent = (half_exponent.fract() == 0.0 && half_exponent <= 64.0).then_some(half_exponent as i32);
        Self {
            params,
            norm: ln_norm.exp(),
            half_exponent,
            integer_exponent,
        }
    }

    pub fn params(&self) -> StudentTParams {
        self.params
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let base = 1.0 + x * x / self.params.nu;
        let kernel = match self.integer_exponent {
            Some(k) => base.powi(k).recip(),
            None => base.powf(-self.half_exponent),
        };
        self.norm * kernel
    }
}

/// Inverse-CDF draw from the Beta p-value family.
///
/// For `θ ≤ 0` the law is `Beta(1 - θ, 1)` with quantile `u^(1/(1-θ))`; for
/// `θ > 0` it is `Beta(1, 1 + θ)` with quantile `1 - (1-u)^(1/(1+θ))`. The
/// second branch is evaluated with `ln_1p`/`exp_m1` so that a tiny `u` does
/// not collapse to `p = 0`.
pub fn sample_case_study(theta: f64, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain {
            name: "u",
            value: u,
            domain: "(0, 1)",
        });
    }
    if theta <= 0.0 {
        Ok((u.ln() / (1.0 - theta)).exp())
    } else {
        Ok(-((-u).ln_1p() / (1.0 + theta)).exp_m1())
    }
}
