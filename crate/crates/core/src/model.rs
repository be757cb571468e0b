//! Likelihood families, priors with a null/alternative partition, and the
//! Bayes factors built on them.
//!
//! Data enter through a real summary statistic `s` with density `g_θ(s)`.
//! With prior `π` and partition `Θ = Θ0 ∪ Θ1` of masses `π0`, `π1`,
//!
//! ```text
//! m_i(s) = ∫_{Θi} g_θ(s) π(dθ) / π_i,      BF(s) = m_1(s) / m_0(s)
//! ```
//!
//! and the reduced Bayes factor replaces `m_0` by the density at the
//! boundary of a one-sided null, `BF0(s) = m_1(s) / g_0(s)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::distributions::{sample_case_study, StudentT, StudentTParams};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_finite, integrate_semi_infinite, Direction, QuadConfig};

/// Sampling model of the summary statistic.
pub trait LikelihoodFamily: fmt::Debug + Send + Sync {
    fn name(&self) -> &str;

    /// `g_θ(s)`.
    fn density(&self, theta: f64, s: f64) -> Result<f64>;

    /// Closed support `[lo, hi]` of `s`.
    fn support(&self) -> (f64, f64);

    /// Inverse-CDF draw of `S` under `θ` from `u ∈ (0, 1)`.
    fn sample(&self, theta: f64, u: f64) -> Result<f64>;

    /// Whether `g_θ` is nondecreasing in `s` for `θ ≤ 0` and nonincreasing
    /// for `θ > 0`.
    fn monotone_declared(&self) -> bool {
        false
    }

    /// Parameter value where the density changes form; θ-integrals are split
    /// there.
    fn theta_break(&self) -> Option<f64> {
        None
    }
}

/// P-value model: `Beta(1 - θ, 1)` for `θ ≤ 0` and `Beta(1, 1 + θ)` for
/// `θ > 0`. `θ = 0` is the uniform distribution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BetaPValueFamily;

impl BetaPValueFamily {
    #[inline]
    fn eval(theta: f64, p: f64) -> f64 {
        if theta <= 0.0 {
            (1.0 - theta) * p.powf(-theta)
        } else {
            (1.0 + theta) * (1.0 - p).powf(theta)
        }
    }
}

impl LikelihoodFamily for BetaPValueFamily {
    fn name(&self) -> &str {
        "beta_pvalue"
    }

    fn density(&self, theta: f64, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain {
                name: "s",
                value: s,
                domain: "[0, 1]",
            });
        }
        Ok(Self::eval(theta, s))
    }

    fn support(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn sample(&self, theta: f64, u: f64) -> Result<f64> {
        sample_case_study(theta, u)
    }

    fn monotone_declared(&self) -> bool {
        true
    }

    fn theta_break(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// Prior density on the real line.
pub trait PriorDensity: fmt::Debug + Send + Sync {
    fn name(&self) -> &str;
    fn density(&self, theta: f64) -> f64;
}

impl PriorDensity for StudentT {
    fn name(&self) -> &str {
        "student_t"
    }

    fn density(&self, theta: f64) -> f64 {
        self.pdf(theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointMass {
    pub theta: f64,
    /// Prior probability of the atom.
    pub weight: f64,
}

/// The null parameter set `Θ0`. The alternative is its complement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NullSet {
    /// `(-∞, upper]`.
    HalfLine { upper: f64 },
    /// `[lo, hi]`.
    Interval { lo: f64, hi: f64 },
    /// Finitely many atoms; the prior is `Σ wᵢ δ_θᵢ + (1 - Σ wᵢ) · density`.
    Points(Vec<PointMass>),
}

impl NullSet {
    pub fn contains(&self, theta: f64) -> bool {
        match self {
            NullSet::HalfLine { upper } => theta <= *upper,
            NullSet::Interval { lo, hi } => (*lo..=*hi).contains(&theta),
            NullSet::Points(points) => points.iter().any(|p| p.theta == theta),
        }
    }

    pub fn singleton(&self) -> Option<f64> {
        match self {
            NullSet::Points(points) if points.len() == 1 => Some(points[0].theta),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            NullSet::HalfLine { upper } if !upper.is_finite() => {
                Err(Error::InvalidModel(format!("half-line bound {upper} is not finite")))
            }
            NullSet::Interval { lo, hi } if !(lo < hi && lo.is_finite() && hi.is_finite()) => Err(Error::InvalidModel(
                format!("null interval [{lo}, {hi}] is empty or unbounded"),
            )),
            NullSet::Points(points) => {
                if points.is_empty() {
                    return Err(Error::InvalidModel("null point set is empty".into()));
                }
                for pair in points.windows(2) {
                    if !(pair[0].theta < pair[1].theta) {
                        return Err(Error::InvalidModel("null points must be strictly increasing".into()));
                    }
                }
                if let Some(p) = points.iter().find(|p| !(p.weight > 0.0 && p.theta.is_finite())) {
                    return Err(Error::InvalidModel(format!(
                        "null atom at {} has weight {}",
                        p.theta, p.weight
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Prior density with its null/alternative partition and cached masses.
#[derive(Debug, Clone)]
pub struct Prior {
    density: Arc<dyn PriorDensity>,
    null_set: NullSet,
    pi0: f64,
    pi1: f64,
}

impl Prior {
    /// Computes `π0` and `π1` once by quadrature.
    ///
    /// For a continuous null the density must integrate to one over the
    /// real line. For a point null the density is the continuous part of
    /// the prior and the atom weights are the null mass.
    pub fn new(density: Arc<dyn PriorDensity>, null_set: NullSet, cfg: &QuadConfig) -> Result<Self> {
        null_set.validate()?;
        let f = |t: f64| Ok(density.density(t));
        let (pi0, pi1) = match &null_set {
            NullSet::Points(points) => {
                let total = integrate_interval(f, f64::NEG_INFINITY, f64::INFINITY, &[0.0], cfg)?;
                check_normalized(total)?;
                let pi0: f64 = points.iter().map(|p| p.weight).sum();
                (pi0, 1.0 - pi0)
            }
            NullSet::HalfLine { upper } => (
                integrate_interval(f, f64::NEG_INFINITY, *upper, &[], cfg)?,
                integrate_interval(f, *upper, f64::INFINITY, &[], cfg)?,
            ),
            NullSet::Interval { lo, hi } => {
                let inside = integrate_interval(f, *lo, *hi, &[], cfg)?;
                let below = integrate_interval(f, f64::NEG_INFINITY, *lo, &[], cfg)?;
                let above = integrate_interval(f, *hi, f64::INFINITY, &[], cfg)?;
                (inside, below + above)
            }
        };
        check_normalized(pi0 + pi1)?;
        if !(pi0.min(pi1) > 0.0) {
            return Err(Error::InvalidModel(format!(
                "prior masses must be positive, got pi0 = {pi0}, pi1 = {pi1}"
            )));
        }
        Ok(Self {
            density,
            null_set,
            pi0,
            pi1,
        })
    }

    pub fn density(&self, theta: f64) -> f64 {
        self.density.density(theta)
    }

    pub fn density_name(&self) -> &str {
        self.density.name()
    }

    pub fn null_set(&self) -> &NullSet {
        &self.null_set
    }

    pub fn pi0(&self) -> f64 {
        self.pi0
    }

    pub fn pi1(&self) -> f64 {
        self.pi1
    }
}

fn check_normalized(total: f64) -> Result<()> {
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidModel(format!(
            "prior density integrates to {total}, not 1"
        )));
    }
    Ok(())
}

/// Integral over `(lo, hi)` where either end may be infinite, split at the
/// breakpoints that fall strictly inside.
pub(crate) fn integrate_interval<F>(f: F, lo: f64, hi: f64, breaks: &[f64], cfg: &QuadConfig) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut nodes = vec![lo];
    nodes.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
    nodes.push(hi);
    if lo.is_infinite() && hi.is_infinite() && nodes.len() == 2 {
        nodes.insert(1, 0.0);
    }
    let mut total = 0.0;
    for piece in nodes.windows(2) {
        let (a, b) = (piece[0], piece[1]);
        total += match (a.is_infinite(), b.is_infinite()) {
            (false, false) => integrate_finite(&f, a, b, cfg)?.value,
            (true, false) => integrate_semi_infinite(&f, b, Direction::ToMinusInf, cfg)?.value,
            (false, true) => integrate_semi_infinite(&f, a, Direction::ToPlusInf, cfg)?.value,
            (true, true) => unreachable!("real line is always split"),
        };
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Null,
    Alternative,
}

/// Both marginals at one `s` and their ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BfEvaluation {
    pub numerator: f64,
    pub denominator: f64,
    pub value: f64,
    /// Both marginals vanished; `value` is `+∞` by convention.
    pub zero_over_zero: bool,
}

/// Default tolerances for the inner θ-integrals.
pub fn inner_quad_config() -> QuadConfig {
    QuadConfig {
        rel_tol: 1e-9,
        abs_tol: 1e-14,
        max_panels: 2048,
    }
}

/// A likelihood family together with a partitioned prior.
#[derive(Debug, Clone)]
pub struct ModelProblem {
    likelihood: Arc<dyn LikelihoodFamily>,
    prior: Prior,
    inner: QuadConfig,
}

impl ModelProblem {
    pub fn new(likelihood: Arc<dyn LikelihoodFamily>, prior: Prior) -> Self {
        Self {
            likelihood,
            prior,
            inner: inner_quad_config(),
        }
    }

    pub fn with_inner_config(mut self, inner: QuadConfig) -> Self {
        self.inner = inner;
        self
    }

    /// Beta p-value family, Student-t prior with `df` degrees of freedom,
    /// `Θ0 = (-∞, 0]`.
    pub fn case_study(df: f64) -> Result<Self> {
        let prior = StudentT::new(StudentTParams::new(df)?);
        let prior = Prior::new(Arc::new(prior), NullSet::HalfLine { upper: 0.0 }, &inner_quad_config())?;
        Ok(Self::new(Arc::new(BetaPValueFamily), prior))
    }

    /// Beta p-value family with `Θ0 = {theta0}` carrying prior mass
    /// `weight` and a Student-t continuous part.
    pub fn point_null(df: f64, theta0: f64, weight: f64) -> Result<Self> {
        if !(weight > 0.0 && weight < 1.0) {
            return Err(Error::InvalidParameter {
                name: "weight",
                value: weight,
            });
        }
        let prior = StudentT::new(StudentTParams::new(df)?);
        let prior = Prior::new(
            Arc::new(prior),
            NullSet::Points(vec![PointMass { theta: theta0, weight }]),
            &inner_quad_config(),
        )?;
        Ok(Self::new(Arc::new(BetaPValueFamily), prior))
    }

    pub fn likelihood(&self) -> &dyn LikelihoodFamily {
        self.likelihood.as_ref()
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    pub fn inner_config(&self) -> &QuadConfig {
        &self.inner
    }

    pub fn null_set(&self) -> &NullSet {
        self.prior.null_set()
    }

    pub fn check_support(&self, s: f64) -> Result<()> {
        let (lo, hi) = self.likelihood.support();
        if (lo..=hi).contains(&s) {
            Ok(())
        } else {
            Err(Error::Domain {
                name: "s",
                value: s,
                domain: "likelihood support",
            })
        }
    }

    fn breaks(&self) -> Vec<f64> {
        self.likelihood.theta_break().into_iter().collect()
    }

    fn weighted_integral(&self, s: f64, lo: f64, hi: f64) -> Result<f64> {
        let g = self.likelihood.as_ref();
        let integrand = |theta: f64| -> Result<f64> {
            let prior = self.prior.density(theta);
            if prior == 0.0 {
                return Ok(0.0);
            }
            Ok(g.density(theta, s)? * prior)
        };
        integrate_interval(integrand, lo, hi, &self.breaks(), &self.inner)
    }

    /// Prior-predictive density of `s` under the null or the alternative.
    pub fn marginal(&self, side: Side, s: f64) -> Result<f64> {
        self.check_support(s)?;
        let (inf, sup) = (f64::NEG_INFINITY, f64::INFINITY);
        match (side, self.prior.null_set()) {
            (Side::Null, NullSet::HalfLine { upper }) => Ok(self.weighted_integral(s, inf, *upper)? / self.prior.pi0),
            (Side::Null, NullSet::Interval { lo, hi }) => Ok(self.weighted_integral(s, *lo, *hi)? / self.prior.pi0),
            (Side::Null, NullSet::Points(points)) if points.len() == 1 => self.likelihood.density(points[0].theta, s),
            (Side::Null, NullSet::Points(points)) => {
                let mut total = 0.0;
                for p in points {
                    total += p.weight * self.likelihood.density(p.theta, s)?;
                }
                Ok(total / self.prior.pi0)
            }
            (Side::Alternative, NullSet::HalfLine { upper }) => {
                Ok(self.weighted_integral(s, *upper, sup)? / self.prior.pi1)
            }
            (Side::Alternative, NullSet::Interval { lo, hi }) => {
                let below = self.weighted_integral(s, inf, *lo)?;
                let above = self.weighted_integral(s, *hi, sup)?;
                Ok((below + above) / self.prior.pi1)
            }
            // atoms carry no continuous mass; the continuous part is normalized
            (Side::Alternative, NullSet::Points(_)) => self.weighted_integral(s, inf, sup),
        }
    }

    pub fn bayes_factor_eval(&self, s: f64) -> Result<BfEvaluation> {
        let numerator = self.marginal(Side::Alternative, s)?;
        let denominator = self.marginal(Side::Null, s)?;
        let (value, zero_over_zero) = if denominator > 0.0 {
            (numerator / denominator, false)
        } else {
            (f64::INFINITY, numerator == 0.0)
        };
        Ok(BfEvaluation {
            numerator,
            denominator,
            value,
            zero_over_zero,
        })
    }

    /// `BF(s) = m_1(s) / m_0(s)`; `+∞` when `m_0(s) = 0`.
    pub fn bayes_factor(&self, s: f64) -> Result<f64> {
        Ok(self.bayes_factor_eval(s)?.value)
    }

    /// Boundary of a one-sided null `(-∞, c]`.
    pub fn boundary_point(&self) -> Option<f64> {
        match self.prior.null_set() {
            NullSet::HalfLine { upper } => Some(*upper),
            _ => None,
        }
    }

    /// `BF0(s) = m_1(s) / g_c(s)` with `c` the boundary of the one-sided
    /// null. Requires a family declaring the monotonicity conditions.
    pub fn reduced_bayes_factor(&self, s: f64) -> Result<f64> {
        if !self.likelihood.monotone_declared() {
            return Err(Error::MonotonicityNotDeclared {
                family: self.likelihood.name().to_string(),
            });
        }
        let boundary = self
            .boundary_point()
            .ok_or_else(|| Error::InvalidModel("reduced Bayes factor needs a half-line null (-inf, c]".into()))?;
        let numerator = self.marginal(Side::Alternative, s)?;
        let denominator = self.likelihood.density(boundary, s)?;
        if denominator == 0.0 {
            return Err(Error::DivisionByZero { s });
        }
        Ok(numerator / denominator)
    }
}

/// Outcome of a grid check of the monotonicity conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub checked_pairs: usize,
    pub violations: usize,
    /// Largest violation `(θ, s, amount)`.
    pub worst: Option<(f64, f64, f64)>,
}

/// Checks that `g_θ(s)` is nondecreasing in `s` for every grid `θ ≤ boundary`
/// and nonincreasing for every `θ > boundary`, allowing `slack`.
pub fn check_monotonicity(
    family: &dyn LikelihoodFamily,
    boundary: f64,
    thetas: &[f64],
    s_grid: &[f64],
    slack: f64,
) -> Result<MonotonicityReport> {
    let mut report = MonotonicityReport {
        checked_pairs: 0,
        violations: 0,
        worst: None,
    };
    for &theta in thetas {
        let increasing = theta <= boundary;
        let mut prev = family.density(theta, s_grid[0])?;
        for &s in &s_grid[1..] {
            let cur = family.density(theta, s)?;
            let drop = if increasing { prev - cur } else { cur - prev };
            report.checked_pairs += 1;
            if drop > slack {
                report.violations += 1;
                if report.worst.is_none_or(|(_, _, w)| drop > w) {
                    report.worst = Some((theta, s, drop));
                }
            }
            prev = cur;
        }
    }
    Ok(report)
}

/// Integral of `g_θ` over the support, for normalization checks.
pub fn density_mass(family: &dyn LikelihoodFamily, theta: f64, cfg: &QuadConfig) -> Result<f64> {
    let (lo, hi) = family.support();
    Ok(integrate_finite(|s| family.density(theta, s), lo, hi, cfg)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{beta_pdf, BetaParams};

    fn case_study() -> ModelProblem {
        ModelProblem::case_study(5.0).unwrap()
    }

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let n = n + n % 2;
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn family_matches_beta_densities() {
        let fam = BetaPValueFamily;
        for &theta in &[-3.0, -1.0, -0.25, 0.0, 0.5, 2.0] {
            for &p in &[0.0, 0.1, 0.5, 0.9, 1.0] {
                let (a, b) = if theta <= 0.0 {
                    (1.0 - theta, 1.0)
                } else {
                    (1.0, 1.0 + theta)
                };
                let expected = beta_pdf(BetaParams::new(a, b).unwrap(), p).unwrap();
                let got = fam.density(theta, p).unwrap();
                assert!((got - expected).abs() <= 1e-12 * expected.max(1.0), "θ={theta} p={p}");
            }
        }
    }

    #[test]
    fn family_normalizes() {
        let cfg = QuadConfig::default();
        for &theta in &[-20.0, -2.5, -0.3, 0.0, 0.3, 4.0, 30.0] {
            let mass = density_mass(&BetaPValueFamily, theta, &cfg).unwrap();
            assert!((mass - 1.0).abs() <= 1e-6, "θ = {theta}: {mass}");
        }
    }

    #[test]
    fn monotonicity_on_100_by_100_grid() {
        let thetas: Vec<f64> = (0..100).map(|i| -10.0 + 20.0 * i as f64 / 99.0).collect();
        let ps: Vec<f64> = (0..100).map(|i| i as f64 / 99.0).collect();
        let report = check_monotonicity(&BetaPValueFamily, 0.0, &thetas, &ps, 1e-12).unwrap();
        assert_eq!(report.violations, 0, "{report:?}");
        assert_eq!(report.checked_pairs, 100 * 99);
    }

    #[test]
    fn monotonicity_checker_detects_violation() {
        // θ > 0 side with the wrong orientation
        let report = check_monotonicity(&BetaPValueFamily, 10.0, &[2.0], &[0.1, 0.5, 0.9], 1e-12).unwrap();
        assert_eq!(report.violations, 2);
    }

    #[test]
    fn prior_masses_are_halves() {
        let m = case_study();
        assert!((m.prior().pi0() - 0.5).abs() < 1e-9);
        assert!((m.prior().pi0() + m.prior().pi1() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn invalid_priors_rejected() {
        let t = Arc::new(StudentT::new(StudentTParams::new(5.0).unwrap()));
        let cfg = inner_quad_config();
        assert!(Prior::new(t.clone(), NullSet::Points(vec![]), &cfg).is_err());
        assert!(Prior::new(t.clone(), NullSet::Interval { lo: 1.0, hi: 0.0 }, &cfg).is_err());
        assert!(Prior::new(
            t.clone(),
            NullSet::Points(vec![PointMass {
                theta: 0.0,
                weight: 1.0
            }]),
            &cfg
        )
        .is_err());
        #[derive(Debug)]
        struct Half;
        impl PriorDensity for Half {
            fn name(&self) -> &str {
                "half"
            }
            fn density(&self, theta: f64) -> f64 {
                0.5 * (-theta.abs()).exp() * 0.5
            }
        }
        assert!(Prior::new(Arc::new(Half), NullSet::HalfLine { upper: 0.0 }, &cfg).is_err());
        assert!(ModelProblem::point_null(5.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn alternative_marginal_normalizes() {
        let m = case_study();
        let r = integrate_finite(
            |p| m.marginal(Side::Alternative, p),
            0.0,
            1.0,
            &QuadConfig::new(1e-7, 1e-10, 2048).unwrap(),
        )
        .unwrap();
        assert!((r.value - 1.0).abs() <= 1e-5, "{r:?}");
    }

    #[test]
    fn null_marginal_matches_simpson() {
        let m = case_study();
        let t5 = StudentT::new(StudentTParams::new(5.0).unwrap());
        let p0: f64 = 0.2;
        let oracle = 2.0 * simpson(|th| (1.0 - th) * p0.powf(-th) * t5.pdf(th), -200.0, 0.0, 1_000_000);
        let got = m.marginal(Side::Null, p0).unwrap();
        assert!((got - oracle).abs() <= 1e-8, "{got} vs {oracle}");
    }

    #[test]
    fn bayes_factor_matches_simpson_ratio() {
        let m = case_study();
        let t5 = StudentT::new(StudentTParams::new(5.0).unwrap());
        for p in [0.05f64, 0.3, 0.5, 0.8] {
            let num = simpson(|th| (1.0 + th) * (1.0 - p).powf(th) * t5.pdf(th), 0.0, 200.0, 1_000_000);
            let den = simpson(|th| (1.0 - th) * p.powf(-th) * t5.pdf(th), -200.0, 0.0, 1_000_000);
            let got = m.bayes_factor(p).unwrap();
            assert!((got - num / den).abs() <= 1e-7 * got, "p={p}: {got} vs {}", num / den);
        }
    }

    #[test]
    fn symmetric_point_gives_one() {
        // g_{-t}(p) = g_t(1 - p) and the t prior is symmetric
        let bf = case_study().bayes_factor(0.5).unwrap();
        assert!((bf - 1.0).abs() < 1e-8);
    }

    #[test]
    fn bayes_factor_decreasing_in_p() {
        let m = case_study();
        let values: Vec<f64> = (1..=100).map(|i| m.bayes_factor(i as f64 / 101.0).unwrap()).collect();
        assert!(values.iter().all(|&v| v >= 0.0));
        for w in values.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn endpoints_of_support() {
        let m = case_study();
        // p = 1: the alternative density vanishes
        assert_eq!(m.bayes_factor(1.0).unwrap(), 0.0);
        // p = 0: only the θ = 0 atom of measure zero survives in the null
        let e = m.bayes_factor_eval(0.0).unwrap();
        assert_eq!(e.denominator, 0.0);
        assert!(e.value.is_infinite() && !e.zero_over_zero);
        assert!(matches!(m.bayes_factor(1.2), Err(Error::Domain { .. })));
    }

    #[test]
    fn point_null_marginal_is_density() {
        let m = ModelProblem::point_null(5.0, -1.0, 0.3).unwrap();
        for p in [0.1, 0.4, 0.9] {
            let direct = BetaPValueFamily.density(-1.0, p).unwrap();
            assert_eq!(m.marginal(Side::Null, p).unwrap(), direct);
            let alt = m.marginal(Side::Alternative, p).unwrap();
            assert_eq!(m.bayes_factor(p).unwrap(), alt / direct);
        }
    }

    #[test]
    fn reduced_bayes_factor_case_study() {
        let m = case_study();
        for p in [0.1, 0.5, 0.9] {
            let reduced = m.reduced_bayes_factor(p).unwrap();
            assert_eq!(reduced, m.marginal(Side::Alternative, p).unwrap());
        }
        assert!(m.reduced_bayes_factor(0.9).unwrap() < m.reduced_bayes_factor(0.1).unwrap());
        let r = integrate_finite(
            |p| m.reduced_bayes_factor(p),
            0.0,
            1.0,
            &QuadConfig::new(1e-7, 1e-10, 2048).unwrap(),
        )
        .unwrap();
        assert!((r.value - 1.0).abs() <= 1e-5);
    }

    #[test]
    fn reduced_requires_monotone_family() {
        #[derive(Debug)]
        struct Flat;
        impl LikelihoodFamily for Flat {
            fn name(&self) -> &str {
                "flat"
            }
            fn density(&self, _: f64, _: f64) -> Result<f64> {
                Ok(1.0)
            }
            fn support(&self) -> (f64, f64) {
                (0.0, 1.0)
            }
            fn sample(&self, _: f64, u: f64) -> Result<f64> {
                Ok(u)
            }
        }
        let prior = case_study().prior().clone();
        let m = ModelProblem::new(Arc::new(Flat), prior);
        assert!(matches!(
            m.reduced_bayes_factor(0.5),
            Err(Error::MonotonicityNotDeclared { .. })
        ));
        assert!((m.bayes_factor(0.5).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn reduced_division_by_zero() {
        // boundary θ = -1: g_{-1}(0) = 0
        let t = Arc::new(StudentT::new(StudentTParams::new(5.0).unwrap()));
        let prior = Prior::new(t, NullSet::HalfLine { upper: -1.0 }, &inner_quad_config()).unwrap();
        let m = ModelProblem::new(Arc::new(BetaPValueFamily), prior);
        assert_eq!(m.reduced_bayes_factor(0.0), Err(Error::DivisionByZero { s: 0.0 }));
    }

    #[test]
    fn interval_null_partition() {
        let t = Arc::new(StudentT::new(StudentTParams::new(5.0).unwrap()));
        let prior = Prior::new(t, NullSet::Interval { lo: -1.0, hi: 1.0 }, &inner_quad_config()).unwrap();
        assert!((prior.pi0() + prior.pi1() - 1.0).abs() < 1e-8);
        let m = ModelProblem::new(Arc::new(BetaPValueFamily), prior);
        // symmetric partition, symmetric likelihood pair
        let lhs = m.marginal(Side::Null, 0.3).unwrap();
        let rhs = m.marginal(Side::Null, 0.7).unwrap();
        assert!((lhs - rhs).abs() < 1e-8);
        assert!(m.reduced_bayes_factor(0.5).is_err());
    }

    #[test]
    fn failing_density_aborts() {
        #[derive(Debug)]
        struct Broken;
        impl LikelihoodFamily for Broken {
            fn name(&self) -> &str {
                "broken"
            }
            fn density(&self, theta: f64, _: f64) -> Result<f64> {
                if theta < -3.0 {
                    Err(Error::Pole { x: theta })
                } else {
                    Ok(1.0)
                }
            }
            fn support(&self) -> (f64, f64) {
                (0.0, 1.0)
            }
            fn sample(&self, _: f64, u: f64) -> Result<f64> {
                Ok(u)
            }
        }
        let prior = case_study().prior().clone();
        let m = ModelProblem::new(Arc::new(Broken), prior);
        assert!(m.bayes_factor(0.5).is_err());
    }

    #[test]
    fn posterior_odds_identity_on_grid() {
        // brute-force Bayes on a θ grid: BF = posterior odds / prior odds
        let m = case_study();
        let t5 = StudentT::new(StudentTParams::new(5.0).unwrap());
        let h = 0.002;
        let thetas: Vec<f64> = (0..200_000).map(|i| -200.0 + (i as f64 + 0.5) * h).collect();
        for p in [0.1f64, 0.6] {
            let (mut post0, mut post1, mut prior0, mut prior1) = (0.0, 0.0, 0.0, 0.0);
            for &th in &thetas {
                let w = t5.pdf(th) * h;
                let lik = BetaPValueFamily.density(th, p).unwrap();
                if th <= 0.0 {
                    post0 += w * lik;
                    prior0 += w;
                } else {
                    post1 += w * lik;
                    prior1 += w;
                }
            }
            let bf_grid = (post1 / post0) / (prior1 / prior0);
            let bf = m.bayes_factor(p).unwrap();
            assert!((bf - bf_grid).abs() <= 1e-4 * bf, "p={p}: {bf} vs {bf_grid}");
        }
    }
}
