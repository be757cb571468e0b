//! Browser bindings for the Beta p-value / Student-t case study.
//!
//! [`demo`] holds plain Rust entry points (testable natively); the
//! `#[wasm_bindgen]` wrappers below only convert errors for JavaScript.
//! Matrices cross the boundary as flat row-major `Float64Array`s.

use wasm_bindgen::prelude::*;

pub mod demo {
    use bfcal::evariable::{EVariable, EVariableKind};
    use bfcal::model::ModelProblem;
    use bfcal::mustar::{compute_mu_star, expected_bf_quadrature, outer_quad_config, MuStarConfig, StrategySelector};
    use bfcal::Result;

    fn model(df: f64) -> Result<ModelProblem> {
        ModelProblem::case_study(df)
    }

    fn mu_star_of(problem: &ModelProblem) -> Result<f64> {
        Ok(compute_mu_star(problem, &StrategySelector::Auto, &MuStarConfig::default())?.mu_star)
    }

    /// Calibration constant for a Student-t prior with `df` degrees of freedom.
    pub fn mu_star(df: f64) -> Result<f64> {
        mu_star_of(&model(df)?)
    }

    /// `E_theta[BF]` by quadrature at each of `thetas`.
    pub fn expected_bf_curve(df: f64, thetas: &[f64]) -> Result<Vec<f64>> {
        let problem = model(df)?;
        let cfg = outer_quad_config();
        thetas
            .iter()
            .map(|&t| Ok(expected_bf_quadrature(&problem, t, &cfg)?.mean))
            .collect()
    }

    /// Rows `[bf, reduced_bf, bf / mu*]` for each p-value in `ps`.
    pub fn evalue_curve(df: f64, ps: &[f64]) -> Result<Vec<f64>> {
        let problem = model(df)?;
        let mu = mu_star_of(&problem)?;
        let mut out = Vec::with_capacity(3 * ps.len());
        for &p in ps {
            problem.check_support(p)?;
            let bf = problem.bayes_factor(p)?;
            out.extend([bf, problem.reduced_bayes_factor(p)?, bf / mu]);
        }
        Ok(out)
    }

    /// Running products of the rescaled e-variable, one row of `steps`
    /// values per trajectory.
    pub fn eprocess_paths(
        df: f64,
        theta_true: f64,
        steps: usize,
        trajectories: usize,
        alpha: f64,
        seed: u64,
    ) -> Result<Vec<f64>> {
        let problem = model(df)?;
        let evar = EVariable::new(&problem, mu_star_of(&problem)?, EVariableKind::Rescaled)?;
        let paths = evar.eprocess_paths(theta_true, steps, trajectories, alpha, seed)?;
        Ok(paths.into_iter().flat_map(|p| p.products).collect())
    }
}

fn js(err: bfcal::Error) -> JsError {
    JsError::new(&err.to_string())
}

#[wasm_bindgen(js_name = muStar)]
pub fn mu_star(df: f64) -> Result<f64, JsError> {
    demo::mu_star(df).map_err(js)
}

#[wasm_bindgen(js_name = expectedBfCurve)]
pub fn expected_bf_curve(df: f64, thetas: &[f64]) -> Result<Vec<f64>, JsError> {
    demo::expected_bf_curve(df, thetas).map_err(js)
}

#[wasm_bindgen(js_name = evalueCurve)]
pub fn evalue_curve(df: f64, ps: &[f64]) -> Result<Vec<f64>, JsError> {
    demo::evalue_curve(df, ps).map_err(js)
}

#[wasm_bindgen(js_name = eprocessPaths)]
pub fn eprocess_paths(
    df: f64,
    theta_true: f64,
    steps: usize,
    trajectories: usize,
    alpha: f64,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    demo::eprocess_paths(df, theta_true, steps, trajectories, alpha, u64::from(seed)).map_err(js)
}
