use std::sync::Arc;

use bfcal::distributions::{StudentT, StudentTParams};
use bfcal::evariable::{EVariable, EVariableKind};
use bfcal::model::{BetaPValueFamily, ModelProblem, NullSet, Prior};
use bfcal::montecarlo::{mc_mean, uniform_open};
use bfcal::mustar::{
    compute_mu_star, default_bracket, expected_bf_monte_carlo, expected_bf_quadrature, outer_quad_config, MuStarConfig,
    Strategy, StrategySelector,
};

const MU_STAR: f64 = 1.803941892768689;

fn model() -> ModelProblem {
    ModelProblem::case_study(5.0).unwrap()
}

#[test]
fn strategies_agree_on_mu_star() {
    let m = model();
    let cfg = MuStarConfig::default();
    let auto = compute_mu_star(&m, &StrategySelector::Auto, &cfg).unwrap();
    assert_eq!(auto.strategy, Strategy::MonotoneShortcut);
    assert_eq!(auto.theta_star, 0.0);
    let bounded = compute_mu_star(&m, &StrategySelector::BoundedSearch { bracket: None }, &cfg).unwrap();
    let grid_points: Vec<f64> = (0..=20).map(|i| -5.0 + 0.25 * i as f64).collect();
    let grid = compute_mu_star(
        &m,
        &StrategySelector::GridTabulation {
            points: Some(grid_points),
        },
        &cfg,
    )
    .unwrap();
    for r in [&auto, &bounded, &grid] {
        assert!((r.mu_star - MU_STAR).abs() < 1e-7, "{:?} {}", r.strategy, r.mu_star);
    }
    assert_eq!(grid.theta_star, 0.0);
    assert_eq!(bounded.boundary_distance, Some(0.0));
}

#[test]
fn default_bracket_uses_prior_tail() {
    let (lo, hi) = default_bracket(&model(), 1e-4).unwrap();
    assert!((lo - -11.17771007032153).abs() < 1e-4, "{lo}");
    assert_eq!(hi, 0.0);
}

#[test]
fn expected_bf_increases_towards_boundary() {
    let m = model();
    let cfg = outer_quad_config();
    let values: Vec<f64> = [-4.0, -3.0, -2.0, -1.0, -0.5, -0.1, 0.0]
        .iter()
        .map(|&t| expected_bf_quadrature(&m, t, &cfg).unwrap().mean)
        .collect();
    assert!(values.windows(2).all(|w| w[0] < w[1]), "{values:?}");
}

#[test]
fn shifted_half_line_null_uses_bounded_search() {
    let prior = Prior::new(
        Arc::new(StudentT::new(StudentTParams::new(5.0).unwrap())),
        NullSet::HalfLine { upper: -0.5 },
        &outer_quad_config(),
    )
    .unwrap();
    let m = ModelProblem::new(Arc::new(BetaPValueFamily), prior);
    let r = compute_mu_star(&m, &StrategySelector::Auto, &MuStarConfig::default()).unwrap();
    assert_ne!(r.strategy, Strategy::MonotoneShortcut);
    let at_boundary = expected_bf_quadrature(&m, -0.5, &outer_quad_config()).unwrap().mean;
    assert!((r.theta_star + 0.5).abs() < 1e-3, "{}", r.theta_star);
    assert!((r.mu_star - at_boundary).abs() < 1e-6);
    let evar = EVariable::new(&m, r.mu_star, EVariableKind::Rescaled).unwrap();
    let e = evar.expected_value_quadrature(-0.5, &outer_quad_config()).unwrap();
    assert!((e - 1.0).abs() < 1e-6);
}

#[test]
fn point_null_calibrates_to_one() {
    let m = ModelProblem::point_null(5.0, -1.0, 0.5).unwrap();
    let r = compute_mu_star(&m, &StrategySelector::Auto, &MuStarConfig::default()).unwrap();
    assert_eq!(r.strategy, Strategy::SimpleNull);
    assert!((r.mu_star - 1.0).abs() < 1e-6);
}

#[test]
fn product_of_independent_e_values_has_mean_at_most_one() {
    let m = model();
    let evar = EVariable::new(&m, MU_STAR, EVariableKind::Rescaled).unwrap();
    for theta in [0.0, -1.0] {
        let s = evar.product_mean(theta, 3, 40_000, 11).unwrap();
        assert!(
            s.mean <= 1.0 + 3.0 * s.std_error,
            "theta={theta} mean={} se={}",
            s.mean,
            s.std_error
        );
    }
}

#[test]
fn monte_carlo_error_shrinks_like_root_n() {
    let m = model();
    let small = expected_bf_monte_carlo(&m, -1.0, 10_000, 3).unwrap();
    let large = expected_bf_monte_carlo(&m, -1.0, 40_000, 3).unwrap();
    let ratio = small.std_error / large.std_error;
    assert!((ratio - 2.0).abs() < 0.3, "{ratio}");
}

#[test]
fn monte_carlo_is_independent_of_thread_count() {
    let draw = |rng: &mut _| Ok(uniform_open(rng).ln());
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| mc_mean(50_000, 99, draw).unwrap())
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
}

#[test]
fn eprocess_respects_ville_bound_under_null() {
    let m = model();
    let evar = EVariable::new(&m, MU_STAR, EVariableKind::Rescaled).unwrap();
    let summary = evar.simulate_eprocess(-0.5, 20, 2_000, 0.1, 5).unwrap();
    let bound = 0.1 + 3.0 * summary.binomial_std_error;
    assert!(summary.rejection_frequency <= bound, "{}", summary.rejection_frequency);
    assert!(summary.rejection_curve.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn reduced_and_rescaled_values_at_fixed_points() {
    let m = model();
    let bf = m.bayes_factor(0.5).unwrap();
    assert!((bf - 1.0).abs() < 1e-9);
    let reduced = EVariable::new(&m, 1.0, EVariableKind::Reduced).unwrap();
    let rescaled = EVariable::new(&m, MU_STAR, EVariableKind::Rescaled).unwrap();
    let s = 0.2;
    let m0 = 0.5261118942602543;
    assert!((reduced.evaluate(s).unwrap() - bf_at(&m, s) * m0).abs() < 1e-8);
    assert!((rescaled.evaluate(s).unwrap() - bf_at(&m, s) / MU_STAR).abs() < 1e-8);
}

fn bf_at(m: &ModelProblem, s: f64) -> f64 {
    m.bayes_factor(s).unwrap()
}
