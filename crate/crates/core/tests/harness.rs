use kolmo_core::drift::{AssumptionMode, DriftComponent, DriftSpec, DriftState, Profile, ValidatedDrift};
use kolmo_core::harness::{
    check_rlsi, check_rn_bounds, check_wang, convergence_study, envelope_ratios, estimate_semigroup,
    monotone_trend_test, CheckVerdict, ConvergenceTarget, Diffusion, InequalityReport, McOptions, Method,
    REGISTRY,
};
use kolmo_core::bounds::RnStyle;
use kolmo_core::gauss::ShiftVector;
use kolmo_core::wiener::{TimeGrid, WienerSpaceModel};
use kolmo_core::Seed;
use proptest::prelude::*;

fn at(p: f64, xi: f64) -> DriftState {
    DriftState { p: vec![p], xi: vec![xi] }
}

fn tanh_drift() -> Diffusion {
    let spec = DriftSpec::finite(
        "tanh-1d",
        1,
        vec![DriftComponent::certified(vec![0], Profile::LinearTanh { slope: 2.0, amplitude: 1.0 })],
    );
    Diffusion::Generalized(ValidatedDrift::new(spec, AssumptionMode::A, 1000, Seed(0)).unwrap())
}

fn round_trips(r: &InequalityReport) -> bool {
    r.recompute_verdict() == r.verdict
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn jensen_floor(fi in 0usize..10, alpha in 1.01f64..6.0, t in 0.2f64..2.0,
                    p in -2.0f64..2.0, xi in -2.0f64..2.0, seed in 0u64..1000) {
        let f = REGISTRY[fi].f;
        let x = at(p, xi);
        let q = check_wang(&f, alpha, t, &x, &x, &Diffusion::Standard, &Method::Quadrature).unwrap();
        prop_assert_ne!(q.verdict, CheckVerdict::Violated);
        prop_assert!(round_trips(&q));
        let mc = Method::MonteCarlo(McOptions::new(2_000, Seed(seed)));
        for diffusion in [Diffusion::Standard, tanh_drift()] {
            let r = check_wang(&f, alpha, t, &x, &x, &diffusion, &mc).unwrap();
            prop_assert_ne!(r.verdict, CheckVerdict::Violated);
            prop_assert!(r.margin() >= 0.0);
            prop_assert!(round_trips(&r));
        }
    }
}

#[test]
fn quadrature_and_monte_carlo_agree() {
    let x = at(0.4, -0.3);
    for tf in REGISTRY {
        let q = estimate_semigroup(&tf.f, 1.0, &x, &Method::Quadrature, &Diffusion::Standard).unwrap();
        let mc = Method::MonteCarlo(McOptions::new(1_000_000, Seed(21)));
        let m = estimate_semigroup(&tf.f, 1.0, &x, &mc, &Diffusion::Standard).unwrap();
        assert!(m.contains(q.value), "{}: mc {} ± {} vs quad {}", tf.name, m.value, m.half_width, q.value);
    }
}

#[test]
fn generalized_semigroup_reduces_to_standard_for_unit_slope() {
    let spec = DriftSpec::finite("unit", 1, vec![DriftComponent::certified(vec![0], Profile::Linear { slope: 1.0 })]);
    let unit = Diffusion::Generalized(ValidatedDrift::new(spec, AssumptionMode::A, 100, Seed(0)).unwrap());
    let f = |p: &[f64], xi: &[f64]| 1.0 / (1.0 + p[0] * p[0] + xi[0] * xi[0]);
    let x = at(0.5, 0.2);
    let q = estimate_semigroup(&f, 1.0, &x, &Method::Quadrature, &Diffusion::Standard).unwrap();
    let m = estimate_semigroup(&f, 1.0, &x, &Method::MonteCarlo(McOptions::new(200_000, Seed(4))), &unit).unwrap();
    // trapezoid bias at 64 steps is far below the interval
    assert!(m.contains(q.value), "{} ± {} vs {}", m.value, m.half_width, q.value);
}

#[test]
fn generalized_wang_reference_point() {
    let f = |p: &[f64], xi: &[f64]| 1.0 / (1.0 + p[0] * p[0] + xi[0] * xi[0]);
    let mc = Method::MonteCarlo(McOptions::new(200_000, Seed(6)));
    let r = check_wang(&f, 2.0, 1.0, &at(0.5, 0.0), &at(0.0, 0.0), &tanh_drift(), &mc).unwrap();
    assert_eq!(r.verdict, CheckVerdict::Holds);
    assert!(round_trips(&r));
}

#[test]
fn generalized_log_sobolev_uses_drift_constants() {
    let f = |p: &[f64], xi: &[f64]| 2.0 + p[0].sin() * xi[0].cos();
    let mut o = McOptions::new(100_000, Seed(2));
    o.antithetic = true;
    let r = check_rlsi(&f, 1.0, &at(0.0, 0.0), &tanh_drift(), &Method::MonteCarlo(o)).unwrap();
    assert!(r.params.iter().any(|(k, v)| k == "entropy_factor" && v == "M/(mtP)"));
    assert!(round_trips(&r));
    assert!(check_rlsi(&f, 1.0, &at(0.0, 0.0), &tanh_drift(), &Method::Quadrature).is_err());
}

#[test]
fn rn_reports_round_trip() {
    for q in [1.5, 2.0, 3.0, 4.0] {
        let reports =
            check_rn_bounds(q, 1.0, &ShiftVector::scalar(0.0, 1.0), &[RnStyle::Exact, RnStyle::CrossTerm, RnStyle::Decoupled], None, None)
                .unwrap();
        assert!(reports.iter().all(round_trips));
        let ex = &reports[1];
        // (1+q) < 2(q−1) exactly when q > 3
        let expect = if q > 3.0 { CheckVerdict::Violated } else { CheckVerdict::Holds };
        assert_eq!(ex.verdict, expect, "q={q}");
    }
    assert!(check_rn_bounds(1.0, 1.0, &ShiftVector::scalar(0.0, 1.0), &[RnStyle::Decoupled], None, None).is_err());
}

#[test]
fn small_convergence_study() {
    let model = WienerSpaceModel::inverse_square(64).unwrap();
    let grid = TimeGrid::uniform(1.0, 64).unwrap();
    let ranks = [2, 4, 8, 16, 32, 64];
    let recs = convergence_study(&model, &ConvergenceTarget::StandardX, &ranks, &grid, 40, Seed(3)).unwrap();
    assert!(monotone_trend_test(&recs, None).pass);
    assert!(envelope_ratios(&recs, 4.0).iter().all(|(_, _, ok)| *ok));
    assert_eq!(recs.last().unwrap().max, 0.0);
}

#[test]
fn generalized_convergence_decreases() {
    let model = WienerSpaceModel::inverse_square(16).unwrap();
    let grid = TimeGrid::uniform(1.0, 32).unwrap();
    let spec = DriftSpec::smoothed_log_sequence(16, 0.25, 1.0, 0.5);
    let drift = ValidatedDrift::new(spec, AssumptionMode::B4, 200, Seed(0)).unwrap();
    let recs =
        convergence_study(&model, &ConvergenceTarget::SequenceY(drift), &[2, 4, 8, 16], &grid, 30, Seed(8)).unwrap();
    assert!(monotone_trend_test(&recs, None).pass);
    assert!(recs.windows(2).all(|w| w[0].mean > w[1].mean));
    assert_eq!(recs[3].max, 0.0);
}

#[test]
fn unit_slope_log_sobolev_exposes_generator_scale() {
    // Unit slope gives the standard process, whose gradient side is unchanged,
    // while the displayed entropy factor M/(mtP) is half of 2/(tP).
    let spec = DriftSpec::finite("unit", 1, vec![DriftComponent::certified(vec![0], Profile::Linear { slope: 1.0 })]);
    let unit = Diffusion::Generalized(ValidatedDrift::new(spec, AssumptionMode::A, 100, Seed(0)).unwrap());
    let logistic = REGISTRY.iter().find(|t| t.name == "logistic").unwrap().f;
    let mut o = McOptions::new(400_000, Seed(2));
    o.antithetic = true;
    let g = check_rlsi(&logistic, 1.0, &at(0.0, 0.0), &unit, &Method::MonteCarlo(o)).unwrap();
    let s = check_rlsi(&logistic, 1.0, &at(0.0, 0.0), &Diffusion::Standard, &Method::Quadrature).unwrap();
    assert_eq!(s.verdict, CheckVerdict::Holds);
    assert_eq!(g.verdict, CheckVerdict::Violated);
    assert!(g.lhs.lo <= s.lhs.value && s.lhs.value <= g.lhs.hi);
    assert!((g.rhs.value / s.rhs.value - 0.5).abs() < 0.01);
}
