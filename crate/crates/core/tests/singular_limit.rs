use proptest::prelude::*;
use rankone::limit::{
    convergence_table, critical_points, eps_for_level, eval_rescaled_map, limit_discrepancy, rescale, ConvergenceGrid, LimitFamily,
};
use rankone::misiurewicz::{misiurewicz_report, transition_structure, turn_vector};
use rankone::model::angle_diff;
use rankone::{Model, ModelFunctions, ModelParams, TrigPoly};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

fn sine() -> TrigPoly {
    TrigPoly::shifted_sine(1.1, 1.0)
}

#[test]
fn eps_closed_forms() {
    // mpmath, 30 digits
    assert!((eps_for_level(0.0, 1, 5.0) - 0.284_609_543_3).abs() < 1e-10);
    let e = eps_for_level(1.0, 2, 5.0);
    assert!((e - 0.098_936_789_5).abs() < 1e-10);
    assert!((5.0 * e.ln() - (1.0 - 4.0 * PI)).abs() < 1e-12);
}

#[test]
fn limit_map_examples() {
    let h0 = LimitFamily::new(0.0, 0.0, 5.0, sine());
    assert!((h0.eval(0.0) - 5.0 * 1.1f64.ln()).abs() < 1e-12);
    assert!((h0.eval(0.0) - 0.476_550_9).abs() < 1e-7);
    assert!((h0.deriv(FRAC_PI_2) - 1.0).abs() < 1e-12);
    let hpi = LimitFamily::new(PI, 0.0, 5.0, sine());
    for k in 0..50 {
        let x = k as f64 * 0.1257;
        assert!((hpi.lift(x) - h0.lift(x) - PI).abs() < 1e-12);
    }
}

#[test]
fn sine_critical_structure() {
    let cps = critical_points(&LimitFamily::new(0.0, 0.0, 5.0, sine())).unwrap();
    assert_eq!(cps.len(), 2);
    let second = |x: f64| -(1.1 * x.sin() + 1.0) / (1.1 + x.sin()).powi(2);
    assert!((cps[0].x - FRAC_PI_2).abs() < 1e-8);
    assert!((cps[1].x - 3.0 * FRAC_PI_2).abs() < 1e-8);
    assert!((cps[0].second - second(FRAC_PI_2)).abs() < 1e-6);
    assert!((cps[1].second - second(3.0 * FRAC_PI_2)).abs() < 1e-6);
    assert!((cps[0].second + 0.476_19).abs() < 1e-5);
    assert!((cps[1].second - 10.0).abs() < 1e-6);
}

#[test]
fn convergence_columns() {
    let p = ModelParams { delta1: 5.0, delta: 2.0, ..Default::default() };
    let rows = convergence_table(&p, &ModelFunctions::sine_family(), 1.0, 1..=10, &ConvergenceGrid::default()).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].c0_sup < w[0].c0_sup && w[1].c1_sup < w[0].c1_sup);
    }
    for r in rows.iter().filter(|r| r.eps <= 1e-4) {
        assert!(r.c0_sup <= 1e-3, "{r:?}");
    }
    assert!(rows.iter().any(|r| r.eps <= 1e-4));
    let (c0, c1) = limit_discrepancy(&p, &ModelFunctions::sine_family(), 1.0, 0.0, &ConvergenceGrid::default()).unwrap();
    assert_eq!((c0, c1), (0.0, 0.0));
}

#[test]
fn bottom_row_discrepancy_bound() {
    let f = ModelFunctions::sine_family();
    let eps = eps_for_level(0.0, 1, 5.0);
    let p = ModelParams { eps1: eps, delta1: 5.0, ..Default::default() };
    let h = LimitFamily::from_model(0.0, &p, &f);
    for k in 0..64 {
        let x = TAU * k as f64 / 64.0;
        let (x1, _) = eval_rescaled_map(&p, &f, x, 0.0).unwrap();
        let d = angle_diff(x1, h.eval(x)).abs();
        assert!((d - eps * (1.1 + x.sin())).abs() < 1e-9);
        assert!(d <= eps * 2.1 + 1e-12);
    }
}

#[test]
fn mixing_at_strong_expansion() {
    let fam = LimitFamily::new(0.0, 0.0, 100.0, sine());
    let t = transition_structure(&fam);
    assert_eq!(t.intervals.len(), 2);
    assert!(t.q.iter().flatten().all(|&v| v == 1));
    assert_eq!(t.mixing_power, Some(1));
    let weak = misiurewicz_report(&LimitFamily::new(0.0, 0.0, 1.0, sine()), 0.1, 50, 64);
    assert!(!weak.cond_2a.pass);
}

#[test]
fn turn_vectors_at_log_critical_points() {
    let fam = LimitFamily::new(0.0, 0.0, 5.0, sine());
    let f = ModelFunctions::sine_family();
    let v = turn_vector(&fam, &f, FRAC_PI_2);
    assert!((v[0] - 5.0 / 2.1).abs() < 1e-12 && v[1] == 0.0);
    let v = turn_vector(&fam, &f, 3.0 * FRAC_PI_2);
    assert!((v[0] - 50.0).abs() < 1e-9 && v[1] == 0.0);
}

proptest! {
    #[test]
    fn eps_congruence(a in 0.0..TAU, n in 1u32..8, d1 in 0.5..50.0f64) {
        let e = eps_for_level(a, n, d1);
        prop_assert!(angle_diff(d1 * e.ln(), a).abs() < 1e-10);
        prop_assert!(eps_for_level(a, n + 1, d1) < e);
    }

    #[test]
    fn rescaling_commutes(x in 0.0..TAU, ybar in 0.0..1.0f64, e1 in 0.01..0.3f64) {
        let p = ModelParams { eps1: e1, delta1: 5.0, alpha1: 1.3, ..Default::default() };
        let f = ModelFunctions::sine_family();
        let y = 1.0 + e1 * ybar;
        let (x1, y1) = Model::new(p, f.clone()).eval_planar(x, y, 0.0).unwrap();
        let (rx, ry) = rescale(e1, x1, y1);
        let (sx, sy) = eval_rescaled_map(&p, &f, x, ybar).unwrap();
        prop_assert!(angle_diff(rx, sx).abs() <= 1e-10 * sx.abs().max(1.0));
        prop_assert!((ry - sy).abs() <= 1e-10 * sy.abs().max(1.0));
    }

    #[test]
    fn limit_lift_degree_one(x in -20.0..20.0f64, a in 0.0..TAU, d1 in 0.1..100.0f64) {
        let h = LimitFamily::new(a, 0.7, d1, sine());
        prop_assert!((h.lift(x + TAU) - h.lift(x) - TAU).abs() < 1e-9);
    }
}
