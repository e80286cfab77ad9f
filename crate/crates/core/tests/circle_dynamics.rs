#![allow(clippy::approx_constant)]

use proptest::prelude::*;
use rankone::circle::{scan_cell, tongue_boundary, tongue_scan, CircleMap, ScanRegion, ScanSettings, DEFAULT_GRID_N};
use rankone::hypotheses::sup_log_derivative;
use rankone::TrigPoly;
use std::f64::consts::{PI, TAU};

fn sine() -> TrigPoly {
    TrigPoly::shifted_sine(1.1, 1.0)
}

#[test]
fn lift_value_at_zero() {
    let m = CircleMap::new(0.0, 0.2, sine());
    assert!((m.lift(0.0) - 0.2 * 1.1f64.ln()).abs() < 1e-15);
    assert!((m.lift(0.0) - 0.019_062_0).abs() < 1e-7);
}

#[test]
fn fig6_rotation_number() {
    let m = CircleMap::new(4.4407, 0.001, sine());
    let est = m.rotation_number(0.5635, 1000, 100_000, 12).unwrap();
    // long-orbit oracle on the lift
    let n = 1_000_000u64;
    let mut t = 0.5635f64;
    for _ in 0..n {
        t += 4.4407 + 0.001 * (1.1 + t.sin()).ln();
    }
    let oracle = (t - 0.5635) / (TAU * n as f64);
    assert!((oracle - 0.70676).abs() < 1e-3);
    assert!((est.rho - oracle).abs() < 1e-4, "{} vs {oracle}", est.rho);
    assert!(est.locked.is_none());
}

#[test]
fn zero_fixed_points_with_multipliers() {
    let m = CircleMap::new(0.0, 0.2, sine());
    let s = m.find_periodic_orbits(0, 1, DEFAULT_GRID_N).unwrap();
    let ta = PI + (0.1f64).asin();
    let tb = TAU - (0.1f64).asin();
    let mult = |t: f64| 1.0 + 0.2 * t.cos() / (1.1 + t.sin());
    assert_eq!(s.orbits.len(), 2);
    let a = s.orbits.iter().find(|o| (o.points[0] - ta).abs() < 1e-9).expect("sink");
    let b = s.orbits.iter().find(|o| (o.points[0] - tb).abs() < 1e-9).expect("source");
    assert!((a.multiplier - mult(ta)).abs() < 1e-9 && a.stable);
    assert!((b.multiplier - mult(tb)).abs() < 1e-9 && !b.stable);
    assert!((a.points[0] - 3.241_760).abs() < 1e-6 && (a.multiplier - 0.801_00).abs() < 1e-5);
    assert!((b.points[0] - 6.183_018).abs() < 1e-6 && (b.multiplier - 1.199_00).abs() < 1e-5);
}

#[test]
fn fig7_near_period_two() {
    let s = CircleMap::new(3.1416, 0.001, sine()).find_periodic_orbits(1, 2, DEFAULT_GRID_N).unwrap();
    assert!(s.min_residual < 1e-3);
}

#[test]
fn zero_one_widths_scale_linearly() {
    let w: Vec<f64> = [0.05, 0.1, 0.2]
        .iter()
        .map(|&d| {
            let (lo, hi) = tongue_boundary(&sine(), 0, 1, d, (-1.0, 1.0)).unwrap();
            hi - lo
        })
        .collect();
    assert!((w[1] - 2.0 * w[0]).abs() < 1e-6);
    assert!((w[2] - 4.0 * w[0]).abs() < 1e-6);
    assert!((w[0] - 3.044_52 * 0.05).abs() < 1e-6);
}

#[test]
fn locked_cell() {
    let c = scan_cell(&sine(), sup_log_derivative(&sine()), 0.1, 0.2, &ScanSettings::default());
    assert!(c.valid);
    let r = c.locked.unwrap();
    assert_eq!((r.p, r.q), (0, 1));
}

#[test]
fn rigid_row_of_small_scan() {
    let g = tongue_scan(&sine(), ScanRegion { alpha2_lo: 1.0, alpha2_hi: 2.0, delta2_lo: 0.0, delta2_hi: 0.1 }, 2, 2, &ScanSettings::default());
    for i in 0..2 {
        let c = g.cell(i, 0);
        assert!((c.rho - c.alpha2 / TAU).abs() < 1e-9);
        assert!(c.locked.is_none());
    }
}

proptest! {
    #[test]
    fn lift_has_degree_one(t in -50.0..50.0f64, a in 0.0..TAU, d in 0.0..0.45f64) {
        let m = CircleMap::new(a, d, sine());
        prop_assert!((m.lift(t + TAU) - m.lift(t) - TAU).abs() < 1e-12);
    }

    #[test]
    fn rotation_number_ignores_base_point(t0 in 0.0..TAU, a in 0.0..TAU, d in 0.0..0.4f64) {
        let m = CircleMap::new(a, d, sine());
        let n = 20_000;
        let r0 = m.rotation_number(0.0, 0, n, 12).unwrap().rho;
        let r1 = m.rotation_number(t0, 0, n, 12).unwrap().rho;
        let diff = (r0 - r1).abs();
        prop_assert!(diff.min(1.0 - diff) <= 2.0 / n as f64, "{r0} vs {r1}");
    }

    #[test]
    fn orbit_counts_are_even(a in 0.0..TAU, d in 0.01..0.4f64, q in 1u32..4) {
        let m = CircleMap::new(a, d, sine());
        for p in 0..q as i64 {
            if let Ok(s) = m.find_periodic_orbits(p, q, DEFAULT_GRID_N) {
                prop_assert_eq!(s.orbits.len() % 2, 0);
            }
        }
    }
}
