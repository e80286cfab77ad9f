#![allow(clippy::approx_constant)]

use proptest::prelude::*;
use rankone::hypotheses::validate;
use rankone::model::{diagnose_dissipativity, RegionGrid};
use rankone::{MapError, Model, ModelFunctions, ModelParams, PhaseState};
use std::f64::consts::TAU;

fn preset(k: usize) -> Model {
    let p = match k {
        5 => ModelParams { eps1: 0.105, eps2: 0.0, alpha1: 6.2831, alpha2: 3.14155, delta: 2.0, delta1: 5.0, delta2: 0.0, b: 0.5 },
        6 => ModelParams { eps1: 0.1, eps2: 0.0, alpha1: 6.2832, alpha2: 4.4407, delta: 2.0, delta1: 10.0, delta2: 0.001, b: 0.5 },
        7 => ModelParams { eps1: 0.2, eps2: 0.1, alpha1: 6.2832, alpha2: 3.1416, delta: 2.0, delta1: 5.0, delta2: 0.001, b: 0.5 },
        _ => ModelParams { eps1: 0.2, eps2: 0.1, alpha1: 6.2832, alpha2: 1.5708, delta: 2.0, delta1: 5.0, delta2: 1e-7, b: 0.5 },
    };
    Model::sine_family(p)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[test]
fn fig5_one_step_image() {
    // mpmath, 30 digits
    let s = preset(5).eval_map(&PhaseState::new(0.6961, 1.3277, 0.5856)).unwrap();
    assert!((s.x - 3.800_491_338_501_236).abs() < 1e-12);
    assert!((s.y - 1.260_640_003_457_888_4).abs() < 1e-13);
    assert!((s.t - 3.727_15).abs() < 1e-12);
}

#[test]
fn fig7_planar_image_at_frozen_period_two_point() {
    let ts = 0.492_954_526_942_835_1;
    let m = preset(7);
    let (x, y) = m.eval_planar(0.8394, 1.3789, ts).unwrap();
    assert!((x - 6.244_095_029_523_257).abs() < 1e-11);
    assert!((y - 1.559_127_821_723_895_5).abs() < 1e-13);
    let full = m.eval_map(&PhaseState::new(0.8394, 1.3789, ts)).unwrap();
    assert_eq!((full.x, full.y), (x, y));
    assert!((full.t - 3.635_007_658_222_706).abs() < 1e-12);
}

#[test]
fn radial_collapse_is_independent_of_frozen_t() {
    let m = Model::sine_family(ModelParams { eps1: 0.0, eps2: 0.0, delta1: 1.0, ..Default::default() });
    for t in [0.0, 1.0, 4.0] {
        assert_eq!(m.eval_planar(0.3, 1.5, t).unwrap().1, 1.25);
    }
}

#[test]
fn sine_family_h5_threshold() {
    let r = validate(&ModelParams { delta2: 0.001, ..preset(6).params }, &ModelFunctions::sine_family());
    // maximiser of |cos t / (1.1 + sin t)| is sin t = -1/1.1
    let s = -1.0 / 1.1f64;
    let oracle = (1.0 - s * s).sqrt() / (1.1 + s);
    assert!((r.sup_log_deriv_psi3 - oracle).abs() < 1e-9);
    assert!((r.sup_log_deriv_psi3 - 2.1822).abs() < 1e-3);
    assert!((r.delta2_threshold - 0.45826).abs() < 1e-5);
    assert!(r.get("H5").unwrap().pass);
    let r = validate(&ModelParams { delta2: 0.5, ..preset(6).params }, &ModelFunctions::sine_family());
    assert!(!r.get("H5").unwrap().pass);
}

#[test]
fn fig5_radial_rate_near_circle() {
    let m = preset(5);
    let rep = diagnose_dissipativity(&m, &RegionGrid { y_lo: 1.0, y_hi: 1.05, n: 64 });
    assert_eq!(rep.skipped, 0);
    let oracle = 2.0 * (0.05 + 0.105 * 2.1);
    assert!((rep.max_radial_rate - oracle).abs() < 1e-12);
}

/// For the sine family with δ = 2 the log terms cancel:
/// det DF = 2 w (1 + ε1 cos x) L'(t) with w = (y - 1) + ε1 (1.1 + sin x).
fn fig7_det_oracle(y_lo: f64, y_hi: f64, n: usize) -> f64 {
    let (e1, d2) = (0.2, 0.001);
    let mut best = 0.0f64;
    for i in 0..n {
        let x = TAU * i as f64 / n as f64;
        for j in 0..n {
            let y = y_lo + (y_hi - y_lo) * j as f64 / (n - 1) as f64;
            for k in 0..n {
                let t = TAU * k as f64 / n as f64;
                let w = (y - 1.0) + e1 * (1.1 + x.sin());
                let d = 2.0 * w * (1.0 + e1 * x.cos()) * (1.0 + d2 * t.cos() / (1.1 + t.sin()));
                best = best.max(d.abs());
            }
        }
    }
    best
}

#[test]
fn fig7_determinant_near_circle() {
    let m = preset(7);
    let wide = diagnose_dissipativity(&m, &RegionGrid { y_lo: 1.0, y_hi: 1.2, n: 64 });
    assert_eq!(wide.skipped, 0);
    assert!(rel(wide.max_abs_det, fig7_det_oracle(1.0, 1.2, 64)) < 1e-10);
    let thin = diagnose_dissipativity(&m, &RegionGrid { y_lo: 1.0, y_hi: 1.05, n: 64 });
    assert!(rel(thin.max_abs_det, fig7_det_oracle(1.0, 1.05, 64)) < 1e-10);
    assert!(thin.max_abs_det < 1.0, "{thin:?}");
}

#[test]
fn log_domain_reports_value() {
    let m = Model::sine_family(ModelParams { eps1: 0.0, ..Default::default() });
    match m.eval_map(&PhaseState::new(0.0, 1.0, 0.0)) {
        Err(MapError::LogDomain { value }) => assert_eq!(value, 0.0),
        other => panic!("{other:?}"),
    }
}

fn state() -> impl Strategy<Value = PhaseState> {
    (0.0..TAU, 1.02..1.48f64, 0.0..TAU).prop_map(|(x, y, t)| PhaseState::new(x, y, t))
}

fn fd_jacobian(m: &Model, s: &PhaseState) -> [[f64; 3]; 3] {
    let h = 1e-6;
    let mut j = [[0.0; 3]; 3];
    for c in 0..3 {
        let shift = |d: f64| {
            let mut v = [s.x, s.y, s.t];
            v[c] += d;
            let r = m.eval_map(&PhaseState { x: v[0], y: v[1], t: v[2] }).unwrap();
            [r.x, r.y, r.t]
        };
        let (p, q) = (shift(h), shift(-h));
        for r in 0..3 {
            let mut d = p[r] - q[r];
            if r != 1 {
                d = rankone::model::angle_diff(p[r], q[r]);
            }
            j[r][c] = d / (2.0 * h);
        }
    }
    j
}

proptest! {
    #[test]
    fn jacobian_matches_central_differences(k in 5usize..9, s in state()) {
        let m = preset(k);
        let a = m.eval_jacobian(&s).unwrap().0;
        let f = fd_jacobian(&m, &s);
        let scale = a.iter().flatten().fold(1.0f64, |acc, v| acc.max(v.abs()));
        for r in 0..3 {
            for c in 0..3 {
                prop_assert!((a[r][c] - f[r][c]).abs() / scale <= 1e-6, "({r},{c}): {} vs {}", a[r][c], f[r][c]);
            }
        }
        prop_assert_eq!(a[2][0], 0.0);
        prop_assert_eq!(a[2][1], 0.0);
    }

    #[test]
    fn determinant_telescopes(s in state(), n in 1usize..100) {
        // ln|det D(F^n)| from a Gram-Schmidt QR of the accumulated product
        let m = preset(7);
        let mut q = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let (mut log_r, mut log_dets) = (0.0, 0.0);
        let mut sign_dets = 1.0f64;
        let mut z = s;
        for _ in 0..n {
            let j = m.eval_jacobian(&z).unwrap();
            let mut a = [[0.0; 3]; 3];
            for r in 0..3 {
                for c in 0..3 {
                    a[r][c] = (0..3).map(|k| j.0[r][k] * q[k][c]).sum();
                }
            }
            let mut cols: Vec<[f64; 3]> = (0..3).map(|c| [a[0][c], a[1][c], a[2][c]]).collect();
            for c in 0..3 {
                for p in 0..c {
                    let d: f64 = (0..3).map(|k| cols[c][k] * cols[p][k]).sum();
                    for k in 0..3 {
                        cols[c][k] -= d * cols[p][k];
                    }
                }
                let nrm = cols[c].iter().map(|v| v * v).sum::<f64>().sqrt();
                log_r += nrm.ln();
                cols[c] = cols[c].map(|v| v / nrm);
            }
            for r in 0..3 {
                for c in 0..3 {
                    q[r][c] = cols[c][r];
                }
            }
            let d = j.det();
            log_dets += d.abs().ln();
            sign_dets *= d.signum();
            z = m.eval_map(&z).unwrap();
            if !(0.6..=1.9).contains(&z.y) {
                break;
            }
        }
        let sign_qr = rankone::Jacobian3(q).det().signum();
        prop_assert_eq!(sign_qr, sign_dets);
        prop_assert!((log_r - log_dets).abs() <= 1e-8, "{log_r} vs {log_dets}");
    }

    #[test]
    fn angles_wrap_and_are_periodic(k in 5usize..9, s in state()) {
        let m = preset(k);
        let a = m.eval_map(&s).unwrap();
        prop_assert!((0.0..TAU).contains(&a.x) && (0.0..TAU).contains(&a.t));
        let b = m.eval_map(&PhaseState { x: s.x + TAU, ..s }).unwrap();
        prop_assert!(rankone::model::angle_diff(a.x, b.x).abs() < 1e-12);
        prop_assert!((a.y - b.y).abs() < 1e-12);
    }

    #[test]
    fn uncoupled_planar_part_ignores_t(s in state(), t2 in 0.0..TAU) {
        let m = preset(6);
        let a = m.eval_map(&s).unwrap();
        let b = m.eval_map(&PhaseState { t: t2, ..s }).unwrap();
        prop_assert_eq!((a.x, a.y), (b.x, b.y));
    }
}
