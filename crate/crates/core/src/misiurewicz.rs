//! Finite-horizon evidence for the Misiurewicz, turn-nondegeneracy and
//! mixing conditions on the limit family `h_a`. Nothing here is a proof.

use crate::functions::ModelFunctions;
use crate::limit::LimitFamily;
use crate::model::{angle_diff, wrap_angle};
use serde::Serialize;
use std::f64::consts::TAU;

/// Largest power searched for `Q^p > 0`.
pub const MAX_MIXING_POWER: u32 = 16;
const INCLUSION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct TurningPoint {
    pub x: f64,
    pub h2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionResult {
    pub pass: bool,
    pub value: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransitionStructure {
    /// Monotonicity intervals as lift endpoints `[lo, hi]`, `lo < hi <= lo + 2π`.
    pub intervals: Vec<[f64; 2]>,
    /// Lift image `[min, max]` of each interval.
    pub images: Vec<[f64; 2]>,
    pub q: Vec<Vec<u8>>,
    /// Smallest `p <= 16` with every entry of `Q^p` positive.
    pub mixing_power: Option<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MisiurewiczReport {
    pub non_rigorous: bool,
    pub critical_points: Vec<TurningPoint>,
    pub delta0: f64,
    /// The `δ < δ0` used for the expansion conditions.
    pub delta: f64,
    pub horizon: u32,
    pub samples: usize,
    pub cond_1a: ConditionResult,
    pub cond_1b: ConditionResult,
    pub cond_2a: ConditionResult,
    pub cond_2b: ConditionResult,
    pub b0: f64,
    pub lambda0: f64,
    pub min_abs_deriv_outside: f64,
    pub mixing_flag: bool,
    pub transitions: TransitionStructure,
}

fn dist_to_set(x: f64, set: &[f64]) -> f64 {
    set.iter().map(|&c| angle_diff(x, c).abs()).fold(f64::INFINITY, f64::min)
}

/// `min |h'|` over a grid of the circle with the `delta0`-neighbourhoods of
/// `centers` removed. Returns `(min, argmin)`.
pub fn min_abs_derivative_outside(fam: &LimitFamily, centers: &[f64], delta0: f64, grid: usize) -> (f64, f64) {
    (0..grid)
        .map(|i| TAU * i as f64 / grid as f64)
        .filter(|&x| dist_to_set(x, centers) >= delta0)
        .map(|x| (fam.deriv(x).abs(), x))
        .fold((f64::INFINITY, f64::NAN), |a, b| if b.0 < a.0 { b } else { a })
}

/// Monotonicity intervals of `h`, their lift images and the transition matrix.
pub fn transition_structure(fam: &LimitFamily) -> TransitionStructure {
    let c = fam.turning_points();
    if c.is_empty() {
        let lo = fam.lift(0.0);
        let covers = fam.lift(TAU) - lo >= TAU - INCLUSION_SLACK;
        let q = vec![vec![u8::from(covers)]];
        return TransitionStructure {
            intervals: vec![[0.0, TAU]],
            images: vec![[lo, lo + TAU]],
            mixing_power: covers.then_some(1),
            q,
        };
    }
    let r = c.len();
    let intervals: Vec<[f64; 2]> = (0..r).map(|i| [c[i], if i + 1 < r { c[i + 1] } else { c[0] + TAU }]).collect();
    let images: Vec<[f64; 2]> = intervals
        .iter()
        .map(|&[a, b]| {
            let (ha, hb) = (fam.lift(a), fam.lift(b));
            [ha.min(hb), ha.max(hb)]
        })
        .collect();
    let q: Vec<Vec<u8>> = images
        .iter()
        .map(|&[lo, hi]| {
            intervals
                .iter()
                .map(|&[a, b]| {
                    // smallest shift placing J_m at or above lo
                    let k = ((lo - INCLUSION_SLACK - a) / TAU).ceil();
                    u8::from(b + k * TAU <= hi + INCLUSION_SLACK)
                })
                .collect()
        })
        .collect();
    let mixing_power = mixing_power(&q);
    TransitionStructure { intervals, images, q, mixing_power }
}

fn mixing_power(q: &[Vec<u8>]) -> Option<u32> {
    let r = q.len();
    let mut pow = q.to_vec();
    for p in 1..=MAX_MIXING_POWER {
        if pow.iter().all(|row| row.iter().all(|&v| v > 0)) {
            return Some(p);
        }
        pow = (0..r)
            .map(|i| (0..r).map(|j| u8::from((0..r).any(|k| pow[i][k] > 0 && q[k][j] > 0))).collect())
            .collect();
    }
    None
}

/// Evidence for conditions (1a), (1b), (2a), (2b) plus the mixing data.
///
/// Expansion is measured with `δ = δ0/2` on `samples` equally spaced
/// orbits, each followed until it enters `C_δ` or reaches the horizon.
/// `λ0` is the minimum over runs of `(1/n) ln|(hⁿ)'|` at the end of the run.
pub fn misiurewicz_report(fam: &LimitFamily, delta0: f64, horizon: u32, samples: usize) -> MisiurewiczReport {
    let c = fam.turning_points();
    let critical_points: Vec<TurningPoint> = c.iter().map(|&x| TurningPoint { x, h2: fam.derivs(x).1 }).collect();

    let mut min_h2 = f64::INFINITY;
    for &x0 in &c {
        for k in 0..=200 {
            let x = x0 - delta0 + 2.0 * delta0 * k as f64 / 200.0;
            min_h2 = min_h2.min(fam.derivs(x).1.abs());
        }
    }
    let cond_1a = ConditionResult {
        pass: !c.is_empty() && min_h2 > 1e-8,
        value: min_h2,
        detail: format!("min |h''| on C_delta0 over {} critical points", c.len()),
    };

    let mut min_dist = f64::INFINITY;
    for &x0 in &c {
        let mut x = x0;
        for _ in 0..horizon {
            x = fam.eval(x);
            min_dist = min_dist.min(dist_to_set(x, &c));
        }
    }
    let cond_1b = ConditionResult {
        pass: !c.is_empty() && min_dist >= delta0,
        value: min_dist,
        detail: format!("min dist(h^n(c), C) for 1 <= n <= {horizon}"),
    };

    let delta = 0.5 * delta0;
    struct Run {
        logs: Vec<f64>,
        lands: bool,
    }
    let runs: Vec<Run> = (0..samples)
        .map(|j| TAU * (j as f64 + 0.5) / samples as f64)
        .filter(|&x| dist_to_set(x, &c) >= delta)
        .map(|mut x| {
            let mut acc = 0.0;
            let mut logs = Vec::new();
            let mut lands = false;
            for _ in 0..horizon {
                acc += fam.deriv(x).abs().ln();
                logs.push(acc);
                x = fam.eval(x);
                if dist_to_set(x, &c) < delta {
                    lands = dist_to_set(x, &c) < delta0;
                    break;
                }
            }
            Run { logs, lands }
        })
        .filter(|r| !r.logs.is_empty())
        .collect();
    let lambda0 = runs.iter().map(|r| r.logs.last().unwrap() / r.logs.len() as f64).fold(f64::INFINITY, f64::min);
    let b0 = runs
        .iter()
        .flat_map(|r| r.logs.iter().enumerate().map(|(i, &l)| (l - lambda0 * (i + 1) as f64).exp() / delta))
        .fold(f64::INFINITY, f64::min);
    let b0_landing = runs
        .iter()
        .filter(|r| r.lands)
        .map(|r| (r.logs.last().unwrap() - lambda0 * r.logs.len() as f64).exp())
        .fold(f64::INFINITY, f64::min);
    let cond_2a = ConditionResult {
        pass: !runs.is_empty() && lambda0 > 0.0,
        value: lambda0,
        detail: format!("lambda0 = min (1/n) ln|(h^n)'| over {} runs with delta = {delta}", runs.len()),
    };
    let cond_2b = ConditionResult {
        pass: cond_2a.pass && b0_landing >= b0,
        value: b0_landing,
        detail: "min |(h^n)'| exp(-lambda0 n) over runs landing in C_delta0".into(),
    };
    let (min_outside, _) = min_abs_derivative_outside(fam, &c, delta0, 1 << 16);

    MisiurewiczReport {
        non_rigorous: true,
        critical_points,
        delta0,
        delta,
        horizon,
        samples,
        cond_1a,
        cond_1b,
        mixing_flag: lambda0.is_finite() && (lambda0 / 3.0).exp() > 2.0,
        cond_2a,
        cond_2b,
        b0,
        lambda0,
        min_abs_deriv_outside: min_outside,
        transitions: transition_structure(fam),
    }
}

/// `(∂ȳ x', ∂ȳ ȳ')` of the singular limit at `(x, ȳ = 0)`.
pub fn turn_vector(fam: &LimitFamily, funcs: &ModelFunctions, x: f64) -> [f64; 2] {
    let dpsi2 = funcs.psi2.y.value_deriv(0.0).1;
    [fam.delta1 * (1.0 + dpsi2) / funcs.psi2.x.value(x), 0.0]
}

#[derive(Debug, Clone, Serialize)]
pub struct TurnCheck {
    pub x: f64,
    pub vector: [f64; 2],
    pub nondegenerate: bool,
}

/// [`turn_vector`] at every zero of `h'`.
pub fn turn_nondegeneracy(fam: &LimitFamily, funcs: &ModelFunctions) -> Vec<TurnCheck> {
    fam.turning_points()
        .into_iter()
        .map(|x| {
            let vector = turn_vector(fam, funcs, x);
            TurnCheck { x, vector, nondegenerate: vector.iter().any(|v| v.abs() > 1e-12) }
        })
        .collect()
}

/// Circle distance from `h(c)` to the image of `c`: zero by construction.
pub fn critical_value_offsets(fam: &LimitFamily) -> Vec<f64> {
    fam.turning_points().into_iter().map(|c| angle_diff(fam.eval(c), wrap_angle(fam.lift(c))).abs()).collect()
}
