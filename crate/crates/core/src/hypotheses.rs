#![allow(clippy::approx_constant)]

//! Checks of the standing hypotheses H1-H6 on a parameter/function pair.

use crate::functions::{ModelFunctions, TrigPoly};
use crate::model::ModelParams;
use crate::roots::periodic_max;
use serde::Serialize;
use std::f64::consts::TAU;

/// Points per axis used for positivity checks.
pub const POSITIVITY_GRID: usize = 4096;
/// Dense grid used before golden-section refinement of `sup|Ψ3'/Ψ3|`.
pub const LOG_DERIV_GRID: usize = 8192;
/// Preset constants such as 6.2832 exceed 2π in the fifth digit; angles
/// within this slack of `[0, 2π]` are accepted.
pub const ANGLE_SLACK: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisCheck {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalPoint {
    pub x: f64,
    /// Second derivative of `ln Ψ2(x, 0)` at the root.
    pub second: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub checks: Vec<HypothesisCheck>,
    pub sup_log_deriv_psi3: f64,
    /// `1 / sup|Ψ3'/Ψ3|`: H5 holds for `delta2` strictly below this.
    pub delta2_threshold: f64,
    pub min_psi1: f64,
    pub min_psi2: f64,
    pub min_psi3: f64,
    pub min_psi4: f64,
    pub min_g: f64,
    pub critical_points: Vec<CriticalPoint>,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&HypothesisCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &HypothesisCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// `sup_t |Ψ3'(t)/Ψ3(t)|` by a dense grid plus golden-section refinement.
pub fn sup_log_derivative(psi3: &TrigPoly) -> f64 {
    if psi3.is_constant() {
        return 0.0;
    }
    let f = |t: f64| {
        let d = psi3.eval_derivs(t, 1);
        (d[1] / d[0]).abs()
    };
    periodic_max(&f, 0.0, TAU, LOG_DERIV_GRID, 1e-10).1
}

/// Roots of `d/dx ln Ψ2(x, 0)` with the second derivative of the log at each.
pub fn log_critical_points(psi2_x: &TrigPoly, grid: usize, tol: f64) -> Vec<CriticalPoint> {
    let dlog = |x: f64| {
        let d = psi2_x.eval_derivs(x, 1);
        d[1] / d[0]
    };
    if psi2_x.is_constant() {
        return Vec::new();
    }
    crate::roots::periodic_roots(&dlog, 0.0, TAU, grid, tol)
        .into_iter()
        .map(|x| {
            let d = psi2_x.eval_derivs(x, 2);
            CriticalPoint { x, second: (d[2] * d[0] - d[1] * d[1]) / (d[0] * d[0]) }
        })
        .collect()
}

fn check(name: &'static str, pass: bool, detail: String) -> HypothesisCheck {
    HypothesisCheck { name, pass, detail }
}

fn angle_ok(a: f64) -> bool {
    (-ANGLE_SLACK..=TAU + ANGLE_SLACK).contains(&a)
}

/// Evaluate every hypothesis. Never fails: violations are report entries.
pub fn validate(p: &ModelParams, f: &ModelFunctions) -> HypothesisReport {
    let n = POSITIVITY_GRID;
    let min_psi1 = f.psi1.grid_min(p.b, n);
    let min_psi2 = f.psi2.grid_min(p.b, n);
    let min_psi3 = f.psi3.grid_min(n);
    let min_psi4 = f.psi4.grid_min(p.b, n);
    let min_g = f.g.grid_min(p.b, n);

    let mut checks = Vec::new();
    checks.push(check(
        "H1",
        (0.0..1.0).contains(&p.eps1) && (0.0..1.0).contains(&p.eps2),
        format!("eps1 = {}, eps2 = {} must lie in [0, 1)", p.eps1, p.eps2),
    ));
    checks.push(check(
        "H2",
        angle_ok(p.alpha1) && angle_ok(p.alpha2) && p.delta > 1.0 && p.delta1 > 0.0 && p.delta2 >= 0.0 && p.b > 0.0 && p.b <= 1.0,
        format!(
            "alpha1 = {}, alpha2 = {} in [0, 2pi]; delta = {} > 1; delta1 = {} > 0; delta2 = {} >= 0; b = {} in (0, 1]",
            p.alpha1, p.alpha2, p.delta, p.delta1, p.delta2, p.b
        ),
    ));
    checks.push(check("H3", min_psi3 > 0.0, format!("min psi3 = {min_psi3}")));

    let crit = if min_psi2 > 0.0 { log_critical_points(&f.psi2.x, n, 1e-10) } else { Vec::new() };
    let nondegenerate = crit.iter().all(|c| c.second.abs() >= 1e-8);
    let h4 = min_psi1 > 0.0
        && min_psi2 > 0.0
        && min_psi4 > 0.0
        && !f.psi1.is_constant()
        && !f.psi2.is_constant()
        && !f.psi4.is_constant()
        && !crit.is_empty()
        && crit.len() % 2 == 0
        && nondegenerate;
    checks.push(check(
        "H4",
        h4,
        format!(
            "min psi1 = {min_psi1}, min psi2 = {min_psi2}, min psi4 = {min_psi4}; {} critical points of ln psi2(x,0){}",
            crit.len(),
            if nondegenerate { "" } else { " (degenerate)" }
        ),
    ));

    let sup = if min_psi3 > 0.0 { sup_log_derivative(&f.psi3) } else { f64::INFINITY };
    let threshold = if sup > 0.0 { 1.0 / sup } else { f64::INFINITY };
    checks.push(check(
        "H5",
        p.delta2 * sup < 1.0,
        format!("delta2 * sup|psi3'/psi3| = {} * {} = {}", p.delta2, sup, p.delta2 * sup),
    ));
    checks.push(check("H6", min_g >= 0.0, format!("min g = {min_g}")));

    HypothesisReport {
        checks,
        sup_log_deriv_psi3: sup,
        delta2_threshold: threshold,
        min_psi1,
        min_psi2,
        min_psi3,
        min_psi4,
        min_g,
        critical_points: crit,
    }
}
