#![allow(clippy::approx_constant)]

//! The map `F = (F1, F2, F3)` on `S¹ × [1, 1+b] × S¹` and its derivative.

use crate::error::MapError;
use crate::functions::ModelFunctions;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// The eight scalar parameters of the family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub eps1: f64,
    pub eps2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub delta: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub b: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { eps1: 0.1, eps2: 0.0, alpha1: 0.0, alpha2: 0.0, delta: 2.0, delta1: 5.0, delta2: 0.0, b: 0.5 }
    }
}

/// A point `(x, y, t)`; the angles are kept in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

/// Reduce an angle to `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Signed difference `a - b` reduced to `[-π, π)`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI;
    if d >= std::f64::consts::PI {
        d - TAU
    } else {
        d
    }
}

impl PhaseState {
    pub fn new(x: f64, y: f64, t: f64) -> Self {
        Self { x: wrap_angle(x), y, t: wrap_angle(t) }
    }

    /// `(y cos x, y sin x)`.
    pub fn project(&self) -> (f64, f64) {
        let (s, c) = self.x.sin_cos();
        (self.y * c, self.y * s)
    }
}

/// Matrix of partials of `(F1, F2, F3)` with respect to `(x, y, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian3(pub [[f64; 3]; 3]);

impl Jacobian3 {
    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
}

/// A model: parameters together with the function data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub params: ModelParams,
    pub funcs: ModelFunctions,
}

/// Intermediate quantities shared by the value and the Jacobian.
struct Parts {
    log_arg: f64,
    radial: f64,
    psi1: crate::functions::PlanarEval,
    psi2: crate::functions::PlanarEval,
    psi4: crate::functions::CoupledEval,
    g: crate::functions::PlanarEval,
}

impl Model {
    pub fn new(params: ModelParams, funcs: ModelFunctions) -> Self {
        Self { params, funcs }
    }

    pub fn sine_family(params: ModelParams) -> Self {
        Self { params, funcs: ModelFunctions::sine_family() }
    }

    fn parts(&self, x: f64, y: f64, t: f64) -> Result<Parts, MapError> {
        let p = &self.params;
        let f = &self.funcs;
        let psi1 = f.psi1.eval(x, y);
        let psi2 = f.psi2.eval(x, y);
        let psi4 = f.psi4.eval(x, y, t);
        let g = f.g.eval(x, y);
        let s = y - 1.0;
        let log_arg = s + p.eps1 * (psi2.v + p.eps2 * psi4.v);
        if !(log_arg > 0.0) {
            return Err(MapError::LogDomain { value: log_arg });
        }
        let radial = s + p.eps1 * g.v;
        if radial < 0.0 && p.delta.fract() != 0.0 {
            return Err(MapError::PowerDomain { value: radial });
        }
        Ok(Parts { log_arg, radial, psi1, psi2, psi4, g })
    }

    /// Lift of the circle factor: `t + α2 + δ2 ln Ψ3(t)` (no reduction).
    pub fn circle_lift(&self, t: f64) -> Result<f64, MapError> {
        let v = self.funcs.psi3.value(t);
        if !(v > 0.0) {
            return Err(MapError::LogDomain { value: v });
        }
        Ok(t + self.params.alpha2 + self.params.delta2 * v.ln())
    }

    /// `(F1, F2)` with the fiber angle held at `t`; `x` reduced mod 2π.
    pub fn eval_planar(&self, x: f64, y: f64, t: f64) -> Result<(f64, f64), MapError> {
        let p = &self.params;
        let q = self.parts(x, y, t)?;
        let x1 = x + p.alpha1 + p.eps1 * q.psi1.v + p.delta1 * q.log_arg.ln();
        let y1 = 1.0 + q.radial.powf(p.delta);
        Ok((wrap_angle(x1), y1))
    }

    pub fn eval_map(&self, s: &PhaseState) -> Result<PhaseState, MapError> {
        let (x1, y1) = self.eval_planar(s.x, s.y, s.t)?;
        let t1 = self.circle_lift(s.t)?;
        Ok(PhaseState { x: x1, y: y1, t: wrap_angle(t1) })
    }

    /// 2×2 Jacobian of `(F1, F2)` in `(x, y)` at frozen `t`.
    pub fn planar_jacobian(&self, x: f64, y: f64, t: f64) -> Result<[[f64; 2]; 2], MapError> {
        let j = self.jacobian_at(x, y, t)?;
        Ok([[j[0][0], j[0][1]], [j[1][0], j[1][1]]])
    }

    fn jacobian_at(&self, x: f64, y: f64, t: f64) -> Result<[[f64; 3]; 3], MapError> {
        let p = &self.params;
        let q = self.parts(x, y, t)?;
        let inv = p.delta1 / q.log_arg;
        let j11 = 1.0 + p.eps1 * q.psi1.dx + inv * p.eps1 * (q.psi2.dx + p.eps2 * q.psi4.dx);
        let j12 = p.eps1 * q.psi1.dy + inv * (1.0 + p.eps1 * (q.psi2.dy + p.eps2 * q.psi4.dy));
        let j13 = inv * p.eps1 * p.eps2 * q.psi4.dt;
        let pow = p.delta * q.radial.powf(p.delta - 1.0);
        let j21 = pow * p.eps1 * q.g.dx;
        let j22 = pow * (1.0 + p.eps1 * q.g.dy);
        let psi3 = self.funcs.psi3.eval_derivs(t, 1);
        if !(psi3[0] > 0.0) {
            return Err(MapError::LogDomain { value: psi3[0] });
        }
        let j33 = 1.0 + p.delta2 * psi3[1] / psi3[0];
        Ok([[j11, j12, j13], [j21, j22, 0.0], [0.0, 0.0, j33]])
    }

    pub fn eval_jacobian(&self, s: &PhaseState) -> Result<Jacobian3, MapError> {
        self.jacobian_at(s.x, s.y, s.t).map(Jacobian3)
    }

    /// `∂F2/∂y`, the radial contraction rate.
    pub fn radial_rate(&self, x: f64, y: f64) -> Result<f64, MapError> {
        Ok(self.planar_jacobian(x, y, 0.0)?[1][1])
    }
}

/// Summary of `det DF` and `∂F2/∂y` over a box of states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DissipativityReport {
    pub max_abs_det: f64,
    pub min_abs_det: f64,
    pub distortion: f64,
    pub max_radial_rate: f64,
    pub cells: usize,
    pub skipped: usize,
}

/// Box `[0,2π) × [y_lo, y_hi] × [0,2π)` sampled with `n` points per axis
/// (angles half-open, `y` closed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionGrid {
    pub y_lo: f64,
    pub y_hi: f64,
    pub n: usize,
}

pub fn diagnose_dissipativity(model: &Model, grid: &RegionGrid) -> DissipativityReport {
    let n = grid.n.max(1);
    let ys: Vec<f64> = if n == 1 {
        vec![grid.y_lo]
    } else {
        (0..n).map(|j| grid.y_lo + (grid.y_hi - grid.y_lo) * j as f64 / (n - 1) as f64).collect()
    };
    let mut rep = DissipativityReport {
        max_abs_det: 0.0,
        min_abs_det: f64::INFINITY,
        distortion: f64::NAN,
        max_radial_rate: f64::NEG_INFINITY,
        cells: 0,
        skipped: 0,
    };
    for i in 0..n {
        let x = TAU * i as f64 / n as f64;
        for &y in &ys {
            for k in 0..n {
                let t = TAU * k as f64 / n as f64;
                match model.jacobian_at(x, y, t) {
                    Ok(j) => {
                        let d = Jacobian3(j).det().abs();
                        rep.max_abs_det = rep.max_abs_det.max(d);
                        rep.min_abs_det = rep.min_abs_det.min(d);
                        rep.max_radial_rate = rep.max_radial_rate.max(j[1][1]);
                        rep.cells += 1;
                    }
                    Err(_) => rep.skipped += 1,
                }
            }
        }
    }
    if rep.cells > 0 {
        rep.distortion = rep.max_abs_det / rep.min_abs_det;
    }
    rep
}
