#![allow(clippy::approx_constant)]

//! The circle factor `t ↦ t + α2 + δ2 ln Ψ3(t)`: rotation numbers,
//! periodic orbits and Arnold tongues.

use crate::error::CircleError;
use crate::functions::TrigPoly;
use crate::hypotheses::sup_log_derivative;
use crate::roots::{bisect, golden_max, periodic_sign_changes};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;
use std::io::Write;

pub const DEFAULT_Q_MAX: u32 = 12;
pub const DEFAULT_GRID_N: usize = 4096;
const ROOT_TOL: f64 = 1e-12;
const BOUNDARY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct CircleMap {
    pub alpha2: f64,
    pub delta2: f64,
    pub psi3: TrigPoly,
}

/// Rational `p/q` with `0 <= p < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Ratio {
    pub p: u32,
    pub q: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationEstimate {
    pub rho: f64,
    pub n_iters: u64,
    /// Birkhoff bound `1/n` on `|rho - true rotation number|`.
    pub error_bound: f64,
    pub locked: Option<Ratio>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicOrbit {
    /// Orbit points in iteration order, each in `[0, 2π)`.
    pub points: Vec<f64>,
    /// `d(F3^q)/dt` along the orbit.
    pub multiplier: f64,
    pub stable: bool,
}

/// Result of a `p/q` periodic-orbit search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicSearch {
    pub orbits: Vec<PeriodicOrbit>,
    /// `min |L^q(t) - t - 2πp|` over the search grid.
    pub min_residual: f64,
    pub argmin: f64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl CircleMap {
    pub fn new(alpha2: f64, delta2: f64, psi3: TrigPoly) -> Self {
        Self { alpha2, delta2, psi3 }
    }

    /// Degree-one lift `L(t) = t + α2 + δ2 ln Ψ3(t)` on the real line.
    pub fn lift(&self, t: f64) -> f64 {
        t + self.displacement(t)
    }

    /// `L(t) - t`, a `2π`-periodic function.
    pub fn displacement(&self, t: f64) -> f64 {
        if self.delta2 == 0.0 {
            return self.alpha2;
        }
        self.alpha2 + self.delta2 * self.psi3.value(t).ln()
    }

    pub fn derivative(&self, t: f64) -> f64 {
        if self.delta2 == 0.0 {
            return 1.0;
        }
        let d = self.psi3.eval_derivs(t, 1);
        1.0 + self.delta2 * d[1] / d[0]
    }

    /// The map itself, reduced to `[0, 2π)`.
    pub fn step(&self, t: f64) -> f64 {
        crate::model::wrap_angle(self.lift(t))
    }

    /// `δ2 · sup|Ψ3'/Ψ3|`; the lift is increasing when this is below one.
    pub fn injectivity_product(&self) -> f64 {
        if self.delta2 == 0.0 {
            0.0
        } else {
            self.delta2 * sup_log_derivative(&self.psi3)
        }
    }

    fn require_h5(&self) -> Result<(), CircleError> {
        let product = self.injectivity_product();
        if product < 1.0 {
            Ok(())
        } else {
            Err(CircleError::H5Violated { product })
        }
    }

    /// `L^q(t) - t - 2πp` via reduced iterates; exact lift arithmetic.
    pub fn periodic_residual(&self, p: i64, q: u32, t: f64) -> f64 {
        let mut s = t;
        let mut total = 0.0;
        for _ in 0..q {
            let d = self.displacement(s);
            total += d;
            s = crate::model::wrap_angle(s + d);
        }
        total - TAU * p as f64
    }

    /// Birkhoff average of the displacement after `burn` discarded steps.
    pub fn rotation_number(&self, t0: f64, burn: u64, n: u64, q_max: u32) -> Result<RotationEstimate, CircleError> {
        self.require_h5()?;
        Ok(self.rotation_number_unchecked(t0, burn, n, q_max))
    }

    pub(crate) fn rotation_number_unchecked(&self, t0: f64, burn: u64, n: u64, q_max: u32) -> RotationEstimate {
        let n = n.max(1);
        let mut t = crate::model::wrap_angle(t0);
        for _ in 0..burn {
            t = self.step(t);
        }
        // compensated sum of displacements
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for _ in 0..n {
            let d = self.displacement(t);
            let y = d - comp;
            let s = sum + y;
            comp = (s - sum) - y;
            sum = s;
            t = crate::model::wrap_angle(t + d);
        }
        let mut rho = (sum / (TAU * n as f64)).rem_euclid(1.0);
        if rho >= 1.0 - 1e-12 {
            rho = 0.0;
        }
        let locked = detect_lock(rho, 2.0 / n as f64, q_max);
        RotationEstimate { rho, n_iters: n, error_bound: 1.0 / n as f64, locked }
    }

    /// All `p/q` periodic orbits (lift winding `p`, period `q`).
    pub fn find_periodic_orbits(&self, p: i64, q: u32, grid_n: usize) -> Result<PeriodicSearch, CircleError> {
        if q == 0 || gcd(p.unsigned_abs(), q as u64) != 1 {
            return Err(CircleError::InvalidPeriod { p, q });
        }
        self.require_h5()?;
        match self.periodic_search(p, q, grid_n) {
            Err(CircleError::GridTooCoarse { .. }) => self.periodic_search(p, q, grid_n * 8),
            other => other,
        }
    }

    fn periodic_search(&self, p: i64, q: u32, grid_n: usize) -> Result<PeriodicSearch, CircleError> {
        let grid_n = grid_n.max(8);
        let h = TAU / grid_n as f64;
        let res = |t: f64| self.periodic_residual(p, q, t);
        let vals: Vec<f64> = (0..grid_n).map(|i| res(h * i as f64)).collect();
        let (imin, min_residual) =
            vals.iter().map(|v| v.abs()).enumerate().fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        if vals.iter().all(|v| v.abs() < 1e-13) {
            return Err(CircleError::Degenerate);
        }
        let changes = periodic_sign_changes(&vals);
        for w in changes.windows(2) {
            if w[1] == w[0] + 1 {
                return Err(CircleError::GridTooCoarse { grid_n });
            }
        }
        if changes.len() >= 2 && changes[0] == 0 && *changes.last().unwrap() == grid_n - 1 {
            return Err(CircleError::GridTooCoarse { grid_n });
        }
        let mut roots: Vec<f64> = changes
            .iter()
            .map(|&i| {
                let a = h * i as f64;
                crate::model::wrap_angle(bisect(&res, a, a + h, ROOT_TOL))
            })
            .collect();
        roots.sort_by(f64::total_cmp);

        let mut orbits: Vec<PeriodicOrbit> = Vec::new();
        let mut used = vec![false; roots.len()];
        for i in 0..roots.len() {
            if used[i] {
                continue;
            }
            let mut pts = Vec::with_capacity(q as usize);
            let mut mult = 1.0;
            let mut t = roots[i];
            for _ in 0..q {
                pts.push(t);
                mult *= self.derivative(t);
                // mark the root this orbit point corresponds to
                if let Some(j) = roots.iter().position(|&r| crate::model::angle_diff(r, t).abs() < 1e-7) {
                    used[j] = true;
                }
                t = self.step(t);
            }
            orbits.push(PeriodicOrbit { points: pts, multiplier: mult, stable: mult.abs() < 1.0 });
        }
        Ok(PeriodicSearch { orbits, min_residual, argmin: h * imin as f64 })
    }

    /// Whether `L^q(t) - t - 2πp` attains zero: its refined minimum is
    /// `<= 0` and refined maximum `>= 0`.
    pub fn has_periodic_orbit(&self, p: i64, q: u32, grid_n: usize) -> bool {
        let (lo, hi) = self.residual_range(p, q, grid_n);
        lo <= 0.0 && hi >= 0.0
    }

    /// Refined `(min, max)` of the periodic residual over the circle.
    pub fn residual_range(&self, p: i64, q: u32, grid_n: usize) -> (f64, f64) {
        let h = TAU / grid_n as f64;
        let res = |t: f64| self.periodic_residual(p, q, t);
        let vals: Vec<f64> = (0..grid_n).map(|i| res(h * i as f64)).collect();
        let imax = (0..grid_n).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
        let imin = (0..grid_n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
        let cmax = h * imax as f64;
        let cmin = h * imin as f64;
        let hi = golden_max(&res, cmax - h, cmax + h, 1e-12).1.max(vals[imax]);
        let lo = -golden_max(&|t| -res(t), cmin - h, cmin + h, 1e-12).1.min(-vals[imin]);
        (lo, hi)
    }
}

/// Nearest `p/q` (q <= q_max) to `rho` in circular distance, if within `tol`.
pub fn detect_lock(rho: f64, tol: f64, q_max: u32) -> Option<Ratio> {
    let mut best: Option<(f64, Ratio)> = None;
    for q in 1..=q_max.max(1) {
        for p in 0..q {
            if gcd(p as u64, q as u64) != 1 {
                continue;
            }
            let d = (rho - p as f64 / q as f64).rem_euclid(1.0);
            let d = d.min(1.0 - d);
            if d <= tol && best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, Ratio { p, q }));
            }
        }
    }
    best.map(|(_, r)| r)
}

/// Endpoints of the `p/q` tongue at fixed `delta2` inside `bracket`.
///
/// The bracket is scanned for a change of the predicate "a `p/q` orbit
/// exists"; each change is then bisected in `α2` to `1e-8`.
pub fn tongue_boundary(psi3: &TrigPoly, p: i64, q: u32, delta2: f64, bracket: (f64, f64)) -> Result<(f64, f64), CircleError> {
    tongue_boundary_with(psi3, p, q, delta2, bracket, DEFAULT_GRID_N)
}

pub fn tongue_boundary_with(
    psi3: &TrigPoly,
    p: i64,
    q: u32,
    delta2: f64,
    bracket: (f64, f64),
    grid_n: usize,
) -> Result<(f64, f64), CircleError> {
    let (lo, hi) = bracket;
    let probe = CircleMap::new(lo, delta2, psi3.clone());
    probe.require_h5()?;
    let inside = |a: f64| CircleMap::new(a, delta2, psi3.clone()).has_periodic_orbit(p, q, grid_n);
    const SCAN: usize = 256;
    let pts: Vec<f64> = (0..=SCAN).map(|i| lo + (hi - lo) * i as f64 / SCAN as f64).collect();
    let flags: Vec<bool> = pts.iter().map(|&a| inside(a)).collect();
    let enter = (0..SCAN).find(|&i| !flags[i] && flags[i + 1]);
    let leave = (0..SCAN).rev().find(|&i| flags[i] && !flags[i + 1]);
    let boundary = |a0: f64, a1: f64, in_at_a1: bool| {
        let (mut out, mut inn) = if in_at_a1 { (a0, a1) } else { (a1, a0) };
        while (inn - out).abs() > BOUNDARY_TOL {
            let m = 0.5 * (inn + out);
            if inside(m) {
                inn = m;
            } else {
                out = m;
            }
        }
        0.5 * (inn + out)
    };
    match (enter, leave) {
        (Some(e), Some(l)) => Ok((boundary(pts[e], pts[e + 1], true), boundary(pts[l], pts[l + 1], false))),
        _ => {
            // zero-width tongue: a single α2 where the orbit exists
            if delta2 == 0.0 {
                if let Some(a) = rigid_tongue_point(p, q, lo, hi) {
                    return Ok((a, a));
                }
            }
            Err(CircleError::NotBracketed { lo, hi })
        }
    }
}

fn rigid_tongue_point(p: i64, q: u32, lo: f64, hi: f64) -> Option<f64> {
    let a = TAU * p as f64 / q as f64;
    (lo..=hi).contains(&a).then_some(a)
}

/// A rectangle in the `(α2, δ2)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct ScanRegion {
    pub alpha2_lo: f64,
    pub alpha2_hi: f64,
    pub delta2_lo: f64,
    pub delta2_hi: f64,
}

/// Grid coordinate `i` of `n` points on `[lo, hi]`, endpoints included.
pub fn axis_value(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if n <= 1 {
        lo
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TongueCell {
    pub alpha2: f64,
    pub delta2: f64,
    pub rho: f64,
    pub locked: Option<Ratio>,
    pub valid: bool,
}

/// Row-major raster: `cells[j * nx + i]` at `(α2_i, δ2_j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TongueGrid {
    pub region: ScanRegion,
    pub nx: usize,
    pub ny: usize,
    pub cells: Vec<TongueCell>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSettings {
    pub q_max: u32,
    pub burn: u64,
    pub iters: u64,
    pub t0: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self { q_max: DEFAULT_Q_MAX, burn: 1000, iters: 10_000, t0: 0.0 }
    }
}

/// Rotation number of one `(α2, δ2)` cell; cells violating H5 are invalid.
pub fn scan_cell(psi3: &TrigPoly, sup: f64, alpha2: f64, delta2: f64, s: &ScanSettings) -> TongueCell {
    if delta2 * sup >= 1.0 {
        return TongueCell { alpha2, delta2, rho: f64::NAN, locked: None, valid: false };
    }
    let est = CircleMap::new(alpha2, delta2, psi3.clone()).rotation_number_unchecked(s.t0, s.burn, s.iters, s.q_max);
    TongueCell { alpha2, delta2, rho: est.rho, locked: est.locked, valid: true }
}

pub fn tongue_scan(psi3: &TrigPoly, region: ScanRegion, nx: usize, ny: usize, s: &ScanSettings) -> TongueGrid {
    let sup = sup_log_derivative(psi3);
    let cells = (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % nx, k / nx);
            let a = axis_value(region.alpha2_lo, region.alpha2_hi, nx, i);
            let d = axis_value(region.delta2_lo, region.delta2_hi, ny, j);
            scan_cell(psi3, sup, a, d, s)
        })
        .collect();
    TongueGrid { region, nx, ny, cells }
}

pub const TONGUE_CSV_HEADER: &str = "alpha2,delta2,rho,locked_p,locked_q,valid";

/// One CSV row; unlocked or invalid cells leave the ratio fields empty.
pub fn tongue_csv_row(c: &TongueCell) -> String {
    let (p, q) = match c.locked {
        Some(r) => (r.p.to_string(), r.q.to_string()),
        None => (String::new(), String::new()),
    };
    let rho = if c.valid { format!("{}", c.rho) } else { String::new() };
    format!("{},{},{},{},{},{}", c.alpha2, c.delta2, rho, p, q, c.valid as u8)
}

impl TongueGrid {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{TONGUE_CSV_HEADER}")?;
        for c in &self.cells {
            writeln!(w, "{}", tongue_csv_row(c))?;
        }
        Ok(())
    }

    pub fn cell(&self, i: usize, j: usize) -> &TongueCell {
        &self.cells[j * self.nx + i]
    }
}
