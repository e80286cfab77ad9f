#![allow(clippy::approx_constant)]

//! Planar maps: the restricted maps `G_q ∘ … ∘ G_1`, periodic points
//! and their classification.

use crate::circle::CircleMap;
use crate::error::{MapError, OrbitError};
use crate::model::{angle_diff, Model};
use serde::Serialize;

pub type Point = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

pub fn mat_vec(a: &Mat2, v: Point) -> Point {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

pub fn det2(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

/// A differentiable map of the plane or of the cylinder.
pub trait PlanarMap: Sync {
    fn eval_jac(&self, z: Point) -> Result<(Point, Mat2), MapError>;

    fn eval(&self, z: Point) -> Result<Point, MapError> {
        self.eval_jac(z).map(|(w, _)| w)
    }

    /// Whether the first coordinate is an angle taken mod 2π.
    fn periodic_x(&self) -> bool {
        false
    }

    /// `z - w`, with the first component reduced to `[-π, π)` on the cylinder.
    fn diff(&self, z: Point, w: Point) -> Point {
        if self.periodic_x() {
            [angle_diff(z[0], w[0]), z[1] - w[1]]
        } else {
            [z[0] - w[0], z[1] - w[1]]
        }
    }

    /// `k`-fold iterate with its Jacobian.
    fn iterate_jac(&self, z: Point, k: u32) -> Result<(Point, Mat2), MapError> {
        let mut w = z;
        let mut j = IDENTITY;
        for _ in 0..k {
            let (w1, jw) = self.eval_jac(w)?;
            j = mat_mul(&jw, &j);
            w = w1;
        }
        Ok((w, j))
    }
}

/// `G_q ∘ … ∘ G_1`, where `G_i` is `(F1, F2)` at the frozen angle `t_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedMap {
    pub model: Model,
    pub t_orbit: Vec<f64>,
}

impl RestrictedMap {
    /// The planar map at a single frozen `t`, with no periodicity requirement.
    pub fn frozen(model: Model, t: f64) -> Self {
        Self { model, t_orbit: vec![t] }
    }
}

impl PlanarMap for RestrictedMap {
    fn eval_jac(&self, z: Point) -> Result<(Point, Mat2), MapError> {
        let mut w = z;
        let mut j = IDENTITY;
        for &t in &self.t_orbit {
            let jt = self.model.planar_jacobian(w[0], w[1], t)?;
            let (x, y) = self.model.eval_planar(w[0], w[1], t)?;
            j = mat_mul(&jt, &j);
            w = [x, y];
        }
        Ok((w, j))
    }

    fn eval(&self, z: Point) -> Result<Point, MapError> {
        let mut w = z;
        for &t in &self.t_orbit {
            let (x, y) = self.model.eval_planar(w[0], w[1], t)?;
            w = [x, y];
        }
        Ok(w)
    }

    fn periodic_x(&self) -> bool {
        true
    }
}

/// Largest circle distance between `F3(t_i)` and `t_{i+1}` around the cycle.
pub fn t_orbit_residual(model: &Model, t_orbit: &[f64]) -> f64 {
    let c = CircleMap::new(model.params.alpha2, model.params.delta2, model.funcs.psi3.clone());
    (0..t_orbit.len())
        .map(|i| angle_diff(c.step(t_orbit[i]), t_orbit[(i + 1) % t_orbit.len()]).abs())
        .fold(0.0, f64::max)
}

/// Restricted map along a periodic orbit of `F3`.
///
/// Fails with [`OrbitError::NotPeriodic`] unless the orbit closes up to 1e-8.
pub fn compose_restricted(model: &Model, t_orbit: &[f64]) -> Result<RestrictedMap, OrbitError> {
    let residual = if t_orbit.is_empty() { f64::INFINITY } else { t_orbit_residual(model, t_orbit) };
    if !(residual <= 1e-8) {
        return Err(OrbitError::NotPeriodic { residual });
    }
    Ok(RestrictedMap { model: model.clone(), t_orbit: t_orbit.to_vec() })
}

/// `z ↦ A z + c`, for exact-answer tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub a: Mat2,
    pub c: Point,
}

impl PlanarMap for AffineMap {
    fn eval_jac(&self, z: Point) -> Result<(Point, Mat2), MapError> {
        let w = mat_vec(&self.a, z);
        Ok(([w[0] + self.c[0], w[1] + self.c[1]], self.a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PointKind {
    Saddle,
    Sink,
    Source,
    /// Complex or unit-modulus multipliers.
    Other,
}

/// Real eigenpairs of a 2×2 matrix, ordered by decreasing modulus.
pub fn eigen2(j: &Mat2) -> Option<[(f64, Point); 2]> {
    let tr = j[0][0] + j[1][1];
    let det = det2(j);
    let disc = tr * tr - 4.0 * det;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // avoid cancellation in the smaller root
    let big = if tr >= 0.0 { 0.5 * (tr + sq) } else { 0.5 * (tr - sq) };
    let small = if big != 0.0 { det / big } else { 0.0 };
    let vec_for = |l: f64| -> Point {
        let a = [j[0][1], l - j[0][0]];
        let b = [l - j[1][1], j[1][0]];
        let v = if a[0].hypot(a[1]) >= b[0].hypot(b[1]) { a } else { b };
        let n = v[0].hypot(v[1]);
        if n == 0.0 {
            // multiple of the identity: any basis works
            if l == big {
                [1.0, 0.0]
            } else {
                [0.0, 1.0]
            }
        } else {
            let s = if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) { -1.0 } else { 1.0 };
            [s * v[0] / n, s * v[1] / n]
        }
    };
    Some([(big, vec_for(big)), (small, vec_for(small))])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanarSaddle {
    pub point: Point,
    /// Minimal period.
    pub period: u32,
    pub kind: PointKind,
    /// Multipliers of the period map, `|m[0]| >= |m[1]|`; NaN when complex.
    pub multipliers: [f64; 2],
    pub unstable_dir: Point,
    pub stable_dir: Point,
    pub residual: f64,
    pub det: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointSearch {
    pub points: Vec<PlanarSaddle>,
    /// Seeds for which Newton did not converge.
    pub failed: usize,
}

impl FixedPointSearch {
    pub fn saddles(&self) -> impl Iterator<Item = &PlanarSaddle> {
        self.points.iter().filter(|p| p.kind == PointKind::Saddle)
    }
}

fn norm(v: Point) -> f64 {
    v[0].hypot(v[1])
}

fn newton_periodic<M: PlanarMap + ?Sized>(map: &M, seed: Point, k: u32) -> Option<(Point, f64)> {
    let mut z = seed;
    for _ in 0..60 {
        let (w, j) = map.iterate_jac(z, k).ok()?;
        let g = map.diff(w, z);
        let res = norm(g);
        if res <= 1e-13 {
            break;
        }
        let a = [[j[0][0] - 1.0, j[0][1]], [j[1][0], j[1][1] - 1.0]];
        let d = det2(&a);
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let step = [(a[1][1] * g[0] - a[0][1] * g[1]) / d, (a[0][0] * g[1] - a[1][0] * g[0]) / d];
        // backtrack while the trial point leaves the domain or the residual grows
        let mut lam = 1.0;
        loop {
            let trial = [z[0] - lam * step[0], z[1] - lam * step[1]];
            if let Ok((wt, _)) = map.iterate_jac(trial, k) {
                if norm(map.diff(wt, trial)) < res || lam < 1e-3 {
                    z = trial;
                    break;
                }
            }
            lam *= 0.5;
            if lam < 1e-6 {
                return None;
            }
        }
    }
    let (w, _) = map.iterate_jac(z, k).ok()?;
    let res = norm(map.diff(w, z));
    (res <= 1e-10).then_some((z, res))
}

/// Periodic points of period dividing `k` by damped Newton on `f^k(z) - z`
/// from every seed, deduplicated at distance 1e-6 (one representative
/// per orbit) and classified by the multipliers of the minimal-period map.
pub fn find_planar_fixed_points<M: PlanarMap + ?Sized>(map: &M, k: u32, seeds: &[Point]) -> FixedPointSearch {
    let mut points: Vec<PlanarSaddle> = Vec::new();
    let mut failed = 0;
    let close = |a: Point, b: Point| norm(map.diff(a, b)) < 1e-6;
    for &seed in seeds {
        let Some((z, _)) = newton_periodic(map, seed, k) else {
            failed += 1;
            continue;
        };
        let z = if map.periodic_x() { [crate::model::wrap_angle(z[0]), z[1]] } else { z };
        let period = (1..=k)
            .filter(|d| k.is_multiple_of(*d))
            .find(|&d| map.iterate_jac(z, d).map(|(w, _)| close(w, z)).unwrap_or(false))
            .unwrap_or(k);
        let mut orbit = vec![z];
        let mut w = z;
        for _ in 1..period {
            w = match map.eval(w) {
                Ok(v) => v,
                Err(_) => break,
            };
            orbit.push(w);
        }
        if points.iter().any(|p| p.period == period && orbit.iter().any(|&o| close(o, p.point))) {
            continue;
        }
        let Ok((wz, j)) = map.iterate_jac(z, period) else {
            failed += 1;
            continue;
        };
        let residual = norm(map.diff(wz, z));
        let (kind, multipliers, unstable_dir, stable_dir) = match eigen2(&j) {
            Some([(lb, vb), (ls, vs)]) => {
                let kind = if lb.abs() > 1.0 && ls.abs() < 1.0 {
                    PointKind::Saddle
                } else if lb.abs() < 1.0 {
                    PointKind::Sink
                } else if ls.abs() > 1.0 {
                    PointKind::Source
                } else {
                    PointKind::Other
                };
                (kind, [lb, ls], vb, vs)
            }
            None => (PointKind::Other, [f64::NAN; 2], [f64::NAN; 2], [f64::NAN; 2]),
        };
        points.push(PlanarSaddle { point: z, period, kind, multipliers, unstable_dir, stable_dir, residual, det: det2(&j) });
    }
    FixedPointSearch { points, failed }
}

/// `nx × ny` seeds on `[x_lo, x_hi) × (y_lo, y_hi)`, cell-centred.
pub fn seed_grid(x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> Vec<Point> {
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            out.push([x.0 + (x.1 - x.0) * (i as f64 + 0.5) / nx as f64, y.0 + (y.1 - y.0) * (j as f64 + 0.5) / ny as f64]);
        }
    }
    out
}

/// Saddles of every period `1..=k_max` from the same seeds.
pub fn saddle_search<M: PlanarMap + ?Sized>(map: &M, k_max: u32, seeds: &[Point]) -> Vec<PlanarSaddle> {
    let mut out: Vec<PlanarSaddle> = Vec::new();
    for k in 1..=k_max {
        for s in find_planar_fixed_points(map, k, seeds).points {
            if s.kind == PointKind::Saddle && s.period == k {
                out.push(s);
            }
        }
    }
    out
}
