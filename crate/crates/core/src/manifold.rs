//! One-sided invariant manifold branches of planar saddles and their
//! intersections.

use crate::error::OrbitError;
use crate::planar::{PlanarMap, PlanarSaddle, Point};
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Unstable,
    Stable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthConfig {
    pub seed_length: f64,
    pub max_chord: f64,
    /// Allowed distance of the image of a chord midpoint from the new chord.
    pub max_bow: f64,
    pub invariance_tol: f64,
    /// `+1` or `-1`: which half of the eigenline to follow.
    pub orientation: f64,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        Self { seed_length: 1e-4, max_chord: 1e-3, max_bow: 2e-7, invariance_tol: 1e-6, orientation: 1.0 }
    }
}

/// A manifold branch as a polyline. On the cylinder the first coordinate
/// is lifted (continuous), not reduced mod 2π.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    pub points: Vec<Point>,
    pub arc_length: f64,
    /// Largest distance from the image of a vertex to the polyline.
    pub invariance_error: f64,
    /// Vertices whose image was checked.
    pub checked: usize,
    pub side: Side,
    pub complete: bool,
}

/// The iterate used for growth (`f^k` or `f^2k` when the multiplier is
/// negative), evaluated forwards or by Newton inversion.
struct Stepper<'a, M: PlanarMap + ?Sized> {
    map: &'a M,
    k: u32,
    side: Side,
}

impl<M: PlanarMap + ?Sized> Stepper<'_, M> {
    fn lift_near(&self, w: Point, near: Point) -> Point {
        if self.map.periodic_x() {
            [near[0] + crate::model::angle_diff(w[0], near[0]), w[1]]
        } else {
            w
        }
    }

    fn forward(&self, z: Point) -> Option<Point> {
        self.map.iterate_jac(z, self.k).ok().map(|(w, _)| w)
    }

    /// Preimage of `w` under `f^k` close to `seed`.
    fn inverse(&self, w: Point, seed: Point) -> Option<Point> {
        let mut z = seed;
        for _ in 0..60 {
            let (fz, j) = self.map.iterate_jac(z, self.k).ok()?;
            let r = self.map.diff(fz, w);
            if r[0].hypot(r[1]) <= 1e-12 {
                return Some(z);
            }
            let d = crate::planar::det2(&j);
            if d == 0.0 || !d.is_finite() {
                return None;
            }
            z = [z[0] - (j[1][1] * r[0] - j[0][1] * r[1]) / d, z[1] - (j[0][0] * r[1] - j[1][0] * r[0]) / d];
        }
        let (fz, _) = self.map.iterate_jac(z, self.k).ok()?;
        let r = self.map.diff(fz, w);
        (r[0].hypot(r[1]) <= 1e-10).then_some(z)
    }

    /// Image along the growth direction, lifted next to `near`.
    fn apply(&self, z: Point, near: Point) -> Option<Point> {
        match self.side {
            Side::Unstable => self.forward(z).map(|w| self.lift_near(w, near)),
            Side::Stable => self.inverse(z, near).map(|w| self.lift_near(w, near)),
        }
    }
}

struct Curve {
    pts: Vec<Point>,
    cum: Vec<f64>,
}

impl Curve {
    fn push(&mut self, p: Point) {
        let last = *self.pts.last().unwrap();
        self.cum.push(self.cum.last().unwrap() + dist(p, last));
        self.pts.push(p);
    }

    fn at(&self, s: f64) -> Point {
        let i = self.cum.partition_point(|&c| c < s).clamp(1, self.pts.len() - 1);
        let (a, b) = (self.pts[i - 1], self.pts[i]);
        let len = self.cum[i] - self.cum[i - 1];
        let u = if len > 0.0 { ((s - self.cum[i - 1]) / len).clamp(0.0, 1.0) } else { 0.0 };
        [a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])]
    }

    fn total(&self) -> f64 {
        *self.cum.last().unwrap()
    }
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn seg_dist(p: Point, a: Point, b: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let l2 = d[0] * d[0] + d[1] * d[1];
    let u = if l2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2).clamp(0.0, 1.0) } else { 0.0 };
    dist(p, [a[0] + u * d[0], a[1] + u * d[1]])
}

/// Grow one branch of `W^u` or `W^s` of `saddle` to arclength `arc_target`.
///
/// A seed segment of length `seed_length` along the eigendirection is
/// continued by mapping points of the existing curve: each new vertex is
/// the image of the curve point one parameter step beyond the preimage of
/// the previous vertex. The step is halved until the chord is at most
/// `max_chord` and the image of the mid-parameter point lies within
/// `max_bow` of the chord. `max_iter` bounds the number of trial steps.
pub fn manifold_segment<M: PlanarMap + ?Sized>(
    map: &M,
    saddle: &PlanarSaddle,
    side: Side,
    arc_target: f64,
    max_iter: usize,
    cfg: &GrowthConfig,
) -> Result<Polyline, OrbitError> {
    if saddle.kind != crate::planar::PointKind::Saddle {
        return Err(OrbitError::NotSaddle);
    }
    let (mult, dir) = match side {
        Side::Unstable => (saddle.multipliers[0], saddle.unstable_dir),
        Side::Stable => (saddle.multipliers[1], saddle.stable_dir),
    };
    let (k, rate) = if mult < 0.0 { (2 * saddle.period, mult * mult) } else { (saddle.period, mult) };
    // growth factor of the step map along the branch
    let grow = match side {
        Side::Unstable => rate,
        Side::Stable => 1.0 / rate,
    };
    let stepper = Stepper { map, k, side };
    let p = saddle.point;
    let h = cfg.seed_length;
    let seed_n = 16;
    let mut curve = Curve { pts: vec![p], cum: vec![0.0] };
    for i in 1..=seed_n {
        let s = cfg.orientation * h * i as f64 / seed_n as f64;
        curve.push([p[0] + s * dir[0], p[1] + s * dir[1]]);
    }
    // preimage parameter of each grown vertex, for the invariance check
    let mut pre: Vec<(usize, f64)> = Vec::new();
    let mut sigma = h / grow;
    let mut ds = sigma / 4.0;
    let mut trials = 0;
    while curve.total() < arc_target && trials < max_iter {
        trials += 1;
        let last = *curve.pts.last().unwrap();
        // a branch of finite length (ending in a sink) stops here
        let room = curve.total() - sigma;
        if room <= 1e-10 {
            break;
        }
        ds = ds.min(room);
        let q_end = curve.at(sigma + ds);
        let q_mid = curve.at(sigma + 0.5 * ds);
        let (Some(c), Some(m)) = (stepper.apply(q_end, last), stepper.apply(q_mid, last)) else {
            if ds > 1e-15 {
                ds *= 0.5;
                continue;
            }
            return Err(match side {
                Side::Unstable => OrbitError::Escaped { vertices: curve.pts.len() },
                Side::Stable => OrbitError::InverseFailed { x: last[0], y: last[1] },
            });
        };
        let chord = dist(c, last);
        let mut bow = seg_dist(m, last, c);
        // images of the curve's own vertices inside the step must hug the chord too
        let lo = curve.cum.partition_point(|&v| v <= sigma);
        let hi = curve.cum.partition_point(|&v| v < sigma + ds);
        if hi - lo > 4 {
            ds *= 0.5;
            continue;
        }
        for v in lo..hi {
            match stepper.apply(curve.pts[v], last) {
                Some(w) => bow = bow.max(seg_dist(w, last, c)),
                None => bow = f64::INFINITY,
            }
        }
        if chord > cfg.max_chord || bow > cfg.max_bow {
            ds *= 0.5;
            if ds < 1e-15 {
                return Err(OrbitError::Escaped { vertices: curve.pts.len() });
            }
            continue;
        }
        sigma += ds;
        curve.push(c);
        pre.push((curve.pts.len() - 1, sigma));
        if chord < 0.25 * cfg.max_chord && bow < 0.25 * cfg.max_bow {
            ds *= 2.0;
        }
    }
    let complete = curve.total() >= arc_target;
    let (invariance_error, checked) = invariance(&stepper, &curve, &pre);
    Ok(Polyline { arc_length: curve.total(), points: curve.pts, invariance_error, checked, side, complete })
}

/// Distance from the image of each vertex to the curve. The vertex at
/// arclength `s` maps between the grown vertices whose preimage parameters
/// bracket `s`; only vertices whose image lies in the grown part are checked.
fn invariance<M: PlanarMap + ?Sized>(st: &Stepper<M>, curve: &Curve, pre: &[(usize, f64)]) -> (f64, usize) {
    let Some(&(_, max_sigma)) = pre.last() else {
        return (0.0, 0);
    };
    let mut worst = 0.0f64;
    let mut checked = 0;
    for (i, &v) in curve.pts.iter().enumerate() {
        let s = curve.cum[i];
        if s <= pre[0].1 || s >= max_sigma {
            continue;
        }
        let j = pre.partition_point(|&(_, sg)| sg < s);
        let (a, _) = pre[j - 1];
        let (b, _) = pre[j];
        let near = curve.pts[a];
        let Some(w) = st.apply(v, near) else {
            return (f64::INFINITY, checked);
        };
        let lo = a.saturating_sub(1);
        let hi = (b + 1).min(curve.pts.len() - 1);
        let d = (lo..hi).map(|k| seg_dist(w, curve.pts[k], curve.pts[k + 1])).fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
        checked += 1;
    }
    (worst, checked)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub point: Point,
    /// Acute angle between the crossing segments, in `[0, π/2]`.
    pub angle: f64,
    pub transverse: bool,
    pub wu_segment: usize,
    pub ws_segment: usize,
}

pub const TRANSVERSE_ANGLE: f64 = 1e-3;

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn intersect(a: Point, b: Point, c: Point, d: Point) -> Option<(Point, f64)> {
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    if !((o1 > 0.0) != (o2 > 0.0) && (o3 > 0.0) != (o4 > 0.0)) || o1 == o2 {
        return None;
    }
    let u = o1 / (o1 - o2);
    let p = [c[0] + u * (d[0] - c[0]), c[1] + u * (d[1] - c[1])];
    let (e, f) = ([b[0] - a[0], b[1] - a[1]], [d[0] - c[0], d[1] - c[1]]);
    let cos = ((e[0] * f[0] + e[1] * f[1]) / (e[0].hypot(e[1]) * f[0].hypot(f[1]))).abs().min(1.0);
    Some((p, cos.acos()))
}

/// Proper intersections between the segments of two polylines.
///
/// With `periodic_x` the first coordinate is an angle and `wu` is also
/// tested shifted by `±2π`. Segment pair `(0, 0)` is skipped when both
/// polylines start at the same point (the saddle itself).
pub fn homoclinic_crossings(wu: &[Point], ws: &[Point], periodic_x: bool) -> Vec<Crossing> {
    if wu.len() < 2 || ws.len() < 2 {
        return Vec::new();
    }
    let cell = 0.01;
    let key = |p: Point| ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for j in 0..ws.len() - 1 {
        let (a, b) = (ws[j], ws[j + 1]);
        let (k0, k1) = (key([a[0].min(b[0]), a[1].min(b[1])]), key([a[0].max(b[0]), a[1].max(b[1])]));
        for kx in k0.0..=k1.0 {
            for ky in k0.1..=k1.1 {
                buckets.entry((kx, ky)).or_default().push(j);
            }
        }
    }
    let shifts: &[f64] = if periodic_x { &[-TAU, 0.0, TAU] } else { &[0.0] };
    let same_start = wu[0] == ws[0];
    let mut out = Vec::new();
    for &sh in shifts {
        let mut seen = std::collections::HashSet::new();
        for i in 0..wu.len() - 1 {
            let a = [wu[i][0] + sh, wu[i][1]];
            let b = [wu[i + 1][0] + sh, wu[i + 1][1]];
            let (k0, k1) = (key([a[0].min(b[0]), a[1].min(b[1])]), key([a[0].max(b[0]), a[1].max(b[1])]));
            seen.clear();
            for kx in k0.0..=k1.0 {
                for ky in k0.1..=k1.1 {
                    for &j in buckets.get(&(kx, ky)).map(Vec::as_slice).unwrap_or(&[]) {
                        if !seen.insert(j) || (same_start && sh == 0.0 && i == 0 && j == 0) {
                            continue;
                        }
                        if let Some((point, angle)) = intersect(a, b, ws[j], ws[j + 1]) {
                            out.push(Crossing { point, angle, transverse: angle >= TRANSVERSE_ANGLE, wu_segment: i, ws_segment: j });
                        }
                    }
                }
            }
        }
    }
    out.sort_by_key(|p| (p.wu_segment, p.ws_segment));
    out
}

/// Branches of one saddle whose transverse crossing witnesses a horseshoe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HorseshoeEvidence {
    pub saddle: PlanarSaddle,
    pub unstable: Polyline,
    pub stable: Polyline,
    pub crossings: Vec<Crossing>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum HorseshoeSearch {
    Found(Box<HorseshoeEvidence>),
    NoSaddle,
    /// Saddles were found but none gave complete branches crossing transversally.
    NoTransverseCrossing { saddles_tried: usize },
}

/// Grows both halves of each invariant manifold of every saddle, in order,
/// and returns the first complete unstable/stable pair with a transverse
/// crossing. Branches that fail to grow or miss the invariance tolerance
/// are skipped.
pub fn horseshoe_evidence<M: PlanarMap + ?Sized>(
    map: &M,
    saddles: &[PlanarSaddle],
    arc: f64,
    max_iter: usize,
    cfg: &GrowthConfig,
) -> HorseshoeSearch {
    if saddles.is_empty() {
        return HorseshoeSearch::NoSaddle;
    }
    let grow = |s: &PlanarSaddle, side: Side| -> Vec<Polyline> {
        [1.0, -1.0]
            .iter()
            .filter_map(|&o| manifold_segment(map, s, side, arc, max_iter, &GrowthConfig { orientation: o, ..*cfg }).ok())
            .filter(|p| p.complete && p.invariance_error <= cfg.invariance_tol)
            .collect()
    };
    for s in saddles {
        let us = grow(s, Side::Unstable);
        if us.is_empty() {
            continue;
        }
        let ss = grow(s, Side::Stable);
        for u in &us {
            for st in &ss {
                let crossings = homoclinic_crossings(&u.points, &st.points, map.periodic_x());
                if crossings.iter().any(|c| c.transverse) {
                    return HorseshoeSearch::Found(Box::new(HorseshoeEvidence {
                        saddle: s.clone(),
                        unstable: u.clone(),
                        stable: st.clone(),
                        crossings,
                    }));
                }
            }
        }
    }
    HorseshoeSearch::NoTransverseCrossing { saddles_tried: saddles.len() }
}
