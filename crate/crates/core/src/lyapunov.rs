#![allow(clippy::approx_constant)]

//! Finite-time Lyapunov spectra.
//!
//! The diagonal of the triangular factor of the propagated frame is read off
//! exterior powers: `|R11|` is the growth of the first frame vector and
//! `|R11 R22|` the growth of the area spanned by the first two, propagated
//! by the second compound (cofactor) matrix. Only these two quantities and
//! `ln|det|` are accumulated, so no orthogonalisation step can lose the
//! weaker directions when exponents are far apart.

use crate::model::{Model, PhaseState};
use crate::planar::{det2, mat_vec, PlanarMap, Point};
use serde::Serialize;

pub type Mat3 = [[f64; 3]; 3];

/// State space together with the tangent map along orbits.
///
/// `None` means the orbit was lost.
pub trait TangentSystem {
    type State: Copy;
    fn advance(&self, s: &Self::State) -> Option<(Self::State, Mat3)>;
}

/// Escape slack used by Lyapunov runs of the full map.
pub const LYAPUNOV_SLACK: f64 = 0.5;

impl TangentSystem for Model {
    type State = PhaseState;
    fn advance(&self, s: &PhaseState) -> Option<(PhaseState, Mat3)> {
        let j = self.eval_jacobian(s).ok()?;
        let next = self.eval_map(s).ok()?;
        let band = 1.0 - LYAPUNOV_SLACK..=1.0 + self.params.b + LYAPUNOV_SLACK;
        band.contains(&next.y).then_some((next, j.0))
    }
}

/// Constant linear map on `R³`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearMap3(pub Mat3);

impl TangentSystem for LinearMap3 {
    type State = ();
    fn advance(&self, _: &()) -> Option<((), Mat3)> {
        Some(((), self.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistoryEntry {
    pub n: u64,
    pub exponents: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovEstimate {
    /// `lambda1 >= lambda2 >= lambda3`.
    pub exponents: [f64; 3],
    /// Exponent of the quotient by the `(e_x, e_y)` plane. For the model,
    /// whose Jacobian keeps that plane invariant, this is the exponent of
    /// the circle factor `F3`.
    pub quotient_exponent: f64,
    pub mean_log_det: f64,
    pub qr_period: u32,
    pub iters: u64,
    /// Steps completed before the orbit left the domain, if it did.
    pub escaped_at: Option<u64>,
    pub history: Vec<HistoryEntry>,
}

impl LyapunovEstimate {
    pub fn sum(&self) -> f64 {
        self.exponents.iter().sum()
    }
}

pub const HISTORY_STRIDE: u64 = 1000;

fn mv3(m: &Mat3, v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// Cofactor matrix: `(M a) × (M b) = cof(M) (a × b)`.
fn cofactor(m: &Mat3) -> Mat3 {
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    [
        [c(1, 2, 1, 2), -c(1, 2, 0, 2), c(1, 2, 0, 1)],
        [-c(0, 2, 1, 2), c(0, 2, 0, 2), -c(0, 2, 0, 1)],
        [c(0, 1, 1, 2), -c(0, 1, 0, 2), c(0, 1, 0, 1)],
    ]
}

fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn sorted3(l1: f64, l12: f64, ld: f64) -> [f64; 3] {
    let mut e = [l1, l12 - l1, ld - l12];
    e.sort_by(|a, b| b.total_cmp(a));
    e
}

/// Spectrum along the orbit of `s0`, renormalising every `qr_period` steps.
pub fn lyapunov_spectrum_of<S: TangentSystem>(sys: &S, s0: S::State, iters: u64, qr_period: u32) -> LyapunovEstimate {
    let qr = qr_period.max(1) as u64;
    let mut s = s0;
    let mut v = [1.0, 0.0, 0.0];
    // e_x ∧ e_y
    let mut w = [0.0, 0.0, 1.0];
    let (mut s1, mut s2, mut ld) = (0.0, 0.0, 0.0);
    let mut history = Vec::new();
    let mut done = 0;
    let mut escaped_at = None;
    let renorm = |v: &mut [f64; 3], acc: &mut f64| {
        let n = norm3(*v);
        *acc += n.ln();
        v.iter_mut().for_each(|c| *c /= n);
    };
    while done < iters {
        let Some((next, m)) = sys.advance(&s).filter(|(_, m)| m.iter().flatten().all(|c| c.is_finite())) else {
            escaped_at = Some(done);
            break;
        };
        s = next;
        v = mv3(&m, v);
        w = mv3(&cofactor(&m), w);
        ld += det3(&m).abs().ln();
        done += 1;
        if done % qr == 0 || done == iters {
            renorm(&mut v, &mut s1);
            renorm(&mut w, &mut s2);
        }
        if done % HISTORY_STRIDE == 0 {
            let n = done as f64;
            history.push(HistoryEntry { n: done, exponents: sorted3(s1 / n, s2 / n, ld / n).to_vec() });
        }
    }
    if escaped_at.is_some() && done % qr != 0 {
        renorm(&mut v, &mut s1);
        renorm(&mut w, &mut s2);
    }
    let n = done.max(1) as f64;
    LyapunovEstimate {
        exponents: sorted3(s1 / n, s2 / n, ld / n),
        quotient_exponent: (ld - s2) / n,
        mean_log_det: ld / n,
        qr_period: qr as u32,
        iters: done,
        escaped_at,
        history,
    }
}

/// Spectrum of the full map from `s0`.
pub fn lyapunov_spectrum(model: &Model, s0: PhaseState, iters: u64, qr_period: u32) -> LyapunovEstimate {
    lyapunov_spectrum_of(model, s0, iters, qr_period)
}

/// Exponent `(1/n) Σ ln|L'(t_k)|` of the circle factor alone.
pub fn circle_exponent(map: &crate::circle::CircleMap, t0: f64, iters: u64) -> f64 {
    let mut t = t0;
    let mut acc = 0.0;
    for _ in 0..iters {
        acc += map.derivative(t).abs().ln();
        t = map.step(t);
    }
    acc / iters as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanarLyapunov {
    pub exponents: [f64; 2],
    pub mean_log_det: f64,
    pub iters: u64,
    pub escaped_at: Option<u64>,
}

/// Two-dimensional spectrum of a planar map.
pub fn planar_lyapunov<M: PlanarMap + ?Sized>(map: &M, z0: Point, iters: u64, qr_period: u32) -> PlanarLyapunov {
    let qr = qr_period.max(1) as u64;
    let mut z = z0;
    let mut v = [1.0, 0.0];
    let (mut s1, mut ld) = (0.0, 0.0);
    let mut done = 0;
    let mut escaped_at = None;
    while done < iters {
        let Some((next, j)) = map.eval_jac(z).ok().filter(|(p, j)| p[1].is_finite() && j.iter().flatten().all(|c| c.is_finite())) else {
            escaped_at = Some(done);
            break;
        };
        z = next;
        v = mat_vec(&j, v);
        ld += det2(&j).abs().ln();
        done += 1;
        if done % qr == 0 || done == iters {
            let n = v[0].hypot(v[1]);
            s1 += n.ln();
            v = [v[0] / n, v[1] / n];
        }
    }
    if escaped_at.is_some() && done % qr != 0 {
        s1 += v[0].hypot(v[1]).ln();
    }
    let n = done.max(1) as f64;
    let mut e = [s1 / n, (ld - s1) / n];
    e.sort_by(|a, b| b.total_cmp(a));
    PlanarLyapunov { exponents: e, mean_log_det: ld / n, iters: done, escaped_at }
}
