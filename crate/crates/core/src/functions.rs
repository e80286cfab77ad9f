//! Concrete representation of the model functions.
//!
//! Every function of the family is additive in its arguments: a
//! trigonometric polynomial in each angle plus a real polynomial in the
//! radial offset `s = y - 1` with no constant term. This keeps every
//! derivative exact and makes the positivity hypotheses checkable on a grid.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// `f(θ) = c0 + Σ a_k cos(kθ) + b_k sin(kθ)`, `k = 1, 2, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigPoly {
    pub c0: f64,
    #[serde(default, rename = "cos")]
    pub cos_coeffs: Vec<f64>,
    #[serde(default, rename = "sin")]
    pub sin_coeffs: Vec<f64>,
}

impl TrigPoly {
    pub fn constant(c0: f64) -> Self {
        Self { c0, cos_coeffs: Vec::new(), sin_coeffs: Vec::new() }
    }

    pub fn new(c0: f64, cos_coeffs: Vec<f64>, sin_coeffs: Vec<f64>) -> Self {
        Self { c0, cos_coeffs, sin_coeffs }
    }

    /// `c0 + amp * sin θ`.
    pub fn shifted_sine(c0: f64, amp: f64) -> Self {
        Self { c0, cos_coeffs: Vec::new(), sin_coeffs: vec![amp] }
    }

    pub fn is_constant(&self) -> bool {
        self.cos_coeffs.iter().chain(&self.sin_coeffs).all(|&c| c == 0.0)
    }

    fn degree(&self) -> usize {
        self.cos_coeffs.len().max(self.sin_coeffs.len())
    }

    /// Value and derivatives up to `order` (0..=3) at `theta`.
    pub fn eval_derivs(&self, theta: f64, order: usize) -> [f64; 4] {
        let theta = theta.rem_euclid(TAU);
        let mut out = [0.0; 4];
        out[0] = self.c0;
        for k in 1..=self.degree() {
            let a = self.cos_coeffs.get(k - 1).copied().unwrap_or(0.0);
            let b = self.sin_coeffs.get(k - 1).copied().unwrap_or(0.0);
            if a == 0.0 && b == 0.0 {
                continue;
            }
            let kf = k as f64;
            let (s, c) = (kf * theta).sin_cos();
            // d/dθ cycles (c, s) -> (-k s, k c)
            let terms = [a * c + b * s, kf * (b * c - a * s), -kf * kf * (a * c + b * s), -kf.powi(3) * (b * c - a * s)];
            for (o, t) in out.iter_mut().zip(terms).take(order + 1) {
                *o += t;
            }
        }
        out
    }

    pub fn value(&self, theta: f64) -> f64 {
        self.eval_derivs(theta, 0)[0]
    }

    pub fn deriv(&self, theta: f64) -> f64 {
        self.eval_derivs(theta, 1)[1]
    }

    pub fn deriv2(&self, theta: f64) -> f64 {
        self.eval_derivs(theta, 2)[2]
    }

    pub fn deriv3(&self, theta: f64) -> f64 {
        self.eval_derivs(theta, 3)[3]
    }

    /// Minimum over `n` equally spaced points of `[0, 2π)`.
    pub fn grid_min(&self, n: usize) -> f64 {
        (0..n).map(|i| self.value(TAU * i as f64 / n as f64)).fold(f64::INFINITY, f64::min)
    }

    pub fn grid_max(&self, n: usize) -> f64 {
        (0..n).map(|i| self.value(TAU * i as f64 / n as f64)).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `P(s) = Σ_{k≥1} c_k s^k`; the constant term is absent so `P(0) = 0`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RadialPoly {
    pub coeffs: Vec<f64>,
}

impl RadialPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// `(P(s), P'(s))` by Horner's rule.
    pub fn value_deriv(&self, s: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        for &c in self.coeffs.iter().rev() {
            dp = dp * s + p;
            p = p * s + c;
        }
        // the loop computed Q(s) with P(s) = s Q(s)
        (p * s, p + s * dp)
    }

    pub fn value(&self, s: f64) -> f64 {
        self.value_deriv(s).0
    }

    /// Minimum over `n` points of `[lo, hi]` (endpoints included).
    pub fn grid_min(&self, lo: f64, hi: f64, n: usize) -> f64 {
        let n = n.max(2);
        (0..n)
            .map(|i| self.value(lo + (hi - lo) * i as f64 / (n - 1) as f64))
            .fold(f64::INFINITY, f64::min)
    }
}

/// A function of `(x, y)` written as `X(x) + P(y - 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanarFn {
    pub x: TrigPoly,
    #[serde(default)]
    pub y: RadialPoly,
}

/// Value and first partials of a planar function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarEval {
    pub v: f64,
    pub dx: f64,
    pub dy: f64,
}

impl PlanarFn {
    pub fn sine() -> Self {
        Self { x: TrigPoly::shifted_sine(1.1, 1.0), y: RadialPoly::zero() }
    }

    pub fn eval(&self, x: f64, y: f64) -> PlanarEval {
        let [v, dx, ..] = self.x.eval_derivs(x, 1);
        let (p, dp) = self.y.value_deriv(y - 1.0);
        PlanarEval { v: v + p, dx, dy: dp }
    }

    pub fn is_constant(&self) -> bool {
        self.x.is_constant() && self.y.is_zero()
    }

    /// Grid minimum over `[0, 2π) × [1, 1+b]`, using additivity.
    pub fn grid_min(&self, b: f64, n: usize) -> f64 {
        self.x.grid_min(n) + self.y.grid_min(0.0, b, n)
    }
}

/// `Ψ4(x, y, t) = X(x) + P(y - 1) + T(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoupledFn {
    pub x: TrigPoly,
    #[serde(default)]
    pub y: RadialPoly,
    pub t: TrigPoly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledEval {
    pub v: f64,
    pub dx: f64,
    pub dy: f64,
    pub dt: f64,
}

impl CoupledFn {
    pub fn sine() -> Self {
        Self { x: TrigPoly::constant(0.0), y: RadialPoly::zero(), t: TrigPoly::shifted_sine(1.1, 1.0) }
    }

    pub fn eval(&self, x: f64, y: f64, t: f64) -> CoupledEval {
        let [vx, dx, ..] = self.x.eval_derivs(x, 1);
        let (p, dp) = self.y.value_deriv(y - 1.0);
        let [vt, dt, ..] = self.t.eval_derivs(t, 1);
        CoupledEval { v: vx + p + vt, dx, dy: dp, dt }
    }

    pub fn is_constant(&self) -> bool {
        self.x.is_constant() && self.y.is_zero() && self.t.is_constant()
    }

    pub fn grid_min(&self, b: f64, n: usize) -> f64 {
        self.x.grid_min(n) + self.y.grid_min(0.0, b, n) + self.t.grid_min(n)
    }
}

/// The five model functions Ψ1, Ψ2, Ψ3, Ψ4 and g.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFunctions {
    #[serde(default = "PlanarFn::sine")]
    pub psi1: PlanarFn,
    #[serde(default = "PlanarFn::sine")]
    pub psi2: PlanarFn,
    #[serde(default = "sine_t")]
    pub psi3: TrigPoly,
    #[serde(default = "CoupledFn::sine")]
    pub psi4: CoupledFn,
    #[serde(default = "PlanarFn::sine")]
    pub g: PlanarFn,
}

fn sine_t() -> TrigPoly {
    TrigPoly::shifted_sine(1.1, 1.0)
}

impl ModelFunctions {
    /// Every angular part equal to `1.1 + sin`, radial parts zero.
    pub fn sine_family() -> Self {
        Self {
            psi1: PlanarFn::sine(),
            psi2: PlanarFn::sine(),
            psi3: sine_t(),
            psi4: CoupledFn::sine(),
            g: PlanarFn::sine(),
        }
    }
}

impl Default for ModelFunctions {
    fn default() -> Self {
        Self::sine_family()
    }
}
