//! Rescaled coordinates `ȳ = (y - 1)/ε1`, the parameter sequence
//! `ε(a, n)` and the limit circle family `h_a`.

use crate::error::LimitError;
use crate::functions::{ModelFunctions, TrigPoly};
use crate::hypotheses::{log_critical_points, CriticalPoint};
use crate::model::{angle_diff, wrap_angle, ModelParams};
use serde::Serialize;
use std::f64::consts::TAU;

/// `ε = exp((a - 2nπ)/δ1)`, so that `δ1 ln ε ≡ a (mod 2π)`.
pub fn eps_for_level(a: f64, n: u32, delta1: f64) -> f64 {
    ((a - TAU * n as f64) / delta1).exp()
}

/// The alternative sign convention `exp(-(a + 2nπ)/δ1)`, for which
/// `δ1 ln ε ≡ -a (mod 2π)`.
pub fn eps_for_level_reflected(a: f64, n: u32, delta1: f64) -> f64 {
    (-(a + TAU * n as f64) / delta1).exp()
}

/// Image of `(x, ȳ)` under `T(ε1, 0)` written in rescaled coordinates.
///
/// The model functions are evaluated at `y = 1 + ε1 ȳ`.
pub fn eval_rescaled_map(p: &ModelParams, f: &ModelFunctions, x: f64, ybar: f64) -> Result<(f64, f64), LimitError> {
    if !(p.eps1 > 0.0) {
        return Err(LimitError::ZeroEps(p.eps1));
    }
    let y = 1.0 + p.eps1 * ybar;
    let psi1 = f.psi1.eval(x, y).v;
    let psi2 = f.psi2.eval(x, y).v;
    let g = f.g.eval(x, y).v;
    let arg = ybar + psi2;
    if !(arg > 0.0) {
        return Err(crate::error::MapError::LogDomain { value: arg }.into());
    }
    let x1 = x + p.alpha1 + p.eps1 * psi1 + p.delta1 * p.eps1.ln() + p.delta1 * arg.ln();
    let base = ybar + g;
    if base < 0.0 && p.delta.fract() != 0.0 {
        return Err(crate::error::MapError::PowerDomain { value: base }.into());
    }
    let y1 = p.eps1.powf(p.delta - 1.0) * base.powf(p.delta);
    Ok((wrap_angle(x1), y1))
}

/// `(x, y) ↦ (x, (y - 1)/ε1)`.
pub fn rescale(eps1: f64, x: f64, y: f64) -> (f64, f64) {
    (x, (y - 1.0) / eps1)
}

/// The limit circle family `h_a(x) = x + α1 + a + δ1 ln Ψ2(x, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitFamily {
    pub a: f64,
    pub alpha1: f64,
    pub delta1: f64,
    pub psi2_x: TrigPoly,
}

impl LimitFamily {
    pub fn new(a: f64, alpha1: f64, delta1: f64, psi2_x: TrigPoly) -> Self {
        Self { a, alpha1, delta1, psi2_x }
    }

    pub fn from_model(a: f64, p: &ModelParams, f: &ModelFunctions) -> Self {
        Self::new(a, p.alpha1, p.delta1, f.psi2.x.clone())
    }

    /// Real-line lift of `h_a`.
    pub fn lift(&self, x: f64) -> f64 {
        x + self.alpha1 + self.a + self.delta1 * self.psi2_x.value(x).ln()
    }

    pub fn eval(&self, x: f64) -> f64 {
        wrap_angle(self.lift(x))
    }

    /// `(h', h'', h''')` at `x`.
    pub fn derivs(&self, x: f64) -> (f64, f64, f64) {
        let [v, d1, d2, d3] = self.psi2_x.eval_derivs(x, 3);
        let l1 = d1 / v;
        let l2 = d2 / v - l1 * l1;
        let l3 = d3 / v - 3.0 * d2 * d1 / (v * v) + 2.0 * l1.powi(3);
        (1.0 + self.delta1 * l1, self.delta1 * l2, self.delta1 * l3)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        self.derivs(x).0
    }

    /// Zeros of `h'` (the critical set `C(h)`), ascending in `[0, 2π)`.
    pub fn turning_points(&self) -> Vec<f64> {
        if self.psi2_x.is_constant() {
            return Vec::new();
        }
        crate::roots::periodic_roots(&|x| self.deriv(x), 0.0, TAU, 4096, 1e-12)
    }
}

/// Critical points of `ln Ψ2(x, 0)`: 4096-point bracketing plus bisection.
///
/// A constant `Ψ2` has none (reported, not an error); a root with
/// `|second derivative| < 1e-8` is [`LimitError::DegenerateCritical`].
pub fn critical_points(fam: &LimitFamily) -> Result<Vec<CriticalPoint>, LimitError> {
    let cps = log_critical_points(&fam.psi2_x, 4096, 1e-10);
    if let Some(c) = cps.iter().find(|c| c.second.abs() < 1e-8) {
        return Err(LimitError::DegenerateCritical { x: c.x, second: c.second });
    }
    Ok(cps)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: u32,
    pub eps: f64,
    pub c0_sup: f64,
    pub c1_sup: f64,
}

/// Grid over `x ∈ [0, 2π)` (`nx` points) by `ȳ ∈ [0, ybar_max]` (`ny` points, closed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceGrid {
    pub nx: usize,
    pub ny: usize,
    pub ybar_max: f64,
}

impl Default for ConvergenceGrid {
    fn default() -> Self {
        Self { nx: 256, ny: 64, ybar_max: 1.0 }
    }
}

/// Value and `(∂x, ∂ȳ)` partials of both components.
struct Jet {
    x: f64,
    y: f64,
    x_dx: f64,
    x_dy: f64,
    y_dx: f64,
    y_dy: f64,
}

/// Rescaled map at `ε` with its first partials, written through `a` so
/// that `δ1 ln ε` is replaced by `a` exactly.
fn rescaled_jet(p: &ModelParams, f: &ModelFunctions, a: f64, eps: f64, x: f64, ybar: f64) -> Option<Jet> {
    let y = 1.0 + eps * ybar;
    let psi1 = f.psi1.eval(x, y);
    let psi2 = f.psi2.eval(x, y);
    let g = f.g.eval(x, y);
    let arg = ybar + psi2.v;
    if !(arg > 0.0) {
        return None;
    }
    let base = ybar + g.v;
    let pow = if eps == 0.0 { 0.0 } else { eps.powf(p.delta - 1.0) };
    Some(Jet {
        x: x + p.alpha1 + eps * psi1.v + a + p.delta1 * arg.ln(),
        y: pow * base.powf(p.delta),
        x_dx: 1.0 + eps * psi1.dx + p.delta1 * psi2.dx / arg,
        // ∂ȳ of Ψ(x, 1 + ε ȳ) = ε ∂yΨ
        x_dy: eps * eps * psi1.dy + p.delta1 * (1.0 + eps * psi2.dy) / arg,
        y_dx: pow * p.delta * base.powf(p.delta - 1.0) * g.dx,
        y_dy: pow * p.delta * base.powf(p.delta - 1.0) * (1.0 + eps * g.dy),
    })
}

/// Sup-distances between the rescaled map at `ε` and the singular limit
/// `(x, ȳ) ↦ (x + α1 + a + δ1 ln(ȳ + Ψ2(x, 0)), 0)` over the grid.
///
/// Returns `(C0, C1)`; the C1 column adds the sup of the first-derivative
/// discrepancies. At `ε = 0` both vanish identically.
pub fn limit_discrepancy(
    p: &ModelParams,
    f: &ModelFunctions,
    a: f64,
    eps: f64,
    grid: &ConvergenceGrid,
) -> Result<(f64, f64), (f64, f64)> {
    let mut c0 = 0.0f64;
    let mut c1 = 0.0f64;
    for i in 0..grid.nx {
        let x = TAU * i as f64 / grid.nx as f64;
        for j in 0..grid.ny {
            let ybar = crate::circle::axis_value(0.0, grid.ybar_max, grid.ny, j);
            let (Some(m), Some(l)) = (rescaled_jet(p, f, a, eps, x, ybar), rescaled_jet(p, f, a, 0.0, x, ybar)) else {
                return Err((x, ybar));
            };
            let d0 = angle_diff(m.x, l.x).abs() + (m.y - l.y).abs();
            let d1 = (m.x_dx - l.x_dx).abs().max((m.x_dy - l.x_dy).abs()).max((m.y_dx - l.y_dx).abs()).max((m.y_dy - l.y_dy).abs());
            c0 = c0.max(d0);
            c1 = c1.max(d0.max(d1));
        }
    }
    Ok((c0, c1))
}

/// One row per `n` in `n_range` at `ε = eps_for_level(a, n, δ1)`.
///
/// The C0 column is measured with the map as implemented
/// ([`eval_rescaled_map`], including the `δ1 ln ε` term); the C1 column
/// uses analytic first derivatives.
pub fn convergence_table(
    p: &ModelParams,
    f: &ModelFunctions,
    a: f64,
    n_range: std::ops::RangeInclusive<u32>,
    grid: &ConvergenceGrid,
) -> Result<Vec<ConvergenceRow>, LimitError> {
    let fam = LimitFamily::from_model(a, p, f);
    n_range
        .map(|n| {
            let eps = eps_for_level(a, n, p.delta1);
            let pe = ModelParams { eps1: eps, ..*p };
            let mut c0 = 0.0f64;
            for i in 0..grid.nx {
                let x = TAU * i as f64 / grid.nx as f64;
                for j in 0..grid.ny {
                    let ybar = crate::circle::axis_value(0.0, grid.ybar_max, grid.ny, j);
                    let (x1, y1) = eval_rescaled_map(&pe, f, x, ybar).map_err(|_| LimitError::GridDomain { n, x, ybar })?;
                    let lx = fam.lift(x) + p.delta1 * ((ybar + f.psi2.x.value(x)).ln() - f.psi2.x.value(x).ln());
                    c0 = c0.max(angle_diff(x1, lx).abs() + y1.abs());
                }
            }
            let (_, c1) = limit_discrepancy(p, f, a, eps, grid).map_err(|(x, ybar)| LimitError::GridDomain { n, x, ybar })?;
            Ok(ConvergenceRow { n, eps, c0_sup: c0, c1_sup: c1.max(c0) })
        })
        .collect()
}

pub const CONVERGENCE_CSV_HEADER: &str = "n,eps,c0_sup,c1_sup";
