//! Numerical laboratory for the rotating rank-one family of maps on
//! `S¹ × [1, 1+b] × S¹`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circle;
pub mod error;
pub mod functions;
pub mod hypotheses;
pub mod limit;
pub mod lyapunov;
pub mod manifold;
pub mod misiurewicz;
pub mod model;
pub mod orbit;
pub mod planar;
pub mod roots;
pub mod sweep;

pub use error::{CircleError, LimitError, MapError, OrbitError};
pub use functions::{CoupledFn, ModelFunctions, PlanarFn, RadialPoly, TrigPoly};
pub use model::{Jacobian3, Model, ModelParams, PhaseState};
