use thiserror::Error;

/// Failure to evaluate the map at a point.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum MapError {
    /// A logarithm argument was not positive: the point lies outside the
    /// domain of definition.
    #[error("log argument {value} is not positive")]
    LogDomain { value: f64 },
    /// The radial base `(y-1) + ε1 g` was negative with a non-integer exponent.
    #[error("radial base {value} is negative for a non-integer exponent")]
    PowerDomain { value: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircleError {
    #[error("delta2 * sup|psi3'/psi3| = {product} >= 1: circle map is not injective")]
    H5Violated { product: f64 },
    #[error("sign changes closer than the grid step persist after refinement (grid {grid_n})")]
    GridTooCoarse { grid_n: usize },
    #[error("every point is periodic (rigid rational rotation)")]
    Degenerate,
    #[error("predicate is constant on the bracket [{lo}, {hi}]")]
    NotBracketed { lo: f64, hi: f64 },
    #[error("invalid period: p={p}, q={q}")]
    InvalidPeriod { p: i64, q: u32 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LimitError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("rescaled coordinates need eps1 > 0, got {0}")]
    ZeroEps(f64),
    #[error("critical point at x = {x} is degenerate (second derivative {second})")]
    DegenerateCritical { x: f64, second: f64 },
    #[error("log domain left at grid cell (x = {x}, ybar = {ybar}) for n = {n}")]
    GridDomain { n: u32, x: f64, ybar: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrbitError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("t-orbit is not periodic: residual {residual}")]
    NotPeriodic { residual: f64 },
    #[error("Newton inversion failed near ({x}, {y})")]
    InverseFailed { x: f64, y: f64 },
    #[error("manifold left the domain after {vertices} vertices")]
    Escaped { vertices: usize },
    #[error("saddle multipliers are not real with |lu| > 1 > |ls|")]
    NotSaddle,
}
