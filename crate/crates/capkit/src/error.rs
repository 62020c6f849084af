//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension {0} (expected 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("grid resolution {0} too small (minimum {1})")]
    ResolutionTooSmall(usize, usize),
    #[error("shape `{0}` is not defined in dimension {1}")]
    ShapeDimension(String, usize),
    #[error("support function is not convex: min curvature certificate {0:e}")]
    NotConvex(f64),
    #[error("origin is not interior: min support value {0:e}")]
    OriginNotInterior(f64),
    #[error("operands live on different direction grids")]
    GridMismatch,
    #[error("alpha = {0} outside the admissible range (0, {1})")]
    AlphaOutOfRange(f64, f64),
    #[error("cell budget {0} too small (minimum {1})")]
    CellBudgetTooSmall(usize, usize),
    #[error("coincident nodes at indices {0} and {1}")]
    CoincidentNodes(usize, usize),
    #[error("quadrature self-consistency spread {0:e} exceeds tolerance {1:e}")]
    SpreadCheckFailed(f64, f64),
    #[error("quadrature did not stabilize: relative change {0:e}")]
    QuadratureNotConverged(f64),
    #[error("evaluation point within one cell of a measure node")]
    TooCloseToNode,
    #[error("boundary fit failed at node {node}: {reason}")]
    TraceFit { node: usize, reason: String },
    #[error("convexity certificate failed at perturbation t = {0}")]
    CertificationAt(f64),
    #[error("equilibrium solver did not converge: relative gap {0:e} after {1} iterations")]
    SolverNotConverged(f64, usize),
    #[error("flow step could not be certified after {0} halvings")]
    FlowStepFailed(usize),
    #[error("{0}")]
    Invalid(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
