use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A point that must be strictly feasible is not.
    #[error("point is not strictly feasible: max constraint value {max_violation:e}")]
    Infeasible { max_violation: f64 },

    /// The dual Hessian needs a positive definite `∇²_pp L`, which fails at `p = 0` with `κ < 1`.
    #[error("curvature unavailable at the current dual point")]
    CurvatureUnavailable,

    /// The barrier Hessian vanishes, so no Dikin ellipsoid exists.
    #[error("barrier Hessian is degenerate")]
    DegenerateBarrier,

    #[error("missing oracle: {0}")]
    MissingOracle(&'static str),

    #[error("subproblem failed: {0}")]
    Subproblem(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
