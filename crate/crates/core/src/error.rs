use alloc::string::String;

/// Errors produced by the numerical kernels.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the set on which the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A point lies inside (or on) the conductor where only exterior points are allowed.
    #[error("point is not in the exterior domain: {0}")]
    OutsideDomain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Adaptive quadrature exhausted its budget.
    #[error("quadrature did not converge (residual estimate {residual:e})")]
    Quadrature { residual: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("degenerate mesh: {0}")]
    DegenerateMesh(String),

    /// The discrete single-layer system cannot be trusted at this resolution.
    #[error(
        "system matrix is singular or ill-conditioned (condition estimate {condition:e}); \
         change the refinement level or quadrature order"
    )]
    IllConditioned { condition: f64 },

    #[error(
        "iterative solver stalled after {iterations} iterations (relative residual {residual:e})"
    )]
    NotConverged { iterations: usize, residual: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
