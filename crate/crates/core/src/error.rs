//! Error type shared by all modules.

use thiserror::Error;

/// Failure modes of the geometric, algebraic and spectral kernels.
///
/// Errors carry `f64` diagnostics regardless of the scalar the computation
/// ran in, so the type stays object-safe and non-generic.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point lies on the boundary (distance zero)")]
    OnBoundary,
    #[error("point lies outside the domain")]
    OutsideDomain,
    #[error("nearest boundary point is not unique")]
    AmbiguousNearestPoint,
    #[error("distance function is not twice differentiable at this point")]
    NonSmoothPoint,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("field is not radially representable: {0}")]
    NotRadial(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("ladder inconclusive: {0}")]
    Inconclusive(String),
    #[error("integrator stalled near the singular endpoint (smallest reached x = {reached:e})")]
    IntegratorStall { reached: f64 },
    #[error("verdict withheld: {0}")]
    VerdictWithheld(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Convenience constructor for parameter validation.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
