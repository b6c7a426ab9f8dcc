use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of subdivisions. `value` is the best
    /// estimate reached and `achieved` its error bound.
    #[error("quadrature did not converge: value {value:e}, achieved error bound {achieved:e}")]
    Quadrature { value: f64, achieved: f64 },

    #[error("regime error: {0}")]
    Regime(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("root solver: {0}")]
    Solver(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unsupported dimension n = {0}")]
    UnsupportedDimension(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
