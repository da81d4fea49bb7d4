use thiserror::Error;

/// Errors produced by the estimators, the order-statistics engine and the
/// simulation harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation,
    /// e.g. a probability outside (0, 1) or a non-finite input.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data violates a structural invariant (ordering of a summary,
    /// sample size of the wrong form, malformed configuration).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A numerical routine could not meet its accuracy target or produced a
    /// value that signals broken inputs (non-positive denominator, negative
    /// variance, non-finite intermediate).
    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Domain(format!("{what} must be finite, got {x}")))
    }
}
