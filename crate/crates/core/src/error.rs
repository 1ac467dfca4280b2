//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Arguments outside the documented domain of an operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A parameter value the implementation deliberately does not support.
    #[error("unsupported parameter: {0}")]
    Unsupported(String),

    /// An iterate left its declared convex domain by more than the tolerance.
    #[error("iterate left the domain at step {step} (excess {excess:.3e})")]
    DomainViolation { step: usize, excess: f64 },

    /// A modulus of uniform convexity was queried outside (0, infinity) x (0, 2]
    /// or produced a value outside (0, 1].
    #[error("modulus evaluation error: {0}")]
    Modulus(String),

    /// A rate formula was asked for without the certificates it needs.
    #[error("missing certificate: {0}")]
    MissingCertificate(String),

    /// A theorem hypothesis is violated by the supplied data.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// Numerical failure (optimizer did not converge, bound not representable, ...).
    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
