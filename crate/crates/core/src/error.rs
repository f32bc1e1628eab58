//! Error types shared across the pricing library.

use thiserror::Error;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by pricing, quadrature and simulation routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A parameter failed validation. Names the offending field.
    #[error("invalid parameter `{field}`: {message}")]
    InvalidParam {
        /// Field name as it appears in the public API / CLI flags.
        field: &'static str,
        /// Human-readable description of the violation.
        message: String,
    },

    /// An evaluation point lies outside the mathematical domain of the
    /// function (e.g. spot at or below the barrier, non-positive maturity).
    #[error("domain error: {0}")]
    Domain(String),

    /// A routine was called outside the regime it is valid for
    /// (e.g. the driftless 1-D reduction with non-zero rates).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Adaptive quadrature exhausted its refinement budget before
    /// reaching the requested tolerance.
    #[error("quadrature tolerance not met: estimated error {estimated_error:e} exceeds tolerance {tolerance:e}")]
    ToleranceNotMet {
        /// Error estimate at the point refinement stopped.
        estimated_error: f64,
        /// Requested absolute tolerance.
        tolerance: f64,
    },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParam {
            field,
            message: message.into(),
        }
    }

    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }
}
