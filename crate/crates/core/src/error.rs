use thiserror::Error;

use crate::numerics::NumericsError;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter {field}: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error(transparent)]
    Numerics(#[from] NumericsError),

    #[error("{what} must be non-negative, got {value}")]
    NegativeArgument { what: &'static str, value: f64 },

    #[error(
        "case {requested} does not match the critical-value ordering at gamma_EC = {gamma_ec} (actual case {actual})"
    )]
    Classification {
        gamma_ec: f64,
        requested: u8,
        actual: u8,
    },

    #[error("no SINR ceiling exists without hardware impairments")]
    NoCeiling,

    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { got: usize, min: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParam {
        field,
        reason: reason.into(),
    }
}
