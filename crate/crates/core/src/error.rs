use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error(
        "enumeration too large: {configurations} occupation configurations exceed the limit of {limit}; use the monte_carlo sampler"
    )]
    EnumerationTooLarge { configurations: f64, limit: f64 },

    #[error("inconclusive order fit: {0}")]
    Inconclusive(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn require_finite(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        domain(format!("{name} must be finite, got {x}"))
    }
}

pub(crate) fn require_positive(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        domain(format!("{name} must be positive and finite, got {x}"))
    }
}
