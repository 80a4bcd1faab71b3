use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("drift specification not validated for {0}")]
    Unvalidated(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    Quadrature { tolerance: f64, estimate: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidInput(msg()))
    }
}

pub(crate) fn ensure_time(t: f64) -> Result<()> {
    ensure(t.is_finite() && t > 0.0, || format!("time must be positive and finite, got {t}"))
}
