use thiserror::Error;

/// Errors raised by the model, design routines, protocol logic and simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates its declared range. `field` names the offending input.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    /// A closed form was evaluated outside its domain (e.g. a non-positive attempt rate).
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure did not produce a result (no bracket, no convergence).
    #[error("analysis failure: {0}")]
    Analysis(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Validation-class errors map to exit code 2 in the CLI, everything else to 1.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::Domain(_) | Error::Config(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_positive_rate(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "attempt rate must be positive and finite, got {lambda}"
        )))
    }
}
