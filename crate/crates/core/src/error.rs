use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain where an operation is defined or validated.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical routine failed to converge; `residual` is the best value reached.
    #[error("numeric error: {message} (best residual {residual:e})")]
    Numeric { message: String, residual: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>, residual: f64) -> Self {
        Error::Numeric {
            message: msg.into(),
            residual,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
