use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Bad configuration value (out-of-range threshold, unknown strategy
    /// name, inconsistent stage schedule, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed or inconsistent input data.
    #[error("data error: {0}")]
    Data(String),

    /// A stated invariant was violated at runtime. These are hard failures:
    /// the computation must not proceed on corrupt state.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// A correctness verifier plugin failed. Distinct from a negative
    /// verdict — a failed verifier must never be silently scored.
    #[error("verifier failure: {0}")]
    Verifier(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
