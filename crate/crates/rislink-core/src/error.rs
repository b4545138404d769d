//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Operation undefined because a denominator degenerates.
    #[error("singular input: {0}")]
    Singular(String),

    /// An iterative numeric method exhausted its budget. Carries the error
    /// estimate achieved when the budget ran out.
    #[error("{what}: failed to converge (achieved error estimate {achieved:.3e})")]
    Convergence { what: String, achieved: f64 },

    /// Requested operation is not defined for the configured model.
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    /// One or more configuration invariants are violated.
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    /// Config file or `--set` override could not be parsed.
    #[error("config parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn singular(msg: impl Into<String>) -> Self {
        Error::Singular(msg.into())
    }
}
