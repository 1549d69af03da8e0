//! Error types shared across the pipeline.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The host has no registrable domain (empty, bare public suffix, ...).
    #[error("no registrable domain in {0:?}")]
    NoRegistrableDomain(String),

    /// A configuration value is outside its allowed range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A malformed input record; carries the line number and the reason.
    #[error("line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },

    /// A synthetic-stream plan that cannot be realized.
    #[error("invalid stream plan: {0}")]
    InvalidPlan(String),

    /// The brute-force oracle refuses instances above its size guard.
    #[error("oracle instance too large: {0}")]
    OracleTooLarge(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
