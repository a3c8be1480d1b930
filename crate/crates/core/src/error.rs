//! Error type shared by all pipeline stages.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input document (bad XML/CSV syntax).
    #[error("{format} parse error at {position}: {message}")]
    Parse {
        format: &'static str,
        position: String,
        message: String,
    },

    /// Structurally valid input that violates the log model.
    #[error("invalid log data ({context}): {message}")]
    Validation { context: String, message: String },

    /// Timestamp ordering precondition violated.
    #[error("timestamp order violation: {0}")]
    OrderViolation(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// Out-of-range or inconsistent parameter value.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Clustering could not produce or use a model.
    #[error("clustering: {0}")]
    Clustering(String),

    /// Problems with a cluster-name table.
    #[error("cluster naming: {0}")]
    Naming(String),

    /// Infeasible synthetic-log specification.
    #[error("synthetic log spec: {0}")]
    SynthSpec(String),

    #[error("label length mismatch: {pred} predicted vs {truth} ground-truth labels")]
    LabelLengthMismatch { pred: usize, truth: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn validation(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            context: context.into(),
            message: message.into(),
        }
    }
}
