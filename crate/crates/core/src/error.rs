use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("schema mismatch: expected {expected}, found {found}")]
    Schema { expected: String, found: String },

    #[error("empty sample")]
    EmptySample,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Row/column-addressed failure while ingesting tabular data.
    #[error("csv error at row {row}, column `{column}`: {message}")]
    Csv {
        row: usize,
        column: String,
        message: String,
    },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("model has not been fitted")]
    NotFitted,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
