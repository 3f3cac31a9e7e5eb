use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] driftlab_core::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Inputs a statistic is not defined on.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("nothing to emit: {0}")]
    Empty(String),

    /// A stored aggregate no longer matches its rows.
    #[error("inconsistent result table: {0}")]
    Inconsistent(String),

    #[error("cannot write `{path}`: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
