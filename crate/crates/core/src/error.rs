use std::path::PathBuf;

/// Errors raised by the core library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    /// A row of an input file failed validation. `line` is 1-based and counts the header.
    #[error("line {line}: {message}")]
    Data { line: usize, message: String },

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not enough draws: need at least {needed}, got {got}")]
    TooFewDraws { needed: usize, got: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
