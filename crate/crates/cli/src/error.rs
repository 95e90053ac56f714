use std::path::PathBuf;

/// CLI failures, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad configuration or a missing input file. Exit code 2.
    #[error("config: {0}")]
    Config(String),
    /// Invalid dataset contents. Exit code 3.
    #[error("data: {0}")]
    Data(String),
    /// Anything that fails while running. Exit code 1.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Runtime(_) => 1,
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
        }
    }

    pub(crate) fn output(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        CliError::Runtime(format!("writing {}: {e}", path.display()))
    }

    pub(crate) fn missing(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        CliError::Config(format!("cannot read {}: {e}", path.display()))
    }
}

impl From<dpem_core::Error> for CliError {
    fn from(e: dpem_core::Error) -> Self {
        use dpem_core::Error as E;
        match e {
            E::Io { .. } | E::InvalidArgument(_) => CliError::Config(e.to_string()),
            E::Data { .. } | E::MissingColumn(_) | E::Csv(_) => CliError::Data(e.to_string()),
            E::Json(_) | E::TooFewDraws { .. } => CliError::Runtime(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn resolve(base: Option<&std::path::Path>, path: &std::path::Path) -> PathBuf {
    match base {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}
