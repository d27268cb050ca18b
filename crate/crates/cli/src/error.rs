use std::path::PathBuf;

use thiserror::Error;

/// Errors of the command-line layer, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// The acceptance inequalities did not hold (exit 1).
    #[error("check failed: {0}")]
    Failed(String),
    /// Bad configuration, flags, or input columns (exit 2).
    #[error("configuration error: {0}")]
    Config(String),
    /// A file is not in the expected format (exit 3).
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// Anything that went wrong while computing (exit 3).
    #[error(transparent)]
    Core(autodecompose_core::Error),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Format { .. } | CliError::Io { .. } | CliError::Core(_) | CliError::Runtime(_) => 3,
        }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        CliError::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<autodecompose_core::Error> for CliError {
    fn from(e: autodecompose_core::Error) -> Self {
        match e {
            autodecompose_core::Error::Config(m) => CliError::Config(m),
            other => CliError::Core(other),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(format!("csv: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
