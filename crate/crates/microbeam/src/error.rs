use std::io;
use std::path::PathBuf;

/// Errors surfaced by the CLI and its library entry points.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad configuration, arguments or file contents.
    #[error("{0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Core(#[from] microbeam_core::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        CliError::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    /// 0 success, 1 validation, 2 I/O, 3 internal invariant violation.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Format { .. } => 1,
            CliError::Io { .. } => 2,
            CliError::Invariant(_) => 3,
            CliError::Core(microbeam_core::Error::Numerical(_)) => 3,
            CliError::Core(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
