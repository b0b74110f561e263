use std::io;
use std::path::PathBuf;

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed or inconsistent flags.
    #[error("{0}")]
    Usage(String),
    /// The model rejected the request.
    #[error(transparent)]
    Domain(#[from] linclone_core::Error),
    /// Reading or writing a file failed.
    #[error("{path}: {source}")]
    Io {
        /// File involved.
        path: PathBuf,
        /// Underlying error.
        source: io::Error,
    },
    /// At least one verification check breached its tolerance.
    #[error("{failed} of {total} verification checks failed")]
    Verification {
        /// Failed checks.
        failed: usize,
        /// Checks run.
        total: usize,
    },
}

impl CliError {
    /// Process exit code.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Domain(_) => 3,
            Self::Io { .. } => 4,
            Self::Verification { .. } => 5,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}

/// Result alias for command execution.
pub type CliResult<T> = Result<T, CliError>;
