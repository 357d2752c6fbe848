use std::path::PathBuf;

use iqae_core::IqaeError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid arguments: {0}")]
    Usage(String),

    #[error("{0}")]
    Runtime(IqaeError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{}: line {line}: {message}", path.display())]
    Malformed {
        path: PathBuf,
        line: u64,
        message: String,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 3,
            CliError::Io { .. } | CliError::Malformed { .. } => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Errors raised while checking flags, before any computation.
pub fn usage(err: IqaeError) -> CliError {
    CliError::Usage(err.to_string())
}

impl From<IqaeError> for CliError {
    fn from(err: IqaeError) -> Self {
        CliError::Runtime(err)
    }
}

pub type CliResult<T> = Result<T, CliError>;
