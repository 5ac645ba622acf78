use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] physio_core::Error),

    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    /// 2 usage/validation, 3 I/O, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        use physio_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Numerical(_) => 4,
            CliError::Core(e) => match e {
                E::Io(_) | E::Json(_) => 3,
                E::ZeroVariance(_) | E::SingleCluster => 4,
                _ => 2,
            },
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
