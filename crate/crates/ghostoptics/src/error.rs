use std::path::PathBuf;

use ghostoptics_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("numerical refusal: {0}")]
    Numerical(CoreError),
    #[error("{0}")]
    Model(CoreError),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("format error in {path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl RunError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        RunError::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        RunError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        RunError::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit status: 2 config, 3 numerical refusal, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config { .. } | RunError::Model(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io { .. } | RunError::Format { .. } => 4,
        }
    }
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        if e.is_numerical_refusal() || matches!(e, CoreError::Estimation(_)) {
            RunError::Numerical(e)
        } else {
            RunError::Model(e)
        }
    }
}

pub type Result<T> = std::result::Result<T, RunError>;
