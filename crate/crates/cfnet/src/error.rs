use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] cfnet_core::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("invalid experiment: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// Errors caused by the user's input rather than by a computation.
    pub fn is_bad_input(&self) -> bool {
        matches!(
            self,
            HarnessError::Config(_)
                | HarnessError::InvalidSpec(_)
                | HarnessError::Json(_)
                | HarnessError::Io { .. }
                | HarnessError::Core(cfnet_core::Error::InvalidConfig(_))
                | HarnessError::Core(cfnet_core::Error::InvalidThresholds { .. })
        )
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
