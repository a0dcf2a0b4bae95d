use std::path::PathBuf;

use exchange_lab_core::Error as CoreError;

/// Failure of a command, carrying its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid configuration: {0}")]
    Schema(String),
    #[error("numerical failure: {0}")]
    Numeric(CoreError),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Io { .. } => 1,
            LabError::Schema(_) => 2,
            LabError::Numeric(_) => 3,
            LabError::Verification(_) => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io { path: path.into(), source }
    }

    /// Errors raised while turning a configuration into a model.
    pub fn schema(e: impl std::fmt::Display) -> Self {
        LabError::Schema(e.to_string())
    }
}
