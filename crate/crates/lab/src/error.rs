use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
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
    #[error(transparent)]
    Core(#[from] condorcet_core::Error),
    #[error("thread pool: {0}")]
    Pool(String),
}

impl LabError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Core(e) if is_input_error(e) => 2,
            _ => 1,
        }
    }
}

/// Core errors that can only come from a bad document or parameter.
fn is_input_error(e: &condorcet_core::Error) -> bool {
    use condorcet_core::Error as E;
    !matches!(
        e,
        E::SingularSystem | E::HorizonExceeded { .. } | E::ResourceLimit(_)
    )
}

pub type Result<T> = std::result::Result<T, LabError>;
