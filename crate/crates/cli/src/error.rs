//! Error type with the process exit-code contract: 2 for configuration
//! problems, 3 for I/O problems, 1 for failures during a run.

use std::path::Path;

use heavylimits::cluster::ClusterError;
use heavylimits::limit::LimitError;
use heavylimits::models::ModelError;
use heavylimits::verify::VerifyError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("run failed: {0}")]
    Run(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Run(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

/// Experiment errors: invalid settings map to the config exit code, anything
/// that surfaced mid-computation to the run exit code.
impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::BadConfig(_) | VerifyError::IidOnly => CliError::Config(e.to_string()),
            other => CliError::Run(other.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<ClusterError> for CliError {
    fn from(e: ClusterError) -> Self {
        CliError::Run(e.to_string())
    }
}

impl From<LimitError> for CliError {
    fn from(e: LimitError) -> Self {
        CliError::Run(e.to_string())
    }
}
