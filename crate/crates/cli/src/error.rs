use tempus_core::{CampaignError, Error};
use thiserror::Error;

/// Failures of a CLI run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("hypothesis violation: {0}")]
    Hypothesis(Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Io(_) => 2,
            CliError::Hypothesis(_) => 3,
        }
    }

    /// Classifies a library error raised while certifying; `key` names the
    /// config entry blamed for malformed input.
    pub fn from_library(err: Error, key: &str) -> Self {
        if err.is_hypothesis_violation() {
            CliError::Hypothesis(err)
        } else {
            CliError::Config {
                key: key.to_string(),
                message: err.to_string(),
            }
        }
    }

    pub fn from_campaign(err: CampaignError) -> Self {
        match Self::from_library(err.source, "perturbation") {
            CliError::Hypothesis(e) => CliError::Hypothesis(e),
            CliError::Config { key, message } => CliError::Config {
                key,
                message: format!("trial with seed {}: {message}", err.seed),
            },
            other => other,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
