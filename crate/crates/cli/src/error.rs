use std::path::Path;

use mixnet_core::{Error, SimError};
use thiserror::Error;

/// Failures, grouped by the exit code they map to.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub(crate) fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Data(format!("{}: {err}", path.display()))
    }

    /// Configuration errors reported by the library are usage errors.
    pub(crate) fn config(err: Error) -> Self {
        CliError::Usage(err.to_string())
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::InvalidInput(m) => CliError::Data(m),
            Error::Sim(e) => e.into(),
            e @ (Error::RankDeficient { .. } | Error::ChainStuck { .. }) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(err: SimError) -> Self {
        match err {
            SimError::InvalidSpec(m) => CliError::Usage(m),
            e => CliError::Numerical(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
