use std::fmt;

use thiserror::Error;

/// Failure of a command, mapped onto a process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Schema(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    pub fn io(path: &std::path::Path, e: impl fmt::Display) -> Self {
        CliError::Runtime(format!("{}: {e}", path.display()))
    }
}

impl From<stroblim_core::Error> for CliError {
    fn from(e: stroblim_core::Error) -> Self {
        match e {
            stroblim_core::Error::InvalidScenario(msg) => CliError::Schema(msg),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

/// Success or verdict of a completed command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Pass,
    Fail,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok | Outcome::Pass => 0,
            Outcome::Fail => 1,
        }
    }
}
