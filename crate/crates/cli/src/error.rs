use std::path::Path;

use thiserror::Error;

/// Failure classes with fixed process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid data: {0}")]
    Data(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Solver(proxama::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 2,
            CliError::Config(_) => 3,
            CliError::Data(_) => 4,
            CliError::Parse(_) => 5,
            CliError::Solver(_) => 1,
        }
    }

    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

impl From<proxama::Error> for CliError {
    fn from(e: proxama::Error) -> Self {
        use proxama::Error as E;
        match e {
            E::InvalidConfig(m) => CliError::Config(m),
            E::Argument(m) => CliError::Data(m),
            E::Dimension { .. } | E::IllConditioned(_) | E::Degenerate(_) => CliError::Data(e.to_string()),
            other => CliError::Solver(other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
