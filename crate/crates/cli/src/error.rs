use std::process::ExitCode;

/// Failure classes, each with its own exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 1,
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        })
    }

    /// Any failure while reading or checking a config counts as a config
    /// error.
    pub fn config(err: impl std::fmt::Display) -> Self {
        CliError::Config(err.to_string())
    }
}

impl From<polarlab::Error> for CliError {
    fn from(err: polarlab::Error) -> Self {
        match err {
            e @ polarlab::Error::Config { .. } => CliError::Config(e.to_string()),
            e => CliError::Runtime(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
