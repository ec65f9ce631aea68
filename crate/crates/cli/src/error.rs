use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, malformed or inconsistent input files and flags.
    #[error("{0}")]
    Input(String),
    /// Solver breakdown on otherwise valid input.
    #[error("{0}")]
    Numeric(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(_) => 3,
            _ => 2,
        }
    }
}

impl From<divweb::Error> for CliError {
    fn from(e: divweb::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

impl From<divweb::ExprError> for CliError {
    fn from(e: divweb::ExprError) -> Self {
        divweb::Error::from(e).into()
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}
