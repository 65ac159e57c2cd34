use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Rejected before any work starts.
    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Runtime(#[from] pouw_core::Error),

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write output: {0}")]
    Write(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Read { .. } => 2,
            CliError::Runtime(_) | CliError::Write(_) => 1,
        }
    }
}

/// Turns a library error raised while checking inputs into a config error.
pub(crate) fn invalid(context: &str) -> impl FnOnce(pouw_core::Error) -> CliError + '_ {
    move |e| CliError::Config(format!("{context}: {e}"))
}
