//! Medium files, sweep configuration, CSV output and the `viscowave`
//! command-line tool built on [`viscowave_core`].
//!
//! Exit codes: 0 when every check passes, 1 on a physics-check failure,
//! 2 on usage or parse errors.

pub mod cli;
pub mod commands;
pub mod config;
pub mod format;
pub mod mediumfile;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("{0}")]
    Physics(String),
    #[error(transparent)]
    Core(#[from] viscowave_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } | CliError::Io(_) => 2,
            CliError::Physics(_) | CliError::Core(_) => 1,
        }
    }
}
