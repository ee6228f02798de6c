//! Config-driven runner for the `nlground` toolkit.
//!
//! Exit codes: 0 success, 2 invalid input, 3 solver non-convergence,
//! 4 oracle or criterion failure.

pub mod config;
pub mod run;
mod verify;

pub use config::{load_config, parse_config, RunConfig, Task};
pub use run::{run, RunOutput, Status};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{key}: {message}")]
    Config { key: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] nlground::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use nlground::Error as E;
        match self {
            CliError::Config { .. } | CliError::Io(_) => 2,
            CliError::Core(E::NumericFailure(_)) => 3,
            CliError::Core(E::OracleFailure(_)) => 4,
            CliError::Core(_) => 2,
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
