//! Experiment driver for `nepv-core`: reads an INI experiment file, builds
//! the problem and solver, and writes traces and summaries.

pub mod commands;
pub mod config;
pub mod output;
pub mod problem;

pub use commands::{execute, Command};
pub use config::{ExperimentConfig, InitialGuess, ProblemConfig, StudyConfig, StudyKind};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Solver(#[from] nepv_core::NepvError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit code: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}
