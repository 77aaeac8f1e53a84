//! Command-line front end for the `poisson-sums` library: single values,
//! sweeps over `n`, and pass/fail verification tables.

pub mod args;
pub mod commands;
pub mod config;
pub mod table;

use std::io;

use thiserror::Error;

pub use args::{run, Cli};
pub use config::{RunConfig, Settings};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "POISSON_SUMS_WORKERS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => exit::CONFIG,
            CliError::Numerical(_) => exit::NON_CONVERGED,
        }
    }
}

pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const NON_CONVERGED: i32 = 3;
}

/// Rendered output and the exit status it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub exit_code: i32,
    /// Set when the output was written to `--out`.
    pub written_to: Option<std::path::PathBuf>,
}
