//! Command-line front end: job configuration, model files, and the
//! abstract / synthesize / compare / simulate / convergence commands.

pub mod commands;
pub mod config;
pub mod format;

use std::io;

use thiserror::Error;

/// Process exit codes, one per error class.
pub mod exit {
    pub const OK: i32 = 0;
    /// A Monte Carlo estimate contradicted the synthesized bounds.
    pub const VERDICT: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const VALIDATION: i32 = 3;
    pub const CAPACITY: i32 = 4;
    pub const IO: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] odimdp::Error),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("model file error: {0}")]
    Format(String),
    #[error("{0} simulated initial state(s) fell outside their bounds")]
    Verdict(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use odimdp::Error as E;
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Io(_) | CliError::Format(_) => exit::IO,
            CliError::Verdict(_) => exit::VERDICT,
            CliError::Core(e) => match e {
                E::Capacity { .. } => exit::CAPACITY,
                E::Validation { .. } | E::InvalidAmbiguity(_) => exit::VALIDATION,
                E::Shape(_) | E::Labeling(_) | E::InvalidInput(_) | E::UnknownBenchmark(_) | E::Unsupported(_) => {
                    exit::CONFIG
                }
            },
        }
    }
}
