//! Command-line front end: reads a similarity matrix, certifies a clustering
//! of it and writes a JSON report.
//!
//! Exit codes: 0 certified, 1 input error, 2 non-certifying run, 3 the
//! enumeration oracle found a tree outside the certified ball.

pub mod commands;
pub mod input;
pub mod report;

use thiserror::Error;

pub use commands::{run, Cli, Command, Outcome, RunConfig};

pub const EXIT_CERTIFIED: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_NOT_CERTIFIED: u8 = 2;
pub const EXIT_ORACLE_VIOLATION: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("negative similarity {value} at row {row}, column {col}")]
    Negative { row: usize, col: usize, value: f64 },

    #[error("at least two points are required, got {0}")]
    TooFewPoints(usize),

    #[error("invalid option: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] hcss_core::Error),
}

impl CliError {
    /// Solver failures mean no certificate; everything else is bad input.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(hcss_core::Error::Numerical(_) | hcss_core::Error::Inconsistent(_)) => EXIT_NOT_CERTIFIED,
            _ => EXIT_INPUT,
        }
    }
}
