//! Batch front-end for `fredholm-core`: spec files in, reports out.

pub mod num;
pub mod render;
pub mod run;
pub mod spec;

use thiserror::Error;

pub use run::{run, Command, Format, Outcome, RunOptions};

/// Exit codes. Verdicts map to 0/1/2; anything above 2 is an error.
pub mod exit {
    pub const FREDHOLM: i32 = 0;
    pub const SUCCESS: i32 = 0;
    pub const NOT_FREDHOLM: i32 = 1;
    pub const UNDECIDED: i32 = 2;
    /// Bad arguments or an invalid spec file.
    pub const INPUT: i32 = 3;
    /// The computation itself failed (cutoff too small, degenerate mode, ...).
    pub const COMPUTATION: i32 = 4;
    /// `verify` found a disagreement between report and oracle.
    pub const ORACLE_MISMATCH: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("{origin}:{line}:{column}: {msg}")]
    Syntax {
        origin: String,
        line: usize,
        column: usize,
        msg: String,
    },

    #[error("{origin}: field `{field}`: {msg}")]
    Schema { origin: String, field: String, msg: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] fredholm_core::Error),

    #[error("csv export: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(_) => exit::COMPUTATION,
            _ => exit::INPUT,
        }
    }
}
