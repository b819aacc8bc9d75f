use thiserror::Error;

/// Errors raised by the operator algebra, the limit-operator machinery and
/// the numerical oracle.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("structure mismatch: {0}")]
    StructureMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("not representable in the r^nu coefficient class: {0}")]
    NotRepresentable(String),

    #[error("mode {mode}: {reason}")]
    DegenerateMode { mode: String, reason: String },

    #[error("grid error: {0}")]
    Grid(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(
        "cutoff {cutoff} certifies weights only in [-{certified}, {certified}], requested [{lo}, {hi}]"
    )]
    CutoffTooSmall {
        cutoff: f64,
        certified: f64,
        lo: f64,
        hi: f64,
    },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
