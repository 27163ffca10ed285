//! Error type shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("truncation cap must be at least 1")]
    CapTooSmall,

    #[error("map has a linear part; apply the linear reduction first")]
    LinearPartPresent,

    #[error("linear part is not nilpotent: det(I - t L) has term {witness}")]
    NotNilpotent { witness: String },

    #[error("{what} {requested} exceeds guard {limit}")]
    GuardExceeded {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("matrix entries have constant terms; the trace-log series needs an explicit q-cap")]
    ConstantTermEntries,

    #[error("map is not Keller; the check is conditional on det(I - V') = 1")]
    NonKellerInput,

    #[error("internal inconsistency (arithmetic bug): {0}")]
    InternalInconsistency(String),

    #[error("dimension {n} out of supported range: {reason}")]
    UnsupportedDimension { n: usize, reason: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;
