//! Error type shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("unit part of zero is undefined")]
    ZeroScalar,

    #[error("matrix entry at ({row}, {col}) has valuation {val} < 0")]
    NonIntegralEntry { row: usize, col: usize, val: i64 },

    #[error("hom constraint violated at ({row}, {col}): no nonzero map from a divisible summand to a free summand")]
    HomConstraint { row: usize, col: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("divisible basis is not linearly independent")]
    DependentDivisibleBasis,

    #[error("presentation is not contained in its ambient module: {0}")]
    NotContained(String),

    #[error("not a subobject: {0}")]
    NotSubobject(String),

    #[error("not a complex: composition of consecutive maps is nonzero at position {0}")]
    NotAComplex(usize),

    #[error("invalid ideal: {0}")]
    InvalidIdeal(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown report format {0:?}; supported formats: csv, json")]
    UnknownFormat(String),

    #[error(
        "too many generators ({0}); the localization diagram has 2^r vertices, refusing r > 16"
    )]
    TooManyGenerators(usize),

    #[error("window sweep of {cells} degrees is too large (limit {limit})")]
    WindowTooLarge { cells: u128, limit: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;
