use std::path::PathBuf;

use num_bigint::BigInt;

/// Errors raised across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unimodular map must have determinant +1 or -1, got {0}")]
    NotUnimodular(BigInt),

    #[error("form has zero discriminant")]
    DegenerateForm,

    #[error("discriminant has the wrong sign for this operation (D = {0})")]
    WrongDiscriminantSign(BigInt),

    #[error("form is reducible over the rationals")]
    ReducibleForm,

    #[error("k must be nonzero")]
    ZeroK,

    #[error("negative input to integer square root: {0}")]
    NegativeSqrt(BigInt),

    #[error("invalid search window ({lo}, {hi}]")]
    InvalidWindow { lo: u64, hi: u64 },

    #[error("invalid range [{lo}, {hi}]")]
    InvalidRange { lo: i64, hi: i64 },

    #[error("malformed reducible form (B, C) = ({b}, {c}): {reason}")]
    MalformedReducible { b: BigInt, c: BigInt, reason: &'static str },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("statistics over bound-limited results refused ({0} incomplete records)")]
    IncompleteResults(usize),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at record {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
