use std::io;

use thiserror::Error;

use crate::geometry::Signature;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid signature ({s}, {r}): both counts must be at least 1")]
    InvalidSignature { s: usize, r: usize },

    #[error("dimension mismatch: expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("signature mismatch: {left} vs {right}")]
    SignatureMismatch { left: Signature, right: Signature },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("bundle dimension 2^{order} * {n} overflows usize")]
    Overflow { n: usize, order: u32 },

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
