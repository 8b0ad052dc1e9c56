use std::fmt;

use thiserror::Error;

use crate::reconstruct::UnrealizableWitness;

/// Which invariant a rejected matrix entry broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixViolation {
    NonzeroDiagonal,
    Asymmetric,
    NonPositive,
}

impl fmt::Display for MatrixViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixViolation::NonzeroDiagonal => "nonzero diagonal",
            MatrixViolation::Asymmetric => "asymmetric",
            MatrixViolation::NonPositive => "non-positive",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// Syntax error in a CSV or JSON document. Line and column are 1-based;
    /// a column of 0 means the whole line.
    #[error("malformed input at line {line}, column {column}: {message}")]
    MalformedInput {
        line: usize,
        column: usize,
        message: String,
    },

    /// Matrix entry at 1-based `(row, col)` breaks a dissimilarity invariant.
    #[error("invalid matrix: {violation} at ({row},{col})")]
    InvalidMatrix {
        row: usize,
        col: usize,
        violation: MatrixViolation,
    },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("unknown vertex {vertex} (valid labels are 1..={n})")]
    UnknownVertex { vertex: usize, n: usize },

    #[error("duplicate index {0}")]
    DuplicateIndex(usize),

    #[error("need at least {min} points, got {n}")]
    TooSmall { n: usize, min: usize },

    #[error("n = {n} exceeds the enumeration cap of {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("bad Prüfer sequence: {0}")]
    BadSequence(String),

    #[error("bad weight range: {0}")]
    BadRange(String),

    #[error("values from different numeric policies mixed in one computation")]
    MixedPolicy,

    #[error("not realizable: {0}")]
    Unrealizable(Box<UnrealizableWitness>),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
