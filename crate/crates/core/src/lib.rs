//! Recognize tree metrics and rebuild the unique positive-weighted tree on
//! `1..=n` whose path weights reproduce a given dissimilarity matrix.
//!
//! ```
//! use tree_realize::{reconstruct, DissimilarityMatrix, Policy};
//!
//! let p = Policy::Exact;
//! let m = DissimilarityMatrix::new(p, vec![
//!     vec![p.from_integer(0), p.from_integer(3), p.from_integer(1)],
//!     vec![p.from_integer(3), p.from_integer(0), p.from_integer(2)],
//!     vec![p.from_integer(1), p.from_integer(2), p.from_integer(0)],
//! ]).unwrap();
//! let t = reconstruct(&m).unwrap();
//! assert_eq!(t.topology(), vec![(1, 3), (2, 3)]);
//! ```

// Witnesses are returned by value; failures are rare and off the hot path.
#![allow(clippy::result_large_err)]

mod arith;
pub mod cli;
pub mod conditions;
mod error;
pub mod io;
mod matrix;
pub mod oracle;
pub mod reconstruct;
mod scalar;
mod tree;

pub use conditions::{check_all, check_all_with, classify_quadruple, CheckOptions, CheckReport, QuadrupleKind};
pub use error::{Error, MatrixViolation, Result};
pub use matrix::{DissimilarityMatrix, Vertex};
pub use oracle::{count_realizations, random_weighted_tree, RealizationCensus};
pub use reconstruct::{find_pendant, reconstruct, PendantCertificate, UnrealizableWitness};
pub use scalar::{Policy, Scalar};
pub use tree::{all_pairs_weights, path_weight, trees_equal, Edge, WeightedTree};
