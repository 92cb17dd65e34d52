//! Sparse linear algebra over GF(2).

pub(crate) mod dense;
pub mod io;
mod matrix;
mod vector;

pub use matrix::{inverse_permutation, BitMatrix, ColumnPermutation};
pub use vector::BitVector;

pub(crate) use dense::IncrementalBasis;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("shape mismatch: {}x{} vs {}x{}", left.0, left.1, right.0, right.1)]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("matrix is rank deficient: rank {rank} with {rows} rows")]
    RankDeficient { rank: usize, rows: usize },
    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("index {index} listed twice")]
    DuplicateIndex { index: usize },
    #[error("not a permutation of 0..{len}")]
    NotAPermutation { len: usize },
    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyShape { rows: usize, cols: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
