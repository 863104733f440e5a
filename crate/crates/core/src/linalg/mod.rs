//! Complex linear algebra: dense matrices for local element work and
//! oracles, compressed sparse row storage for the global system, and a
//! sparse LU factorization with a minimum-degree fill-reducing ordering.

mod dense;
mod lu;
mod ordering;
mod sparse;

use core::fmt;

pub use dense::{dense_solve, DenseLu, DenseMatrix};
pub use lu::SparseLu;
pub use ordering::minimum_degree;
pub use sparse::{CsrMatrix, TripletBuilder};

#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    DimensionMismatch { expected: usize, found: usize },
    NotSquare { rows: usize, cols: usize },
    /// Structural or numerical singularity; `pivot` is the elimination step.
    Singular { pivot: usize },
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            LinalgError::NotSquare { rows, cols } => write!(f, "matrix is {rows}x{cols}, not square"),
            LinalgError::Singular { pivot } => write!(f, "matrix is singular at pivot {pivot}"),
        }
    }
}

impl core::error::Error for LinalgError {}

/// Max-norm of a complex vector.
pub fn norm_inf(x: &[crate::C64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.norm()))
}

/// Euclidean norm of a complex vector.
pub fn norm2(x: &[crate::C64]) -> f64 {
    libm::sqrt(x.iter().map(|v| v.norm_sqr()).sum::<f64>())
}
