//! Dense reference backend for cross-checking the tensor-structured engine.
//!
//! Everything here works on plain `f64` matrices: a cyclic Jacobi
//! eigensolver for real symmetric matrices and the unitary propagator
//! `exp(-itA)` assembled from that eigendecomposition. The crate has no
//! knowledge of graph products or exact arithmetic, so agreement with the
//! main engine is an independent check rather than a restatement.

mod dense;
mod expm;
mod jacobi;

pub use dense::{ComplexMatrix, DenseMatrix};
pub use expm::{expm_power_series, expm_unitary};
pub use jacobi::{jacobi_eigen, EigenDecomposition, JacobiOptions};

/// Largest dimension the dense backend accepts.
pub const MAX_DIMENSION: usize = 4096;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum OracleError {
    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },
    #[error("matrix dimension {dim} exceeds the dense limit {limit}")]
    TooLarge { dim: usize, limit: usize },
    #[error("matrix data has {len} entries, expected {dim}x{dim}")]
    Shape { dim: usize, len: usize },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal mass {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },
}
