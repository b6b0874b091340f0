//! Dense linear algebra kernels: Cholesky, cyclic Jacobi eigensolver,
//! one-sided Jacobi SVD, LU, a Lanczos extremal eigensolver and
//! tolerance-based numerical rank.

mod cholesky;
mod eigen;
mod lanczos;
mod lu;
mod matrix;
mod svd;

use thiserror::Error;

pub use cholesky::{cholesky, SYMMETRY_TOL};
pub use eigen::{sym_eigen, sym_eigen_with_cap, SymEigen, DEFAULT_MAX_SWEEPS};
pub use lanczos::{largest_eigenpair, EigenPair, LanczosOptions};
pub use lu::Lu;
pub use matrix::{
    dot, norm2, solve_lower, solve_lower_matrix, solve_lower_transpose,
    solve_lower_transpose_matrix, DenseMatrix,
};
pub use svd::{orthonormal_complement, svd, svd_with_cap, SvdResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (relative asymmetry {relative_asymmetry:e})")]
    NotSymmetric { relative_asymmetry: f64 },
    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix is numerically singular (pivot column {index})")]
    Singular { index: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}

/// Default relative rank tolerance, `max(rows, cols) · ε`.
pub fn default_rel_tol(rows: usize, cols: usize) -> f64 {
    rows.max(cols).max(1) as f64 * f64::EPSILON
}

/// Number of singular values strictly above `rel_tol · σ_max`.
///
/// `singular_values` must be sorted nonincreasing.
pub fn numerical_rank(singular_values: &[f64], rel_tol: f64) -> usize {
    let smax = singular_values.first().copied().unwrap_or(0.0);
    if smax <= 0.0 {
        return 0;
    }
    let cutoff = rel_tol * smax;
    singular_values.iter().take_while(|&&s| s > cutoff).count()
}
