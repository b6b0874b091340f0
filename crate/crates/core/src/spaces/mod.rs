//! Finite-dimensional Hilbert spaces described by a Gram matrix.
//!
//! A vector `v` holds coefficients against a fixed basis and has norm
//! `‖v‖² = vᵀ G v`. A functional is stored as the vector of its values on
//! the basis, so the pairing is `⟨f, v⟩ = fᵀ v` and the dual norm is
//! `‖f‖²_* = fᵀ G⁻¹ f`. With `G = L Lᵀ`, `Lᵀ` maps the space isometrically
//! onto Euclidean space and `L⁻¹` does the same for the dual.

mod csv;

use std::sync::Arc;

use thiserror::Error;

use crate::linalg::{
    cholesky, dot, norm2, solve_lower, solve_lower_transpose, DenseMatrix, LinalgError,
};

pub use self::csv::{format_matrix, parse_matrix, read_matrix_csv, write_matrix_csv, CsvError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpaceError {
    #[error("dimension mismatch: space has dimension {expected}, vector has length {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid Gram matrix: {0}")]
    InvalidGram(#[from] LinalgError),
}

#[derive(Debug)]
struct GramInner {
    gram: DenseMatrix,
    factor: DenseMatrix,
}

/// Gram-equipped finite-dimensional Hilbert space. Cloning is cheap.
#[derive(Debug, Clone)]
pub struct GramSpace {
    inner: Arc<GramInner>,
}

impl GramSpace {
    /// Validates `gram` (square, symmetric, positive definite) and caches
    /// its Cholesky factor.
    pub fn new(gram: DenseMatrix) -> Result<Self, SpaceError> {
        let factor = cholesky(&gram)?;
        Ok(GramSpace { inner: Arc::new(GramInner { gram, factor }) })
    }

    pub fn euclidean(dim: usize) -> Self {
        let id = DenseMatrix::identity(dim);
        GramSpace { inner: Arc::new(GramInner { gram: id.clone(), factor: id }) }
    }

    pub fn dim(&self) -> usize {
        self.inner.gram.rows()
    }

    pub fn gram(&self) -> &DenseMatrix {
        &self.inner.gram
    }

    /// Lower-triangular `L` with `G = L Lᵀ`.
    pub fn cholesky_factor(&self) -> &DenseMatrix {
        &self.inner.factor
    }

    pub fn same_space(&self, other: &GramSpace) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }

    fn check(&self, len: usize) -> Result<(), SpaceError> {
        if len != self.dim() {
            return Err(SpaceError::DimensionMismatch { expected: self.dim(), found: len });
        }
        Ok(())
    }

    pub fn inner_product(&self, u: &[f64], v: &[f64]) -> Result<f64, SpaceError> {
        self.check(u.len())?;
        self.check(v.len())?;
        Ok(dot(u, &self.inner.gram.matvec(v)))
    }

    /// `sqrt(vᵀ G v)`, evaluated as the Euclidean norm of `Lᵀ v`.
    pub fn norm(&self, v: &[f64]) -> Result<f64, SpaceError> {
        self.check(v.len())?;
        Ok(norm2(&self.inner.factor.tr_matvec(v)))
    }

    /// `sqrt(fᵀ G⁻¹ f)` through one triangular solve.
    pub fn dual_norm(&self, f: &DualVector) -> Result<f64, SpaceError> {
        self.dual_norm_of(&f.coeffs)
    }

    pub fn dual_norm_of(&self, coeffs: &[f64]) -> Result<f64, SpaceError> {
        self.check(coeffs.len())?;
        Ok(norm2(&solve_lower(&self.inner.factor, coeffs)))
    }

    /// Riesz map `v ↦ (w ↦ vᵀ G w)`.
    pub fn riesz(&self, v: &[f64]) -> Result<DualVector, SpaceError> {
        self.check(v.len())?;
        Ok(DualVector { space: self.clone(), coeffs: self.inner.gram.matvec(v) })
    }

    /// Inverse Riesz map, `G⁻¹ f`, via two triangular solves.
    pub fn riesz_inverse(&self, f: &[f64]) -> Result<Vec<f64>, SpaceError> {
        self.check(f.len())?;
        let y = solve_lower(&self.inner.factor, f);
        Ok(solve_lower_transpose(&self.inner.factor, &y))
    }

    pub fn whitener(&self) -> Whitener {
        Whitener { space: self.clone() }
    }
}

/// A functional on a [`GramSpace`], stored by its values on the basis.
#[derive(Debug, Clone)]
pub struct DualVector {
    space: GramSpace,
    coeffs: Vec<f64>,
}

impl DualVector {
    pub fn new(space: &GramSpace, coeffs: Vec<f64>) -> Result<Self, SpaceError> {
        space.check(coeffs.len())?;
        Ok(DualVector { space: space.clone(), coeffs })
    }

    pub fn zero(space: &GramSpace) -> Self {
        DualVector { space: space.clone(), coeffs: vec![0.0; space.dim()] }
    }

    pub fn space(&self) -> &GramSpace {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn pair(&self, v: &[f64]) -> Result<f64, SpaceError> {
        self.space.check(v.len())?;
        Ok(dot(&self.coeffs, v))
    }

    pub fn dual_norm(&self) -> f64 {
        norm2(&solve_lower(self.space.cholesky_factor(), &self.coeffs))
    }
}

/// Isometries between a [`GramSpace`] (and its dual) and Euclidean space.
#[derive(Debug, Clone)]
pub struct Whitener {
    space: GramSpace,
}

impl Whitener {
    /// `v ↦ Lᵀ v`, so that `‖v‖ = |Lᵀ v|`.
    pub fn to_white(&self, v: &[f64]) -> Vec<f64> {
        self.space.cholesky_factor().tr_matvec(v)
    }

    /// Inverse of [`to_white`](Self::to_white): `y ↦ L⁻ᵀ y`.
    pub fn from_white(&self, y: &[f64]) -> Vec<f64> {
        solve_lower_transpose(self.space.cholesky_factor(), y)
    }

    /// `f ↦ L⁻¹ f`, so that `‖f‖_* = |L⁻¹ f|`.
    pub fn to_white_dual(&self, f: &[f64]) -> Vec<f64> {
        solve_lower(self.space.cholesky_factor(), f)
    }

    /// `z ↦ L z`.
    pub fn from_white_dual(&self, z: &[f64]) -> Vec<f64> {
        self.space.cholesky_factor().matvec(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag41() -> GramSpace {
        GramSpace::new(DenseMatrix::from_diag(&[4.0, 1.0])).unwrap()
    }

    #[test]
    fn euclidean_norm() {
        let s = GramSpace::euclidean(2);
        assert_eq!(s.norm(&[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(diag41().norm(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn weighted_norm() {
        assert!((diag41().norm(&[1.0, 1.0]).unwrap() - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn dual_norms() {
        let e = GramSpace::euclidean(2);
        assert_eq!(e.dual_norm(&DualVector::new(&e, vec![0.0, 1.0]).unwrap()).unwrap(), 1.0);
        let s = diag41();
        let f = DualVector::new(&s, vec![1.0, 0.0]).unwrap();
        assert!((s.dual_norm(&f).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(DualVector::zero(&s).dual_norm(), 0.0);
    }

    #[test]
    fn dimension_checks() {
        let s = diag41();
        assert_eq!(
            s.norm(&[1.0]),
            Err(SpaceError::DimensionMismatch { expected: 2, found: 1 })
        );
        assert!(DualVector::new(&s, vec![1.0; 3]).is_err());
        assert!(s.dual_norm_of(&[1.0; 3]).is_err());
    }

    #[test]
    fn whitening_diag() {
        let s = GramSpace::euclidean(3);
        assert_eq!(s.whitener().to_white(&[1.0, 2.0, 3.0]), vec![1.0, 2.0, 3.0]);
        assert_eq!(diag41().whitener().to_white(&[1.0, 0.0]), vec![2.0, 0.0]);
    }

    #[test]
    fn rejects_bad_gram() {
        let g = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        assert!(matches!(GramSpace::new(g), Err(SpaceError::InvalidGram(_))));
    }
}
