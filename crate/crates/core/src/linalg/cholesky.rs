use super::{DenseMatrix, LinalgError};

/// Relative symmetry tolerance accepted on input.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Lower-triangular factor `L` with `S = L Lᵀ`.
///
/// A pivot is rejected when it falls below `n · ε` times the largest
/// diagonal entry of `S`; such a matrix cannot serve as a Gram matrix.
pub fn cholesky(s: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
    if !s.is_square() {
        return Err(LinalgError::NotSquare { rows: s.rows(), cols: s.cols() });
    }
    let asym = s.relative_asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(LinalgError::NotSymmetric { relative_asymmetry: asym });
    }
    let n = s.rows();
    let max_diag = s.diagonal().iter().fold(0.0_f64, |m, &d| m.max(d));
    let floor = (n as f64) * f64::EPSILON * max_diag;
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let lj = l.row(j)[..j].to_vec();
        let pivot = s[(j, j)] - lj.iter().map(|v| v * v).sum::<f64>();
        if pivot.is_nan() || pivot <= floor {
            return Err(LinalgError::NotPositiveDefinite { index: j, pivot });
        }
        let d = pivot.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            // symmetric average tolerates the admitted asymmetry
            let sij = 0.5 * (s[(i, j)] + s[(j, i)]);
            let li = &l.row(i)[..j];
            let acc: f64 = li.iter().zip(&lj).map(|(a, b)| a * b).sum();
            l[(i, j)] = (sij - acc) / d;
        }
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_factor_is_identity() {
        let l = cholesky(&DenseMatrix::identity(3)).unwrap();
        assert_eq!(l, DenseMatrix::identity(3));
    }

    #[test]
    fn diagonal_square_roots() {
        let l = cholesky(&DenseMatrix::from_diag(&[4.0, 9.0])).unwrap();
        assert_eq!(l, DenseMatrix::from_diag(&[2.0, 3.0]));
    }

    #[test]
    fn recomposes_two_by_two() {
        let s = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let l = cholesky(&s).unwrap();
        assert_eq!(l[(0, 1)], 0.0);
        let r = l.matmul(&l.transpose());
        assert!(r.sub(&s).frobenius_norm() <= 1e-14);
    }

    #[test]
    fn rejects_indefinite() {
        let s = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(cholesky(&s), Err(LinalgError::NotPositiveDefinite { index: 1, .. })));
    }

    #[test]
    fn rejects_asymmetric_and_rectangular() {
        let s = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 2.0]]).unwrap();
        assert!(matches!(cholesky(&s), Err(LinalgError::NotSymmetric { .. })));
        assert!(matches!(cholesky(&DenseMatrix::zeros(2, 3)), Err(LinalgError::NotSquare { .. })));
    }
}
