use super::matrix::{dot, norm2};
use super::{DenseMatrix, LinalgError, DEFAULT_MAX_SWEEPS};

/// Full singular value decomposition `M = U Σ Vᵀ`.
///
/// `singular_values` has `min(rows, cols)` entries in nonincreasing order;
/// `left` is `rows x rows` and `right` is `cols x cols`, both orthogonal.
/// Columns beyond `min(rows, cols)` complete the bases and span the left
/// and right null spaces.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub singular_values: Vec<f64>,
    pub left: DenseMatrix,
    pub right: DenseMatrix,
}

impl SvdResult {
    pub fn max_singular_value(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// `U Σ Vᵀ` recomposed.
    pub fn recompose(&self) -> DenseMatrix {
        let (m, n) = (self.left.rows(), self.right.rows());
        let mut out = DenseMatrix::zeros(m, n);
        for (k, &s) in self.singular_values.iter().enumerate() {
            if s == 0.0 {
                continue;
            }
            for i in 0..m {
                let uik = self.left[(i, k)] * s;
                for j in 0..n {
                    out[(i, j)] += uik * self.right[(j, k)];
                }
            }
        }
        out
    }
}

pub fn svd(m: &DenseMatrix) -> Result<SvdResult, LinalgError> {
    svd_with_cap(m, DEFAULT_MAX_SWEEPS)
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// Column pairs are rotated until every pair is orthogonal to working
/// precision relative to the product of their norms, which yields small
/// singular values with high relative accuracy. Wide inputs are handled
/// through their transpose.
pub fn svd_with_cap(m: &DenseMatrix, max_sweeps: usize) -> Result<SvdResult, LinalgError> {
    if let Some(pos) = m.as_slice().iter().position(|v| !v.is_finite()) {
        return Err(LinalgError::NonFinite { row: pos / m.cols(), col: pos % m.cols() });
    }
    if m.rows() >= m.cols() {
        tall_svd(m, max_sweeps)
    } else {
        let t = tall_svd(&m.transpose(), max_sweeps)?;
        Ok(SvdResult { singular_values: t.singular_values, left: t.right, right: t.left })
    }
}

fn tall_svd(m: &DenseMatrix, max_sweeps: usize) -> Result<SvdResult, LinalgError> {
    let (rows, n) = (m.rows(), m.cols());
    let mut cols = m.columns();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();

    let mut sweep = 0;
    loop {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot(&cols[p], &cols[q]);
                if gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta.abs() > 1e150 {
                    0.5 / zeta
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
        sweep += 1;
        if sweep >= max_sweeps {
            return Err(LinalgError::NoConvergence { sweeps: max_sweeps });
        }
    }

    let norms: Vec<f64> = cols.iter().map(|c| norm2(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let singular_values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let mut right = DenseMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        right.set_column(dst, &v[src]);
    }

    let mut left_cols: Vec<Vec<f64>> = Vec::with_capacity(rows);
    for &j in &order {
        if norms[j] == 0.0 {
            break;
        }
        left_cols.push(cols[j].iter().map(|x| x / norms[j]).collect());
    }
    let completion = orthonormal_complement(&left_cols, rows);
    left_cols.extend(completion);
    let left = DenseMatrix::from_columns(rows, &left_cols);

    Ok(SvdResult { singular_values, left, right })
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
        let x = *a;
        let y = *b;
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

/// Orthonormal vectors completing `basis` (assumed orthonormal) to a basis
/// of `R^dim`, via two-pass Gram–Schmidt on the coordinate vectors.
pub fn orthonormal_complement(basis: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let mut all: Vec<Vec<f64>> = basis.to_vec();
    let mut extra = Vec::new();
    let needed = dim.saturating_sub(basis.len());
    if needed == 0 {
        return extra;
    }
    // candidates ordered by how much of e_i is left after projection
    let mut residual: Vec<(usize, f64)> = (0..dim)
        .map(|i| {
            let captured: f64 = basis.iter().map(|b| b[i] * b[i]).sum();
            (i, 1.0 - captured)
        })
        .collect();
    residual.sort_by(|a, b| b.1.total_cmp(&a.1));
    for (i, _) in residual {
        if extra.len() == needed {
            break;
        }
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        for _ in 0..2 {
            for b in &all {
                let d = dot(b, &e);
                for (x, y) in e.iter_mut().zip(b) {
                    *x -= d * y;
                }
            }
        }
        let nrm = norm2(&e);
        if nrm > 1e-8 {
            e.iter_mut().for_each(|x| *x /= nrm);
            all.push(e.clone());
            extra.push(e);
        }
    }
    extra
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_orthonormal(q: &DenseMatrix) {
        let g = q.tr_matmul(q);
        assert!(g.sub(&DenseMatrix::identity(q.cols())).max_abs() < 1e-12, "{g:?}");
    }

    #[test]
    fn diagonal_values_sorted() {
        let r = svd(&DenseMatrix::from_diag(&[5.0, 0.0, 2.0])).unwrap();
        assert_eq!(r.singular_values, vec![5.0, 2.0, 0.0]);
        assert_orthonormal(&r.left);
        assert_orthonormal(&r.right);
    }

    #[test]
    fn zero_matrix() {
        let r = svd(&DenseMatrix::zeros(3, 2)).unwrap();
        assert_eq!(r.singular_values, vec![0.0, 0.0]);
        assert_orthonormal(&r.left);
        assert_orthonormal(&r.right);
    }

    #[test]
    fn wide_matrix_has_full_bases() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let r = svd(&m).unwrap();
        assert_eq!(r.singular_values.len(), 2);
        assert_eq!((r.left.rows(), r.left.cols()), (2, 2));
        assert_eq!((r.right.rows(), r.right.cols()), (3, 3));
        assert!(r.recompose().sub(&m).frobenius_norm() < 1e-13);
        // third right vector spans the kernel
        let k = r.right.column(2);
        assert!(norm2(&m.matvec(&k)) < 1e-13);
    }

    #[test]
    fn complement_of_empty_is_identity() {
        let c = orthonormal_complement(&[], 3);
        assert_eq!(c.len(), 3);
        assert_orthonormal(&DenseMatrix::from_columns(3, &c));
    }
}
