use super::{cholesky::SYMMETRY_TOL, DenseMatrix, LinalgError};

pub const DEFAULT_MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Nondecreasing.
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: DenseMatrix,
}

pub fn sym_eigen(s: &DenseMatrix) -> Result<SymEigen, LinalgError> {
    sym_eigen_with_cap(s, DEFAULT_MAX_SWEEPS)
}

/// Cyclic Jacobi eigensolver.
pub fn sym_eigen_with_cap(s: &DenseMatrix, max_sweeps: usize) -> Result<SymEigen, LinalgError> {
    if !s.is_square() {
        return Err(LinalgError::NotSquare { rows: s.rows(), cols: s.cols() });
    }
    let asym = s.relative_asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(LinalgError::NotSymmetric { relative_asymmetry: asym });
    }
    let n = s.rows();
    let mut a = s.symmetrized();
    let mut v = DenseMatrix::identity(n);
    let total = a.frobenius_norm();

    let mut converged = n <= 1 || total == 0.0;
    let mut sweep = 0;
    while !converged {
        if sweep == max_sweeps {
            return Err(LinalgError::NoConvergence { sweeps: max_sweeps });
        }
        sweep += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // negligible against both diagonal entries
                if apq.abs() <= f64::EPSILON * 0.5 * (app.abs() * aqq.abs()).sqrt() {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<f64>()
            .sqrt();
        converged = !rotated || off <= f64::EPSILON * total;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    Ok(SymEigen { values, vectors })
}
