//! Symmetric block-tridiagonal matrices and their block Cholesky factor.

use crate::linalg::{
    cholesky, solve_lower, solve_lower_matrix, solve_lower_transpose, DenseMatrix, LinalgError,
};

/// `diag[k]` are the diagonal blocks, `sub[k]` the block at `(k+1, k)`.
#[derive(Debug, Clone)]
pub struct BlockTridiagonal {
    pub diag: Vec<DenseMatrix>,
    pub sub: Vec<DenseMatrix>,
}

impl BlockTridiagonal {
    pub fn block_size(&self) -> usize {
        self.diag.first().map_or(0, DenseMatrix::rows)
    }

    pub fn dim(&self) -> usize {
        self.diag.len() * self.block_size()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let m = self.block_size();
        let nb = self.diag.len();
        let mut y = vec![0.0; nb * m];
        for k in 0..nb {
            let xk = &x[k * m..(k + 1) * m];
            add_into(&mut y[k * m..(k + 1) * m], &self.diag[k].matvec(xk));
            if k + 1 < nb {
                add_into(&mut y[(k + 1) * m..(k + 2) * m], &self.sub[k].matvec(xk));
                let xk1 = &x[(k + 1) * m..(k + 2) * m];
                add_into(&mut y[k * m..(k + 1) * m], &self.sub[k].tr_matvec(xk1));
            }
        }
        y
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let m = self.block_size();
        let mut g = DenseMatrix::zeros(self.dim(), self.dim());
        for (k, d) in self.diag.iter().enumerate() {
            g.set_block(k * m, k * m, d);
        }
        for (k, s) in self.sub.iter().enumerate() {
            g.set_block((k + 1) * m, k * m, s);
            g.set_block(k * m, (k + 1) * m, &s.transpose());
        }
        g
    }
}

pub(crate) fn add_into(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

/// `G = L Lᵀ` with `L` block lower bidiagonal: diagonal blocks `d[k]`
/// (lower triangular) and subdiagonal blocks `c[k]` at `(k+1, k)`.
#[derive(Debug, Clone)]
pub struct BlockCholesky {
    d: Vec<DenseMatrix>,
    c: Vec<DenseMatrix>,
}

impl BlockCholesky {
    pub fn new(g: &BlockTridiagonal) -> Result<Self, LinalgError> {
        let nb = g.diag.len();
        let mut d = Vec::with_capacity(nb);
        let mut c = Vec::with_capacity(nb.saturating_sub(1));
        d.push(cholesky(&g.diag[0])?);
        for k in 0..nb - 1 {
            // C_k = S_k D_k⁻ᵀ, i.e. C_kᵀ = D_k⁻¹ S_kᵀ
            let ck = solve_lower_matrix(&d[k], &g.sub[k].transpose()).transpose();
            let schur = g.diag[k + 1].sub(&ck.matmul(&ck.transpose())).symmetrized();
            d.push(cholesky(&schur)?);
            c.push(ck);
        }
        Ok(BlockCholesky { d, c })
    }

    fn m(&self) -> usize {
        self.d[0].rows()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let m = self.m();
        let nb = self.d.len();
        let mut y = vec![0.0; nb * m];
        for k in 0..nb {
            let mut rhs = b[k * m..(k + 1) * m].to_vec();
            if k > 0 {
                let prev = self.c[k - 1].matvec(&y[(k - 1) * m..k * m]);
                rhs.iter_mut().zip(&prev).for_each(|(r, p)| *r -= p);
            }
            y[k * m..(k + 1) * m].copy_from_slice(&solve_lower(&self.d[k], &rhs));
        }
        let mut x = vec![0.0; nb * m];
        for k in (0..nb).rev() {
            let mut rhs = y[k * m..(k + 1) * m].to_vec();
            if k + 1 < nb {
                let next = self.c[k].tr_matvec(&x[(k + 1) * m..(k + 2) * m]);
                rhs.iter_mut().zip(&next).for_each(|(r, p)| *r -= p);
            }
            x[k * m..(k + 1) * m].copy_from_slice(&solve_lower_transpose(&self.d[k], &rhs));
        }
        x
    }

    /// Diagonal blocks `Z_kk` of `G⁻¹`.
    ///
    /// `L⁻¹` has blocks `(L⁻¹)_{jk} = (L⁻¹)_{j,k+1} (−C_k D_k⁻¹)` below the
    /// diagonal, so `Z_kk = (D_k D_kᵀ)⁻¹ + W_kᵀ Z_{k+1,k+1} W_k` with
    /// `W_k = C_k D_k⁻¹`, run backwards from `Z_NN = (D_N D_Nᵀ)⁻¹`.
    pub fn inverse_diagonal_blocks(&self) -> Vec<DenseMatrix> {
        let m = self.m();
        let nb = self.d.len();
        let id = DenseMatrix::identity(m);
        let inv_d: Vec<DenseMatrix> = self.d.iter().map(|d| solve_lower_matrix(d, &id)).collect();
        let mut z = vec![DenseMatrix::zeros(m, m); nb];
        z[nb - 1] = inv_d[nb - 1].tr_matmul(&inv_d[nb - 1]);
        for k in (0..nb - 1).rev() {
            let w = self.c[k].matmul(&inv_d[k]);
            let tail = w.tr_matmul(&z[k + 1].matmul(&w));
            z[k] = inv_d[k].tr_matmul(&inv_d[k]).add(&tail).symmetrized();
        }
        z
    }
}
