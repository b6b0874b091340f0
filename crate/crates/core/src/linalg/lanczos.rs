use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::dot;

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    pub max_iter: usize,
    /// Stop once the Ritz residual falls below `tol · |θ|`.
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { max_iter: 400, tol: 1e-12, seed: 0x5eed_1a2c }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    /// Normalized in the inner product supplied to the solver.
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// Estimated residual norm `‖T x − θ x‖_P`.
    pub residual: f64,
}

/// Largest eigenpair of an operator `op` that is self-adjoint with respect
/// to the inner product `⟨x, y⟩ = xᵀ P y`, where `gram` applies `P`.
///
/// Lanczos with full reorthogonalization; the tridiagonal Ritz problem is
/// solved by Sturm bisection plus inverse iteration.
pub fn largest_eigenpair<Op, Gram>(n: usize, op: Op, gram: Gram, opts: LanczosOptions) -> EigenPair
where
    Op: Fn(&[f64]) -> Vec<f64>,
    Gram: Fn(&[f64]) -> Vec<f64>,
{
    assert!(n > 0, "empty operator");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let p0 = gram(&x0);
    let nrm = dot(&x0, &p0).sqrt();
    let mut basis: Vec<Vec<f64>> = vec![x0.iter().map(|v| v / nrm).collect()];
    let mut pbasis: Vec<Vec<f64>> = vec![p0.iter().map(|v| v / nrm).collect()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let max_iter = opts.max_iter.min(n).max(1);
    let (mut theta, mut s, mut residual);
    loop {
        let j = alphas.len();
        let mut w = op(&basis[j]);
        let alpha = dot(&pbasis[j], &w);
        for (wi, qi) in w.iter_mut().zip(&basis[j]) {
            *wi -= alpha * qi;
        }
        if j > 0 {
            let b = betas[j - 1];
            for (wi, qi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= b * qi;
            }
        }
        for _ in 0..2 {
            for (q, pq) in basis.iter().zip(&pbasis) {
                let c = dot(pq, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        alphas.push(alpha);
        let pw = gram(&w);
        let beta = dot(&w, &pw).max(0.0).sqrt();

        theta = tridiagonal_max_eigenvalue(&alphas, &betas);
        s = tridiagonal_eigenvector(&alphas, &betas, theta);
        residual = beta * s.last().copied().unwrap_or(0.0).abs();

        let done = residual <= opts.tol * theta.abs().max(f64::MIN_POSITIVE)
            || alphas.len() >= max_iter
            || beta <= f64::EPSILON * theta.abs().max(f64::MIN_POSITIVE);
        if done {
            break;
        }
        betas.push(beta);
        basis.push(w.iter().map(|v| v / beta).collect());
        pbasis.push(pw.iter().map(|v| v / beta).collect());
    }

    let mut vector = vec![0.0; n];
    for (coef, q) in s.iter().zip(&basis) {
        for (v, qi) in vector.iter_mut().zip(q) {
            *v += coef * qi;
        }
    }
    EigenPair { value: theta, vector, iterations: alphas.len(), residual }
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..diag.len() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = diag[i] - x - if i == 0 { 0.0 } else { b2 / d };
        if d == 0.0 {
            d = -f64::EPSILON * (x.abs() + 1.0);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

pub(crate) fn tridiagonal_max_eigenvalue(diag: &[f64], off: &[f64]) -> f64 {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 }
            + if i < off.len() { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Unit eigenvector of the symmetric tridiagonal matrix for the eigenvalue
/// estimate `theta`, by inverse iteration with a pivoted tridiagonal LU.
pub(crate) fn tridiagonal_eigenvector(diag: &[f64], off: &[f64], theta: f64) -> Vec<f64> {
    let n = diag.len();
    if n == 1 {
        return vec![1.0];
    }
    let scale = diag.iter().chain(off).fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * scale;

    let mut d: Vec<f64> = diag.iter().map(|a| a - theta).collect();
    let mut dl = off.to_vec();
    let mut du = off.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut swapped = vec![false; n - 1];
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            let temp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = temp - fact * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -fact;
            }
            swapped[i] = true;
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }

    let mut x = vec![1.0; n];
    for _ in 0..3 {
        for i in 0..n - 1 {
            if swapped[i] {
                let temp = x[i];
                x[i] = x[i + 1];
                x[i + 1] = temp - dl[i] * x[i];
            } else {
                x[i + 1] -= dl[i] * x[i];
            }
        }
        x[n - 1] /= d[n - 1];
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
        }
        let nrm = dot(&x, &x).sqrt();
        if !nrm.is_finite() || nrm == 0.0 {
            break;
        }
        x.iter_mut().for_each(|v| *v /= nrm);
    }
    x
}
