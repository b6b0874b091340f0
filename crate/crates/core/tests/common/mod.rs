//! Generators shared by the integration tests.
#![allow(dead_code)]

use infsup::linalg::{dot, DenseMatrix};
use infsup::modulus::DiscreteOperator;
use infsup::spaces::GramSpace;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_row_major(rows, cols, gaussian_vec(rng, rows * cols)).unwrap()
}

/// Haar-ish orthogonal matrix by modified Gram–Schmidt, done twice.
pub fn orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = gaussian_vec(rng, n);
        for _ in 0..2 {
            for q in &cols {
                let c = dot(q, &v);
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
            }
        }
        let nrm = dot(&v, &v).sqrt();
        if nrm > 1e-8 {
            cols.push(v.iter().map(|x| x / nrm).collect());
        }
    }
    DenseMatrix::from_columns(n, &cols)
}

/// `Q diag(eigs) Qᵀ`.
pub fn spd_with_spectrum(rng: &mut ChaCha8Rng, eigs: &[f64]) -> DenseMatrix {
    let q = orthogonal(rng, eigs.len());
    q.matmul(&DenseMatrix::from_diag(eigs)).matmul(&q.transpose()).symmetrized()
}

/// Random SPD Gram with eigenvalues in `[lo, hi]`.
pub fn random_gram(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> GramSpace {
    let eigs: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
    GramSpace::new(spd_with_spectrum(rng, &eigs)).unwrap()
}

/// Operator `A : V → W′` whose whitened matrix is `U diag(sigmas) Vᵀ`, so
/// that its singular values (relative to the Grams) are exactly `sigmas`
/// padded with zeros.
pub fn operator_with_singular_values(
    rng: &mut ChaCha8Rng,
    v: GramSpace,
    w: GramSpace,
    sigmas: &[f64],
) -> DiscreteOperator {
    let (n, m) = (v.dim(), w.dim());
    assert!(sigmas.len() <= n.min(m));
    let u = orthogonal(rng, m);
    let vt = orthogonal(rng, n);
    let mut s = DenseMatrix::zeros(m, n);
    for (k, &x) in sigmas.iter().enumerate() {
        s[(k, k)] = x;
    }
    let hat = u.matmul(&s).matmul(&vt.transpose());
    let a = w.cholesky_factor().matmul(&hat).matmul(&v.cholesky_factor().transpose());
    DiscreteOperator::new(v, w, a).unwrap()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
