use serde::Serialize;

use crate::linalg::{
    cholesky, dot, norm2, numerical_rank, solve_lower, svd, DenseMatrix,
};
use crate::spaces::{DualVector, GramSpace, SpaceError};

use super::{quotient_distance, resolve_rel_tol, DiscreteOperator, ModulusError, WhitenedSvd};

/// Relative singular value below which a supplied basis counts as
/// dependent.
const DEPENDENCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AnnihilatorDistance {
    /// `dist_{X′}(f, M^⊥)` by projection in the `G⁻¹` metric.
    pub dist: f64,
    /// `sup_{x ∈ M} |⟨f, x⟩| / ‖x‖_X` from the restricted Gram matrix.
    pub restricted_norm: f64,
}

/// Distance from `f` to the annihilator of `M = span(basis)`, and the norm
/// of `f` restricted to `M`, computed along two unrelated routes.
pub fn annihilator_distance(
    space: &GramSpace,
    f: &DualVector,
    basis: &[Vec<f64>],
) -> Result<AnnihilatorDistance, ModulusError> {
    let n = space.dim();
    if f.coeffs().len() != n {
        return Err(SpaceError::DimensionMismatch { expected: n, found: f.coeffs().len() }.into());
    }
    for b in basis {
        if b.len() != n {
            return Err(SpaceError::DimensionMismatch { expected: n, found: b.len() }.into());
        }
    }
    if basis.is_empty() {
        return Ok(AnnihilatorDistance { dist: 0.0, restricted_norm: 0.0 });
    }
    let k = basis.len();
    let bmat = DenseMatrix::from_columns(n, basis);
    let l = space.cholesky_factor();

    // Independence is judged in the space's own metric.
    let white = l.tr_matmul(&bmat);
    let s = svd(&white)?;
    let smax = s.max_singular_value();
    let smin = s.singular_values.last().copied().unwrap_or(0.0);
    if k > n || smax == 0.0 || smin <= DEPENDENCE_TOL * smax {
        let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
        return Err(ModulusError::DegenerateSubspace { ratio });
    }

    // Route 1: M^⊥ is the Euclidean null space of Bᵀ; project L⁻¹f onto the
    // whitened copy of it and measure what is left.
    let null = annihilator_of(basis, n);
    let z = solve_lower(l, f.coeffs());
    let dist = if null.is_empty() {
        norm2(&z)
    } else {
        let whitened: Vec<Vec<f64>> = null.iter().map(|g| solve_lower(l, g)).collect();
        let q = orthonormalize(&whitened, n);
        let mut r = z;
        for qi in &q {
            let c = dot(qi, &r);
            for (a, b) in r.iter_mut().zip(qi) {
                *a -= c * b;
            }
        }
        norm2(&r)
    };

    // Route 2: sup over c of (fᵀBc)² / (cᵀ BᵀGB c) is the single nonzero
    // eigenvalue of a rank-one pencil, equal to |L_c⁻¹ Bᵀ f|² with
    // BᵀGB = L_c L_cᵀ.
    let restricted = bmat.tr_matmul(&space.gram().matmul(&bmat)).symmetrized();
    let lc = cholesky(&restricted)?;
    let restricted_norm = norm2(&solve_lower(&lc, &bmat.tr_matvec(f.coeffs())));

    debug_assert_eq!(null.len(), n - k);
    Ok(AnnihilatorDistance { dist, restricted_norm })
}

/// The two sides of `‖w̃‖_{W/N(A′)} = sup_{f ∈ R(A)} |⟨f, w⟩| / ‖f‖_{W′}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RangeDualSup {
    pub quotient_norm: f64,
    pub sup: f64,
}

/// Quotient norm of `w` modulo `N(A′)` (from the adjoint's own whitening)
/// against the supremum over the range of `A` (from the operator's).
pub fn range_dual_sup(
    op: &DiscreteOperator,
    w: &[f64],
    rel_tol: Option<f64>,
) -> Result<RangeDualSup, ModulusError> {
    let rel_tol = resolve_rel_tol(op, rel_tol);
    let adj = op.adjoint();
    let wa = WhitenedSvd::new(&adj, rel_tol)?;
    let quotient_norm = quotient_distance(op.test_space(), &wa.kernel_basis(&adj), w)?;

    let ws = WhitenedSvd::new(op, rel_tol)?;
    // f = L_W u_k is dual-unit and ⟨f, w⟩ = u_kᵀ (L_Wᵀ w).
    let y = op.test_space().whitener().to_white(w);
    let sup = (0..ws.rank)
        .map(|k| dot(&ws.svd.left.column(k), &y).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(RangeDualSup { quotient_norm, sup })
}

/// Largest principal-angle sines between each pair of subspaces that the
/// annihilator relations declare equal.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AnnihilatorResiduals {
    /// `N(A′)` against `R(A)^⊥`, in `W`.
    pub adjoint_kernel_vs_range_perp: f64,
    /// `N(A)` against `R(A′)^⊥`, in `V`.
    pub kernel_vs_adjoint_range_perp: f64,
    /// `R(A)` against `N(A′)^⊥`, in `W′`.
    pub range_vs_adjoint_kernel_perp: f64,
    /// `R(A′)` against `N(A)^⊥`, in `V′`.
    pub adjoint_range_vs_kernel_perp: f64,
}

impl AnnihilatorResiduals {
    pub fn max(&self) -> f64 {
        self.adjoint_kernel_vs_range_perp
            .max(self.kernel_vs_adjoint_range_perp)
            .max(self.range_vs_adjoint_kernel_perp)
            .max(self.adjoint_range_vs_kernel_perp)
    }
}

pub fn annihilator_identities(
    op: &DiscreteOperator,
    rel_tol: Option<f64>,
) -> Result<AnnihilatorResiduals, ModulusError> {
    let rel_tol = resolve_rel_tol(op, rel_tol);
    let adj = op.adjoint();
    let ws = WhitenedSvd::new(op, rel_tol)?;
    let wa = WhitenedSvd::new(&adj, rel_tol)?;
    let (nv, nw) = (op.domain().dim(), op.test_space().dim());

    let kernel = ws.kernel_basis(op);
    let adjoint_kernel = wa.kernel_basis(&adj);
    let range: Vec<Vec<f64>> = (0..ws.rank).map(|k| ws.range_functional(op, k)).collect();
    let adjoint_range: Vec<Vec<f64>> = (0..wa.rank).map(|k| wa.range_functional(&adj, k)).collect();

    let wv = op.domain().whitener();
    let ww = op.test_space().whitener();
    Ok(AnnihilatorResiduals {
        adjoint_kernel_vs_range_perp: subspace_residual(
            &adjoint_kernel,
            &annihilator_of(&range, nw),
            |x| ww.to_white(x),
        ),
        kernel_vs_adjoint_range_perp: subspace_residual(
            &kernel,
            &annihilator_of(&adjoint_range, nv),
            |x| wv.to_white(x),
        ),
        range_vs_adjoint_kernel_perp: subspace_residual(
            &range,
            &annihilator_of(&adjoint_kernel, nw),
            |x| ww.to_white_dual(x),
        ),
        adjoint_range_vs_kernel_perp: subspace_residual(
            &adjoint_range,
            &annihilator_of(&kernel, nv),
            |x| wv.to_white_dual(x),
        ),
    })
}

/// Euclidean null space of `Bᵀ`, i.e. everything annihilated by the
/// pairing with `span(basis)`.
fn annihilator_of(basis: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    if basis.is_empty() {
        return DenseMatrix::identity(dim).columns();
    }
    let s = svd(&DenseMatrix::from_columns(dim, basis)).expect("finite basis");
    let r = numerical_rank(&s.singular_values, DEPENDENCE_TOL);
    (r..dim).map(|k| s.left.column(k)).collect()
}

/// Euclidean orthonormal basis of the span of `vectors`.
fn orthonormalize(vectors: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let s = svd(&DenseMatrix::from_columns(dim, vectors)).expect("finite vectors");
    let r = numerical_rank(&s.singular_values, DEPENDENCE_TOL);
    (0..r).map(|k| s.left.column(k)).collect()
}

/// `sin θ_max` between two subspaces after mapping them by `whiten`;
/// 1 when their dimensions differ.
fn subspace_residual<F>(a: &[Vec<f64>], b: &[Vec<f64>], whiten: F) -> f64
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let dim = a.first().or(b.first()).map_or(0, Vec::len);
    let qa = orthonormalize(&a.iter().map(|x| whiten(x)).collect::<Vec<_>>(), dim);
    let qb = orthonormalize(&b.iter().map(|x| whiten(x)).collect::<Vec<_>>(), dim);
    if qa.len() != qb.len() {
        return 1.0;
    }
    if qa.is_empty() {
        return 0.0;
    }
    let residual: Vec<Vec<f64>> = qa
        .iter()
        .map(|x| {
            let mut r = x.clone();
            for q in &qb {
                let c = dot(q, x);
                for (ri, qi) in r.iter_mut().zip(q) {
                    *ri -= c * qi;
                }
            }
            r
        })
        .collect();
    svd(&DenseMatrix::from_columns(dim, &residual))
        .expect("finite residual")
        .max_singular_value()
}
