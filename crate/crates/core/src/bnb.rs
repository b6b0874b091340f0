//! Verdicts for the three equivalent well-posedness conditions of a
//! bilinear form `a : V × W → R` with operator `A : V → W′`:
//!
//! - (i) `A` is bijective;
//! - (ii) `μ(A) > 0` and `N(A′) = {0}`;
//! - (iii) `μ(A) = μ(A′) > 0`.
//!
//! In exact arithmetic the three agree. Numerically each is a rank
//! decision against a cutoff, so instances whose smallest singular value
//! sits within a decade of the cutoff are flagged as borderline.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{LinalgError, Lu};
use crate::modulus::{resolve_rel_tol, DiscreteOperator, ModulusError, WhitenedSvd};
use crate::spaces::{DualVector, SpaceError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BnbError {
    #[error("operator is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("system is singular: condition (i) fails")]
    SingularSystem,
    #[error(transparent)]
    Modulus(#[from] ModulusError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

impl From<LinalgError> for BnbError {
    fn from(e: LinalgError) -> Self {
        BnbError::Modulus(e.into())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BnbVerdict {
    pub cond_i: bool,
    pub cond_ii: bool,
    pub cond_iii: bool,
    /// `μ(A)`, the inf-sup constant.
    pub beta: f64,
    /// `μ(A′)`.
    pub beta_adjoint: f64,
    pub rel_tol: f64,
    pub cutoff: f64,
    /// Smallest whitened singular value lies in `[0.1, 10] · cutoff`.
    pub borderline: bool,
    /// The three conditions do not agree.
    pub disagreement: bool,
    pub gap_ratio: Option<f64>,
    /// Unit vector of `V` realizing `μ(A)`; a kernel vector when (i) or
    /// (ii) fail through injectivity.
    pub kernel_witness: Option<Vec<f64>>,
    /// Unit vector of `W` annihilated by `A′`. Any functional pairing
    /// nontrivially with it is outside the range of `A`.
    pub adjoint_kernel_witness: Option<Vec<f64>>,
}

pub fn check_bnb(op: &DiscreteOperator, rel_tol: Option<f64>) -> Result<BnbVerdict, BnbError> {
    let rel_tol = resolve_rel_tol(op, rel_tol);
    let (n, m) = (op.domain().dim(), op.test_space().dim());
    let ws = WhitenedSvd::new(op, rel_tol)?;
    let adj = op.adjoint();
    let wa = WhitenedSvd::new(&adj, rel_tol)?;

    let beta = ws.mu();
    let beta_adjoint = wa.mu();
    let cutoff = ws.cutoff;
    let injective = beta > cutoff;
    let adjoint_injective = wa.rank == m && m > 0;

    let cond_i = n == m && ws.rank == n;
    let cond_ii = injective && adjoint_injective;
    let cond_iii = injective && beta_adjoint > wa.cutoff && (beta - beta_adjoint).abs() <= cutoff;

    let smin = ws.svd.singular_values.last().copied().unwrap_or(0.0);
    let borderline = cutoff > 0.0 && smin >= 0.1 * cutoff && smin <= 10.0 * cutoff;

    let kernel_witness = (!injective && n > 0).then(|| ws.domain_vector(op, n - 1));
    let adjoint_kernel_witness = (!adjoint_injective && m > 0).then(|| wa.domain_vector(&adj, m - 1));

    Ok(BnbVerdict {
        cond_i,
        cond_ii,
        cond_iii,
        beta,
        beta_adjoint,
        rel_tol,
        cutoff,
        borderline,
        disagreement: !(cond_i == cond_ii && cond_ii == cond_iii),
        gap_ratio: ws.gap_ratio(),
        kernel_witness,
        adjoint_kernel_witness,
    })
}

/// For `dim V = dim W`: a positive minimum modulus forces `N(A′) = {0}`.
/// Returns whether that implication holds on `op`.
pub fn check_finite_dim_remark(op: &DiscreteOperator, rel_tol: Option<f64>) -> Result<bool, BnbError> {
    let (n, m) = (op.domain().dim(), op.test_space().dim());
    if n != m {
        return Err(BnbError::NotSquare { rows: m, cols: n });
    }
    let rel_tol = resolve_rel_tol(op, rel_tol);
    let ws = WhitenedSvd::new(op, rel_tol)?;
    let wa = WhitenedSvd::new(&op.adjoint(), rel_tol)?;
    let premise = ws.mu() > ws.cutoff;
    Ok(!premise || wa.rank == m)
}

#[derive(Debug, Clone, Serialize)]
pub struct VariationalSolution {
    pub u: Vec<f64>,
    pub beta: f64,
    /// `‖Au − L‖_{W′} / ‖L‖_{W′}` (absolute when `L = 0`).
    pub residual: f64,
    pub u_norm: f64,
    pub load_norm: f64,
    /// `‖u‖_V ≤ (1 + 1e-8) ‖L‖_{W′} / β`.
    pub bound_ok: bool,
}

/// Solves `a(u, w) = ⟨L, w⟩` for all `w` and checks the a priori bound.
pub fn solve_variational(
    op: &DiscreteOperator,
    load: &DualVector,
    rel_tol: Option<f64>,
) -> Result<VariationalSolution, BnbError> {
    let test = op.test_space();
    if load.coeffs().len() != test.dim() {
        return Err(SpaceError::DimensionMismatch { expected: test.dim(), found: load.coeffs().len() }
            .into());
    }
    let verdict = check_bnb(op, rel_tol)?;
    if !verdict.cond_i {
        return Err(BnbError::SingularSystem);
    }
    let lu = Lu::new(op.matrix()).map_err(|_| BnbError::SingularSystem)?;
    let u = lu.solve(load.coeffs());
    let r: Vec<f64> = op.apply(&u).iter().zip(load.coeffs()).map(|(a, b)| a - b).collect();
    let load_norm = test.dual_norm_of(load.coeffs())?;
    let abs_res = test.dual_norm_of(&r)?;
    let residual = if load_norm > 0.0 { abs_res / load_norm } else { abs_res };
    let u_norm = op.domain().norm(&u)?;
    let bound_ok = u_norm <= (1.0 + 1e-8) * load_norm / verdict.beta;
    Ok(VariationalSolution { u, beta: verdict.beta, residual, u_norm, load_norm, bound_ok })
}

/// `‖Av‖_{W′}`, for checking kernel witnesses.
pub fn witness_residual(op: &DiscreteOperator, v: &[f64]) -> f64 {
    op.test_space().dual_norm_of(&op.apply(v)).expect("witness has domain dimension")
}
