//! Minimum modulus `μ(A) = inf ‖Av‖/‖v‖`, reduced minimum modulus
//! `γ(A) = inf ‖Av‖/dist(v, N(A))`, adjoints, quotient distances,
//! annihilator identities and closed-range probes.
//!
//! Everything reduces to singular values of the whitened matrix
//! `L_W⁻¹ A L_V⁻ᵀ`; see [`DiscreteOperator::whitened_matrix`].
//!
//! In finite dimensions every range is closed, so `γ > 0` holds for every
//! nonzero operator. Closedness of a limiting operator can only be
//! suggested by the trend of `γ` along a refinement family, which is what
//! [`closed_range_probe`] reports.

mod annihilator;
mod operator;
mod probe;

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{default_rel_tol, dot, norm2, LinalgError};
use crate::spaces::{GramSpace, SpaceError};

pub use annihilator::{
    annihilator_distance, annihilator_identities, range_dual_sup, AnnihilatorDistance,
    AnnihilatorResiduals, RangeDualSup,
};
pub(crate) use operator::WhitenedSvd;
pub use operator::{DiscreteOperator, Gamma};
pub use probe::{closed_range_probe, fit_loglog_slope, Diagnosis, ProbeConfig, ProbeLevel, ProbeReport, ProbeRow};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModulusError {
    #[error("operator matrix is {}x{}, spaces require {}x{}", found.0, found.1, expected.0, expected.1)]
    DimensionMismatch { expected: (usize, usize), found: (usize, usize) },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("subspace basis is numerically dependent (smallest relative singular value {ratio:e})")]
    DegenerateSubspace { ratio: f64 },
    #[error("probe family is empty")]
    EmptyFamily,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModulusReport {
    pub mu: f64,
    pub gamma: Gamma,
    pub rank: usize,
    /// `V`-orthonormal basis of the numerical kernel.
    pub kernel_basis: Vec<Vec<f64>>,
    /// `γ(A′)` from an independent whitening of the adjoint.
    pub gamma_adjoint: Gamma,
    pub rel_tol: f64,
    /// Absolute cutoff `rel_tol · σ_max` used for the rank decision.
    pub cutoff: f64,
    /// `σ_r / σ_{r+1}` at the rank decision, if defined.
    pub gap_ratio: Option<f64>,
    /// Whitened singular values, nonincreasing, padded with zeros to the
    /// domain dimension.
    pub singular_values: Vec<f64>,
}

/// `rel_tol` or the default `max(rows, cols)·ε`.
pub fn resolve_rel_tol(op: &DiscreteOperator, rel_tol: Option<f64>) -> f64 {
    rel_tol.unwrap_or_else(|| default_rel_tol(op.matrix().rows(), op.matrix().cols()))
}

pub fn analyze(op: &DiscreteOperator, rel_tol: Option<f64>) -> Result<ModulusReport, ModulusError> {
    let rel_tol = resolve_rel_tol(op, rel_tol);
    let ws = WhitenedSvd::new(op, rel_tol)?;
    let adj = op.adjoint();
    let wa = WhitenedSvd::new(&adj, rel_tol)?;
    Ok(ModulusReport {
        mu: ws.mu(),
        gamma: ws.gamma(),
        rank: ws.rank,
        kernel_basis: ws.kernel_basis(op),
        gamma_adjoint: wa.gamma(),
        rel_tol,
        cutoff: ws.cutoff,
        gap_ratio: ws.gap_ratio(),
        singular_values: ws.padded.clone(),
    })
}

/// `μ(A)`; zero whenever `dim V > dim W`.
pub fn minimum_modulus(op: &DiscreteOperator) -> Result<f64, ModulusError> {
    Ok(WhitenedSvd::new(op, resolve_rel_tol(op, None))?.mu())
}

/// `γ(A)` and a `V`-orthonormal kernel basis.
pub fn reduced_minimum_modulus(
    op: &DiscreteOperator,
    rel_tol: Option<f64>,
) -> Result<(Gamma, Vec<Vec<f64>>), ModulusError> {
    let ws = WhitenedSvd::new(op, resolve_rel_tol(op, rel_tol))?;
    Ok((ws.gamma(), ws.kernel_basis(op)))
}

/// `dist_V(v, N(A))`, given a `V`-orthonormal kernel basis.
pub fn quotient_distance(
    space: &GramSpace,
    kernel_basis: &[Vec<f64>],
    v: &[f64],
) -> Result<f64, ModulusError> {
    for x in std::iter::once(v).chain(kernel_basis.iter().map(Vec::as_slice)) {
        if x.len() != space.dim() {
            return Err(SpaceError::DimensionMismatch { expected: space.dim(), found: x.len() }.into());
        }
    }
    let white = space.whitener();
    let mut y = white.to_white(v);
    for k in kernel_basis {
        let kw = white.to_white(k);
        let c = dot(&kw, &y);
        for (a, b) in y.iter_mut().zip(&kw) {
            *a -= c * b;
        }
    }
    Ok(norm2(&y))
}

/// The injective operator induced on `N(A)^⊥`: the domain is re-posed on
/// a `V`-orthonormal basis of the `V`-orthogonal complement of the kernel,
/// so its Gram matrix is the identity.
pub fn induced_operator(
    op: &DiscreteOperator,
    rel_tol: Option<f64>,
) -> Result<DiscreteOperator, ModulusError> {
    let ws = WhitenedSvd::new(op, resolve_rel_tol(op, rel_tol))?;
    let basis: Vec<Vec<f64>> = (0..ws.rank).map(|k| ws.domain_vector(op, k)).collect();
    let c = crate::linalg::DenseMatrix::from_columns(op.domain().dim(), &basis);
    DiscreteOperator::new(
        GramSpace::euclidean(ws.rank),
        op.test_space().clone(),
        op.matrix().matmul(&c),
    )
}
