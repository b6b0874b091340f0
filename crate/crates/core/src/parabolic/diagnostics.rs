use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::{
    dot, largest_eigenpair, sym_eigen, EigenPair, LanczosOptions, Lu,
};
use crate::modulus::{resolve_rel_tol, WhitenedSvd};
use crate::quadrature::gauss_legendre;
use crate::spaces::DualVector;

use super::assembly::{spatial_operator, ParabolicAssembly};
use super::problem::QUAD_POINTS;
use super::ParabolicError;

/// Largest trial dimension handled by a dense SVD under `Auto`.
pub const DENSE_LIMIT: usize = 256;

/// Relative slack of the bound checks.
const BOUND_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralMethod {
    Auto,
    Dense,
    Lanczos,
}

/// Extremal singular values of the whitened space-time matrix.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralBounds {
    /// `β_h`, the smallest singular value.
    pub beta: f64,
    /// `μ_h`, the largest.
    pub mu: f64,
    /// Trial vector of unit `X`-norm with `‖B u‖_{Y′} = β_h`.
    #[serde(skip)]
    pub beta_witness: Vec<f64>,
    pub method: SpectralMethod,
    /// Lanczos iterations for `β_h` and `μ_h`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<(usize, usize)>,
    /// Relative Ritz residuals for `β_h` and `μ_h`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residuals: Option<(f64, f64)>,
}

/// `β_h` and `μ_h` by the requested method. `Auto` uses the dense SVD up to
/// [`DENSE_LIMIT`] unknowns.
///
/// The Lanczos path never forms `B`. With `T_β = B⁻¹ G_Y B⁻ᵀ G_X` and
/// `T_μ = G_X⁻¹ Bᵀ G_Y⁻¹ B`, both self-adjoint in the `G_X` inner product,
/// `λ_max(T_β) = 1/β_h²` and `λ_max(T_μ) = μ_h²`. Every application costs
/// one sweep of time stepping or one block-tridiagonal solve.
pub fn spectral_bounds(
    asm: &ParabolicAssembly,
    method: SpectralMethod,
) -> Result<SpectralBounds, ParabolicError> {
    let n = asm.dim();
    let dense = match method {
        SpectralMethod::Auto => n <= DENSE_LIMIT,
        SpectralMethod::Dense => true,
        SpectralMethod::Lanczos => false,
    };
    if dense {
        let op = asm.dense_operator()?;
        let w = WhitenedSvd::new(&op, resolve_rel_tol(&op, None))?;
        let beta = w.mu();
        let mu = w.svd.max_singular_value();
        if beta <= w.cutoff {
            return Err(ParabolicError::SingularSystem);
        }
        return Ok(SpectralBounds {
            beta,
            mu,
            beta_witness: w.domain_vector(&op, n - 1),
            method: SpectralMethod::Dense,
            iterations: None,
            residuals: None,
        });
    }

    let opts = LanczosOptions { max_iter: n.min(800), tol: 1e-11, ..LanczosOptions::default() };
    let gram = |x: &[f64]| asm.apply_gram_x(x);
    let (lo, hi): (EigenPair, EigenPair) = rayon::join(
        || {
            largest_eigenpair(
                n,
                |x| asm.solve_b(&asm.apply_gram_y(&asm.solve_bt(&asm.apply_gram_x(x)))),
                gram,
                opts,
            )
        },
        || {
            largest_eigenpair(
                n,
                |x| asm.solve_gram_x(&asm.apply_bt(&asm.solve_gram_y(&asm.apply_b(x)))),
                gram,
                opts,
            )
        },
    );
    if !(lo.value.is_finite() && lo.value > 0.0) {
        return Err(ParabolicError::SingularSystem);
    }
    Ok(SpectralBounds {
        beta: lo.value.sqrt().recip(),
        mu: hi.value.sqrt(),
        beta_witness: lo.vector,
        method: SpectralMethod::Lanczos,
        iterations: Some((lo.iterations, hi.iterations)),
        residuals: Some((lo.residual / lo.value, hi.residual / hi.value)),
    })
}

/// `β_h = inf_u sup_v b(u, v) / (‖u‖_X ‖v‖_Y)`.
pub fn infsup_constant(asm: &ParabolicAssembly) -> Result<f64, ParabolicError> {
    Ok(spectral_bounds(asm, SpectralMethod::Auto)?.beta)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Continuity {
    pub mu: f64,
    pub c_tr: f64,
    /// `sqrt(1 + M² + C_tr²)`.
    pub c_max: f64,
    pub ok: bool,
}

impl Continuity {
    pub fn new(mu: f64, m: f64, c_tr: f64) -> Self {
        let c_max = (1.0 + m * m + c_tr * c_tr).sqrt();
        Continuity { mu, c_tr, c_max, ok: mu <= c_max * (1.0 + BOUND_SLACK) }
    }
}

/// `μ_h` checked against `C_max` built from the discrete trace constant.
pub fn continuity_constant(asm: &ParabolicAssembly) -> Result<Continuity, ParabolicError> {
    let mu = spectral_bounds(asm, SpectralMethod::Auto)?.mu;
    Ok(Continuity::new(mu, asm.constants.m, estimate_trace_constant(asm)?))
}

/// `C_tr,h = max_k sup_u ‖u(t_k)‖_H / ‖u‖_X`.
///
/// For the evaluation at node `k` the supremum is
/// `λ_max(L_Mᵀ Z_kk L_M)^{1/2}` where `Z_kk` is the diagonal block of
/// `G_X⁻¹`, read off the block Cholesky factor.
pub fn estimate_trace_constant(asm: &ParabolicAssembly) -> Result<f64, ParabolicError> {
    let lm = asm.mass_factor();
    let z = asm.gram_x_factor().inverse_diagonal_blocks();
    let lams = z
        .par_iter()
        .map(|zk| {
            let s = lm.tr_matmul(&zk.matmul(lm)).symmetrized();
            sym_eigen(&s).map(|e| e.values.last().copied().unwrap_or(0.0))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(lams.into_iter().fold(0.0_f64, f64::max).max(0.0).sqrt())
}

/// `|||w|||² = ∫_J ‖w′ + A(t) w‖²_{V′} dt + ‖w(0)‖²_H`, by the slab
/// quadrature used in assembly.
pub fn triple_norm(asm: &ParabolicAssembly, w: &[f64]) -> f64 {
    let (tau, wq) = gauss_legendre(QUAD_POINTS);
    let total: f64 = (0..asm.nt())
        .into_par_iter()
        .map(|n| {
            let (w0, w1) = (asm.block(w, n), asm.block(w, n + 1));
            let dw: Vec<f64> = w1.iter().zip(w0).map(|(a, b)| (a - b) / asm.dt).collect();
            let mdw = asm.mass.matvec(&dw);
            let mut s = 0.0;
            for q in 0..3 {
                let wt: Vec<f64> =
                    w0.iter().zip(w1).map(|(a, b)| (1.0 - tau[q]) * a + tau[q] * b).collect();
                let r: Vec<f64> = asm.slab_operators[n][q]
                    .matvec(&wt)
                    .iter()
                    .zip(&mdw)
                    .map(|(a, b)| a + b)
                    .collect();
                s += asm.dt * wq[q] * dot(&r, &asm.solve_stiffness(&r));
            }
            s
        })
        .sum();
    let w0 = asm.block(w, 0);
    (total + dot(w0, &asm.mass.matvec(w0))).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct InverseBounds {
    /// `‖A(t)⁻¹ g‖_V`.
    pub inverse_norm: f64,
    /// `⟨g, A(t)⁻¹ g⟩`.
    pub pairing: f64,
    pub g_dual_norm: f64,
    /// `‖A⁻¹g‖_V ≤ ‖g‖_{V′} / α`.
    pub upper_ok: bool,
    /// `⟨g, A⁻¹g⟩ ≥ (α/M²) ‖g‖²_{V′}`.
    pub lower_ok: bool,
}

/// Both inverse bounds for the spatial operator frozen at time `t`.
///
/// The lower bound is checked with the squared dual norm; the unsquared
/// form is not scale invariant.
pub fn inverse_operator_bounds(
    asm: &ParabolicAssembly,
    g: &DualVector,
    t: f64,
) -> Result<InverseBounds, ParabolicError> {
    let g = g.coeffs();
    if g.len() != asm.m {
        return Err(ParabolicError::InvalidInput(format!(
            "functional has {} coefficients, expected {}",
            g.len(),
            asm.m
        )));
    }
    if !(0.0..=asm.problem.t_final).contains(&t) {
        return Err(ParabolicError::InvalidInput(format!(
            "time {t} outside [0, {}]",
            asm.problem.t_final
        )));
    }
    let a = spatial_operator(&asm.problem, t)?;
    let v = Lu::new(&a).map_err(|_| ParabolicError::SingularSystem)?.solve(g);
    let inverse_norm = dot(&v, &asm.stiffness.matvec(&v)).max(0.0).sqrt();
    let pairing = dot(g, &v);
    let g_dual_norm = dot(g, &asm.solve_stiffness(g)).max(0.0).sqrt();
    let k = &asm.constants;
    Ok(InverseBounds {
        inverse_norm,
        pairing,
        g_dual_norm,
        upper_ok: inverse_norm <= g_dual_norm / k.alpha * (1.0 + BOUND_SLACK),
        lower_ok: pairing >= k.alpha / (k.m * k.m) * g_dual_norm * g_dual_norm * (1.0 - BOUND_SLACK),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parabolic::{assemble_space_time, ParabolicProblem};

    fn heat(nx: usize, nt: usize) -> ParabolicAssembly {
        let p = ParabolicProblem::constant(1.0, 0.0, 1.0, "0", "0", 1.0, nx, nt).unwrap();
        assemble_space_time(&p).unwrap()
    }

    #[test]
    fn lanczos_matches_dense() {
        for (nx, nt) in [(4, 4), (6, 3), (5, 8)] {
            let a = heat(nx, nt);
            let d = spectral_bounds(&a, SpectralMethod::Dense).unwrap();
            let l = spectral_bounds(&a, SpectralMethod::Lanczos).unwrap();
            assert!((d.beta - l.beta).abs() < 1e-9 * d.beta, "{} {}", d.beta, l.beta);
            assert!((d.mu - l.mu).abs() < 1e-9 * d.mu);
        }
    }

    #[test]
    fn witness_attains_beta() {
        let a = heat(5, 5);
        for method in [SpectralMethod::Dense, SpectralMethod::Lanczos] {
            let s = spectral_bounds(&a, method).unwrap();
            let u = &s.beta_witness;
            let ratio = a.y_dual_norm(&a.apply_b(u)) / a.x_norm(u);
            assert!((ratio - s.beta).abs() < 1e-8 * s.beta);
        }
    }

    #[test]
    fn one_dof_trace_ratio() {
        // nx = 2, nt = 1: one interior node, φ with M = h·2/3 = 1/3 and
        // K = 2/h = 4; v ≡ φ has ‖v‖_X² = (Δt/3 + Δt/3 + 2Δt/6)·4 = 4 and
        // ‖v(t)‖_H² = 1/3.
        let a = heat(2, 1);
        let v = vec![1.0, 1.0];
        assert!((a.x_norm(&v) - 2.0).abs() < 1e-14);
        let ratio = (1.0_f64 / 3.0).sqrt() / 2.0;
        assert!(estimate_trace_constant(&a).unwrap() >= ratio - 1e-14);
    }

    #[test]
    fn triple_norm_of_constant_field() {
        let a = heat(4, 3);
        let phi = [0.3, -1.0, 0.5];
        let w: Vec<f64> = (0..4).flat_map(|_| phi).collect();
        let aphi = a.stiffness.add(&a.mass).matvec(&phi);
        let want = dot(&aphi, &a.solve_stiffness(&aphi)) + dot(&phi, &a.mass.matvec(&phi));
        assert!((triple_norm(&a, &w).powi(2) - want).abs() < 1e-12 * want);
        assert_eq!(triple_norm(&a, &vec![0.0; a.dim()]), 0.0);
    }

    #[test]
    fn zero_functional() {
        let a = heat(4, 2);
        let space = crate::spaces::GramSpace::new(a.stiffness.clone()).unwrap();
        let b = inverse_operator_bounds(&a, &DualVector::zero(&space), 0.5).unwrap();
        assert_eq!((b.inverse_norm, b.pairing), (0.0, 0.0));
        assert!(b.upper_ok && b.lower_ok);
    }
}
