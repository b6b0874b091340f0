use serde::Serialize;

use crate::modulus::fit_loglog_slope;

use super::assembly::{assemble_with_constants, ParabolicAssembly};
use super::diagnostics::{estimate_trace_constant, spectral_bounds, Continuity, SpectralMethod};
use super::problem::{validate_assumptions, ParabolicProblem};
use super::solve::{solution_errors, solve_with_beta, ParabolicSolution, SolutionErrors, SolutionNorms};
use super::ParabolicError;

/// Everything the pipeline computes for one mesh.
#[derive(Debug, Clone, Serialize)]
pub struct ParabolicReport {
    pub alpha: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub nu0: f64,
    pub c0: f64,
    #[serde(rename = "C_P")]
    pub c_p: f64,
    #[serde(rename = "C_tr_h")]
    pub c_tr_h: f64,
    pub beta_h: f64,
    pub mu_h: f64,
    #[serde(rename = "C_max")]
    pub c_max: f64,
    pub solution_norms: SolutionNorms,
    pub apriori_ok: bool,
    /// `μ_h ≤ C_max`.
    pub continuity_ok: bool,
    /// Continuous lower bound `α³/M²` on the inf-sup constant.
    pub alpha3_over_m2: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub nx: usize,
    pub nt: usize,
    pub spectral_method: SpectralMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub errors: Option<SolutionErrors>,
    pub sample_grid: (usize, usize),
}

/// Validate, assemble, run all diagnostics and solve.
pub fn run_pipeline(
    problem: &ParabolicProblem,
    method: SpectralMethod,
) -> Result<(ParabolicReport, ParabolicAssembly, ParabolicSolution), ParabolicError> {
    if problem.nx < 2 {
        return Err(ParabolicError::EmptySpace);
    }
    let k = validate_assumptions(problem)?;
    let asm = assemble_with_constants(problem, k)?;
    let spec = spectral_bounds(&asm, method)?;
    let cont = Continuity::new(spec.mu, k.m, estimate_trace_constant(&asm)?);
    let sol = solve_with_beta(&asm, spec.beta)?;
    let errors = solution_errors(&asm, &sol.u)?;
    let report = ParabolicReport {
        alpha: k.alpha,
        m: k.m,
        nu0: k.nu0,
        c0: k.c0,
        c_p: k.c_p,
        c_tr_h: cont.c_tr,
        beta_h: spec.beta,
        mu_h: spec.mu,
        c_max: cont.c_max,
        solution_norms: sol.norms,
        apriori_ok: sol.apriori_ok,
        continuity_ok: cont.ok,
        alpha3_over_m2: k.alpha3_over_m2,
        t_final: problem.t_final,
        nx: problem.nx,
        nt: problem.nt,
        spectral_method: spec.method,
        errors,
        sample_grid: (k.samples_x, k.samples_t),
    };
    Ok((report, asm, sol))
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepLevel {
    pub nx: usize,
    pub nt: usize,
    pub h: f64,
    pub beta_h: f64,
    pub mu_h: f64,
    #[serde(rename = "C_tr_h")]
    pub c_tr_h: f64,
    #[serde(rename = "C_max")]
    pub c_max: f64,
    pub apriori_ok: bool,
    pub continuity_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub errors: Option<SolutionErrors>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub levels: Vec<SweepLevel>,
    /// `min β_h / max β_h` over the levels.
    pub beta_plateau: f64,
    /// Fitted log-log slopes of the errors against `h`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_l2_h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_l2_v: Option<f64>,
}

/// Runs the pipeline on `levels` meshes, doubling `nx` and `nt` together
/// from the problem's mesh.
pub fn sweep(
    problem: &ParabolicProblem,
    levels: usize,
    method: SpectralMethod,
) -> Result<SweepReport, ParabolicError> {
    let mut out = Vec::with_capacity(levels);
    for l in 0..levels {
        let p = problem.with_mesh(problem.nx << l, problem.nt << l);
        let (r, _, _) = run_pipeline(&p, method)?;
        out.push(SweepLevel {
            nx: r.nx,
            nt: r.nt,
            h: 1.0 / r.nx as f64,
            beta_h: r.beta_h,
            mu_h: r.mu_h,
            c_tr_h: r.c_tr_h,
            c_max: r.c_max,
            apriori_ok: r.apriori_ok,
            continuity_ok: r.continuity_ok,
            errors: r.errors,
        });
    }
    let betas = out.iter().map(|l| l.beta_h);
    let (lo, hi) = betas.fold((f64::INFINITY, 0.0_f64), |(a, b), x| (a.min(x), b.max(x)));
    let rate = |f: fn(&SolutionErrors) -> f64| {
        let pts: Option<Vec<(f64, f64)>> =
            out.iter().map(|l| l.errors.as_ref().map(|e| (l.h, f(e)))).collect();
        pts.and_then(|p| fit_loglog_slope(&p))
    };
    Ok(SweepReport {
        beta_plateau: if hi > 0.0 { lo / hi } else { 0.0 },
        rate_l2_h: rate(|e| e.l2_h),
        rate_l2_v: rate(|e| e.l2_v),
        levels: out,
    })
}
