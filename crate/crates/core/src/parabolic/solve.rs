use std::path::Path;

use serde::Serialize;

use crate::linalg::dot;
use crate::quadrature::gauss_legendre;

use super::assembly::ParabolicAssembly;
use super::diagnostics::infsup_constant;
use super::problem::DX_STEP;
use super::ParabolicError;

/// Relative residual `‖B u − r‖_{Y′} / ‖r‖_{Y′}` above which a solve is
/// reported as singular.
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolutionNorms {
    /// `‖u_h‖_X`.
    pub x_norm: f64,
    /// `‖F‖_{L²(J;V′)}` of the discrete load.
    pub f_norm: f64,
    /// `‖u₀‖_H` of the projected initial datum.
    pub u0_norm: f64,
    /// `(‖F‖ + ‖u₀‖) / β_h`.
    pub bound: f64,
    /// `‖B u_h − r‖_{Y′} / ‖r‖_{Y′}`, zero for zero data.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct ParabolicSolution {
    /// Nodal values, block `k` at `t_k`, interior nodes only.
    pub u: Vec<f64>,
    pub beta: f64,
    pub norms: SolutionNorms,
    pub apriori_ok: bool,
}

/// Solves `B u = r` and checks `‖u‖_X ≤ (‖F‖ + ‖u₀‖)/β_h`, with `β_h`
/// from [`infsup_constant`].
pub fn solve_parabolic(asm: &ParabolicAssembly) -> Result<ParabolicSolution, ParabolicError> {
    let beta = infsup_constant(asm)?;
    solve_with_beta(asm, beta)
}

/// As [`solve_parabolic`] with an already computed `β_h`.
pub fn solve_with_beta(asm: &ParabolicAssembly, beta: f64) -> Result<ParabolicSolution, ParabolicError> {
    if beta.is_nan() || beta <= 0.0 {
        return Err(ParabolicError::SingularSystem);
    }
    let u = asm.solve_b(&asm.rhs);
    if u.iter().any(|v| !v.is_finite()) {
        return Err(ParabolicError::SingularSystem);
    }
    let r: Vec<f64> = asm.apply_b(&u).iter().zip(&asm.rhs).map(|(a, b)| a - b).collect();
    let rhs_norm = asm.y_dual_norm(&asm.rhs);
    let residual = if rhs_norm > 0.0 { asm.y_dual_norm(&r) / rhs_norm } else { asm.y_dual_norm(&r) };
    if residual > RESIDUAL_TOL {
        return Err(ParabolicError::SingularSystem);
    }

    let (m, nt) = (asm.m, asm.nt());
    let f_norm = (0..nt)
        .map(|n| {
            let g = &asm.rhs[n * m..(n + 1) * m];
            dot(g, &asm.solve_stiffness(g)) / asm.dt
        })
        .sum::<f64>()
        .sqrt();
    let l = &asm.rhs[nt * m..];
    let u0_norm = dot(l, &asm.solve_mass(l)).max(0.0).sqrt();
    let x_norm = asm.x_norm(&u);
    let bound = (f_norm + u0_norm) / beta;
    Ok(ParabolicSolution {
        apriori_ok: x_norm <= bound * (1.0 + 1e-8),
        u,
        beta,
        norms: SolutionNorms { x_norm, f_norm, u0_norm, bound, residual },
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolutionErrors {
    /// `‖u − u_h‖_{L²(J;H)}`.
    pub l2_h: f64,
    /// `‖∂ₓ(u − u_h)‖_{L²(J;L²)}`, the `L²(J;V)` error.
    pub l2_v: f64,
}

/// Errors against the exact solution of the problem, if one is given.
/// 5-point Gauss per cell and slab; `∂ₓu` by central differences.
pub fn solution_errors(
    asm: &ParabolicAssembly,
    u: &[f64],
) -> Result<Option<SolutionErrors>, ParabolicError> {
    let Some(exact) = asm.problem.exact.as_ref() else {
        return Ok(None);
    };
    let (nx, nt, h, dt) = (asm.problem.nx, asm.nt(), asm.h, asm.dt);
    let (q, w) = gauss_legendre(5);
    let nodal = |k: usize, i: usize| if i == 0 || i == nx { 0.0 } else { u[k * asm.m + i - 1] };
    let (mut eh, mut ev) = (0.0, 0.0);
    for n in 0..nt {
        for (qt, wt) in q.iter().zip(w) {
            let t = (n as f64 + qt) * dt;
            for cell in 0..nx {
                let at = |i: usize| (1.0 - qt) * nodal(n, i) + qt * nodal(n + 1, i);
                let (left, right) = (at(cell), at(cell + 1));
                let slope = (right - left) / h;
                for (qx, wx) in q.iter().zip(w) {
                    let x = (cell as f64 + qx) * h;
                    let uh = (1.0 - qx) * left + qx * right;
                    let ue = exact.try_eval(x, t)?;
                    let dx = (exact.try_eval(x + DX_STEP, t)? - exact.try_eval(x - DX_STEP, t)?)
                        / (2.0 * DX_STEP);
                    let weight = wt * wx * dt * h;
                    eh += weight * (ue - uh).powi(2);
                    ev += weight * (dx - slope).powi(2);
                }
            }
        }
    }
    Ok(Some(SolutionErrors { l2_h: eh.sqrt(), l2_v: ev.sqrt() }))
}

/// `(t, x, u)` at every space-time node, boundary nodes included.
pub fn solution_table(asm: &ParabolicAssembly, u: &[f64]) -> Vec<(f64, f64, f64)> {
    let nx = asm.problem.nx;
    let mut rows = Vec::with_capacity((asm.nt() + 1) * (nx + 1));
    for k in 0..=asm.nt() {
        let t = k as f64 * asm.dt;
        for i in 0..=nx {
            let v = if i == 0 || i == nx { 0.0 } else { u[k * asm.m + i - 1] };
            rows.push((t, i as f64 * asm.h, v));
        }
    }
    rows
}

pub fn write_solution_csv(
    path: &Path,
    asm: &ParabolicAssembly,
    u: &[f64],
) -> Result<(), ParabolicError> {
    let io = |e: &dyn std::fmt::Display| ParabolicError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let mut w = csv::Writer::from_path(path).map_err(|e| io(&e))?;
    w.write_record(["t", "x", "u"]).map_err(|e| io(&e))?;
    for (t, x, v) in solution_table(asm, u) {
        w.write_record([format!("{t:?}"), format!("{x:?}"), format!("{v:?}")]).map_err(|e| io(&e))?;
    }
    w.flush().map_err(|e| io(&e))
}
