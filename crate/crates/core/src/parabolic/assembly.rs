//! Space-time Petrov–Galerkin assembly.
//!
//! Trial space: continuous piecewise linears in time with values in the
//! piecewise linears on `(0,1)` vanishing at both ends. A trial vector
//! stacks the nodal blocks `U_0, …, U_N` (`N = nt`, block size
//! `m = nx − 1`).
//!
//! Test space: piecewise constants in time with the same spatial values,
//! plus an initial-trace block. Test rows are ordered slab by slab, the
//! initial block last. On slab `n` with `u = (1−τ) U_n + τ U_{n+1}`,
//!
//! ```text
//! ∫ (u′, φ_j) + a(t; u, φ_j) dt = [D_n U_n + E_n U_{n+1}]_j
//! D_n = −M + Δt Σ_q w_q (1−τ_q) A(t_q)
//! E_n =  M + Δt Σ_q w_q  τ_q    A(t_q)
//! ```
//!
//! and the initial rows are `M U_0`. Here `A(t)[j][i] = a(t; φ_i, φ_j)` with
//! `a(t; w, v) = ∫ ν w′v′ − b w v′ + c w v`.
//!
//! Norms: `V = H¹₀` with Gram `K` (stiffness), `H = L²` with Gram `M`, and
//! `‖g‖_{V′}² = gᵀ K⁻¹ g` for pairing vectors. A trial function's
//! derivative is represented in `V` and measured through the Riesz
//! embedding `V ⊂ H ⊂ V′`, giving the dual Gram `M K⁻¹ M`:
//!
//! ```text
//! G_X = M_t ⊗ K + S_t ⊗ (M K⁻¹ M)
//! G_Y = blockdiag(Δt K, …, Δt K, M)
//! ```
//!
//! with `M_t`, `S_t` the mass and stiffness matrices of the time hat
//! functions.

use rayon::prelude::*;

use crate::linalg::{cholesky, solve_lower, solve_lower_transpose, DenseMatrix, LinalgError, Lu};
use crate::modulus::DiscreteOperator;
use crate::quadrature::gauss_legendre;
use crate::spaces::GramSpace;

use super::blocks::{add_into, BlockCholesky, BlockTridiagonal};
use super::problem::{validate_assumptions, Constants, ParabolicProblem, QUAD_POINTS};
use super::ParabolicError;

#[derive(Debug, Clone)]
pub struct ParabolicAssembly {
    pub problem: ParabolicProblem,
    pub constants: Constants,
    /// Interior spatial nodes.
    pub m: usize,
    pub h: f64,
    pub dt: f64,
    pub mass: DenseMatrix,
    pub stiffness: DenseMatrix,
    /// `M K⁻¹ M`.
    pub dual_mass: DenseMatrix,
    /// `A(t_q)` at the three Gauss times of each slab.
    pub slab_operators: Vec<[DenseMatrix; 3]>,
    pub d_blocks: Vec<DenseMatrix>,
    pub e_blocks: Vec<DenseMatrix>,
    /// Test-space load: slab blocks then `∫ u₀ φ_j`.
    pub rhs: Vec<f64>,
    pub gram_x: BlockTridiagonal,
    mass_factor: DenseMatrix,
    stiffness_factor: DenseMatrix,
    e_lu: Vec<Lu>,
    gram_x_factor: BlockCholesky,
}

/// Validates the assumptions, then assembles.
pub fn assemble_space_time(problem: &ParabolicProblem) -> Result<ParabolicAssembly, ParabolicError> {
    if problem.nx < 2 {
        return Err(ParabolicError::EmptySpace);
    }
    let constants = validate_assumptions(problem)?;
    assemble_with_constants(problem, constants)
}

pub(crate) fn assemble_with_constants(
    problem: &ParabolicProblem,
    constants: Constants,
) -> Result<ParabolicAssembly, ParabolicError> {
    if problem.nx < 2 {
        return Err(ParabolicError::EmptySpace);
    }
    let nx = problem.nx;
    let nt = problem.nt;
    let m = nx - 1;
    let h = problem.h();
    let dt = problem.dt();

    let mut mass = DenseMatrix::zeros(m, m);
    let mut stiffness = DenseMatrix::zeros(m, m);
    for i in 0..m {
        mass[(i, i)] = 2.0 * h / 3.0;
        stiffness[(i, i)] = 2.0 / h;
        if i + 1 < m {
            mass[(i, i + 1)] = h / 6.0;
            mass[(i + 1, i)] = h / 6.0;
            stiffness[(i, i + 1)] = -1.0 / h;
            stiffness[(i + 1, i)] = -1.0 / h;
        }
    }
    let mass_factor = cholesky(&mass)?;
    let stiffness_factor = cholesky(&stiffness)?;
    let kinv_m = {
        let y = crate::linalg::solve_lower_matrix(&stiffness_factor, &mass);
        crate::linalg::solve_lower_transpose_matrix(&stiffness_factor, &y)
    };
    let dual_mass = mass.matmul(&kinv_m).symmetrized();

    let (tau, wq) = gauss_legendre(QUAD_POINTS);
    let slabs: Vec<SlabBlocks> = (0..nt)
        .into_par_iter()
        .map(|n| {
            let t0 = n as f64 * dt;
            let mut ops = Vec::with_capacity(3);
            let mut d = mass.scaled(-1.0);
            let mut e = mass.clone();
            let mut load = vec![0.0; m];
            for q in 0..3 {
                let t = t0 + tau[q] * dt;
                let a = spatial_operator(problem, t)?;
                d.axpy(dt * wq[q] * (1.0 - tau[q]), &a);
                e.axpy(dt * wq[q] * tau[q], &a);
                let g = load_vector(nx, |x| problem.f.try_eval(x, t))?;
                load.iter_mut().zip(&g).for_each(|(l, gi)| *l += dt * wq[q] * gi);
                ops.push(a);
            }
            let ops: [DenseMatrix; 3] = ops.try_into().expect("three Gauss times");
            Ok(SlabBlocks { ops, d, e, load })
        })
        .collect::<Result<_, ParabolicError>>()?;

    let mut rhs = Vec::with_capacity((nt + 1) * m);
    let mut slab_operators = Vec::with_capacity(nt);
    let mut d_blocks = Vec::with_capacity(nt);
    let mut e_blocks = Vec::with_capacity(nt);
    for s in slabs {
        rhs.extend_from_slice(&s.load);
        slab_operators.push(s.ops);
        d_blocks.push(s.d);
        e_blocks.push(s.e);
    }
    rhs.extend(load_vector(nx, |x| problem.u0.try_eval(x, 0.0))?);

    let e_lu = e_blocks
        .iter()
        .map(Lu::new)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| ParabolicError::SingularSystem)?;

    // time hat functions: M_t and S_t are tridiagonal
    let mut diag = Vec::with_capacity(nt + 1);
    for k in 0..=nt {
        let ends = if k == 0 || k == nt { 1.0 } else { 2.0 };
        let mut blk = stiffness.scaled(ends * dt / 3.0);
        blk.axpy(ends / dt, &dual_mass);
        diag.push(blk);
    }
    let mut off = stiffness.scaled(dt / 6.0);
    off.axpy(-1.0 / dt, &dual_mass);
    let gram_x = BlockTridiagonal { diag, sub: vec![off; nt] };
    let gram_x_factor = BlockCholesky::new(&gram_x)?;

    Ok(ParabolicAssembly {
        problem: problem.clone(),
        constants,
        m,
        h,
        dt,
        mass,
        stiffness,
        dual_mass,
        slab_operators,
        d_blocks,
        e_blocks,
        rhs,
        gram_x,
        mass_factor,
        stiffness_factor,
        e_lu,
        gram_x_factor,
    })
}

struct SlabBlocks {
    ops: [DenseMatrix; 3],
    d: DenseMatrix,
    e: DenseMatrix,
    load: Vec<f64>,
}

/// `A(t)[j][i] = a(t; φ_i, φ_j)` on the interior hat functions, with
/// 3-point Gauss per cell.
pub fn spatial_operator(problem: &ParabolicProblem, t: f64) -> Result<DenseMatrix, ParabolicError> {
    let nx = problem.nx;
    let m = nx - 1;
    let h = problem.h();
    let (xq, wq) = gauss_legendre(QUAD_POINTS);
    let mut a = DenseMatrix::zeros(m, m);
    for cell in 0..nx {
        let x0 = cell as f64 * h;
        for q in 0..3 {
            let x = x0 + xq[q] * h;
            let w = wq[q] * h;
            let nu = problem.nu.try_eval(x, t)?;
            let b = problem.b.try_eval(x, t)?;
            let c = problem.c.try_eval(x, t)?;
            let phi = [1.0 - xq[q], xq[q]];
            let dphi = [-1.0 / h, 1.0 / h];
            for (p, &ip) in [cell, cell + 1].iter().enumerate() {
                if ip == 0 || ip == nx {
                    continue;
                }
                for (r, &jr) in [cell, cell + 1].iter().enumerate() {
                    if jr == 0 || jr == nx {
                        continue;
                    }
                    // trial p, test r
                    let val = nu * dphi[p] * dphi[r] - b * phi[p] * dphi[r] + c * phi[p] * phi[r];
                    a[(jr - 1, ip - 1)] += w * val;
                }
            }
        }
    }
    Ok(a)
}

/// `∫ g φ_j dx` on interior hat functions, 3-point Gauss per cell.
pub fn load_vector<F>(nx: usize, g: F) -> Result<Vec<f64>, ParabolicError>
where
    F: Fn(f64) -> Result<f64, super::expr::EvalError>,
{
    let h = 1.0 / nx as f64;
    let (xq, wq) = gauss_legendre(QUAD_POINTS);
    let mut full = vec![0.0; nx + 1];
    for cell in 0..nx {
        let x0 = cell as f64 * h;
        for q in 0..3 {
            let v = g(x0 + xq[q] * h)? * wq[q] * h;
            full[cell] += v * (1.0 - xq[q]);
            full[cell + 1] += v * xq[q];
        }
    }
    Ok(full[1..nx].to_vec())
}

impl ParabolicAssembly {
    pub fn nt(&self) -> usize {
        self.problem.nt
    }

    /// Trial (and test) dimension `(nt + 1) · m`.
    pub fn dim(&self) -> usize {
        (self.nt() + 1) * self.m
    }

    pub fn block<'a>(&self, v: &'a [f64], k: usize) -> &'a [f64] {
        &v[k * self.m..(k + 1) * self.m]
    }

    /// `B u`, as pairings with the test basis.
    pub fn apply_b(&self, u: &[f64]) -> Vec<f64> {
        let (m, nt) = (self.m, self.nt());
        let mut out = vec![0.0; self.dim()];
        for n in 0..nt {
            let dst = &mut out[n * m..(n + 1) * m];
            add_into(dst, &self.d_blocks[n].matvec(self.block(u, n)));
            add_into(dst, &self.e_blocks[n].matvec(self.block(u, n + 1)));
        }
        out[nt * m..].copy_from_slice(&self.mass.matvec(self.block(u, 0)));
        out
    }

    pub fn apply_bt(&self, y: &[f64]) -> Vec<f64> {
        let (m, nt) = (self.m, self.nt());
        let mut out = vec![0.0; self.dim()];
        for n in 0..nt {
            let yn = self.block(y, n);
            add_into(&mut out[n * m..(n + 1) * m], &self.d_blocks[n].tr_matvec(yn));
            add_into(&mut out[(n + 1) * m..(n + 2) * m], &self.e_blocks[n].tr_matvec(yn));
        }
        add_into(&mut out[..m], &self.mass.matvec(self.block(y, nt)));
        out
    }

    /// `B⁻¹ r` by forward time stepping.
    pub fn solve_b(&self, r: &[f64]) -> Vec<f64> {
        let (m, nt) = (self.m, self.nt());
        let mut u = vec![0.0; self.dim()];
        let u0 = solve_lower_transpose(&self.mass_factor, &solve_lower(&self.mass_factor, self.block(r, nt)));
        u[..m].copy_from_slice(&u0);
        for n in 0..nt {
            let mut rhs = self.block(r, n).to_vec();
            let du = self.d_blocks[n].matvec(self.block(&u, n));
            rhs.iter_mut().zip(&du).for_each(|(a, b)| *a -= b);
            let next = self.e_lu[n].solve(&rhs);
            u[(n + 1) * m..(n + 2) * m].copy_from_slice(&next);
        }
        u
    }

    /// `B⁻ᵀ y` by backward time stepping.
    pub fn solve_bt(&self, y: &[f64]) -> Vec<f64> {
        let (m, nt) = (self.m, self.nt());
        let mut z = vec![0.0; self.dim()];
        let mut carry = self.block(y, nt).to_vec();
        for n in (0..nt).rev() {
            // E_nᵀ z_n = y_{n+1} − D_{n+1}ᵀ z_{n+1}
            let zn = self.e_lu[n].solve_transpose(&carry);
            carry = self.block(y, n).to_vec();
            let dz = self.d_blocks[n].tr_matvec(&zn);
            carry.iter_mut().zip(&dz).for_each(|(a, b)| *a -= b);
            z[n * m..(n + 1) * m].copy_from_slice(&zn);
        }
        let zi = solve_lower_transpose(&self.mass_factor, &solve_lower(&self.mass_factor, &carry));
        z[nt * m..].copy_from_slice(&zi);
        z
    }

    pub fn apply_gram_x(&self, u: &[f64]) -> Vec<f64> {
        self.gram_x.apply(u)
    }

    pub fn solve_gram_x(&self, r: &[f64]) -> Vec<f64> {
        self.gram_x_factor.solve(r)
    }

    pub fn apply_gram_y(&self, v: &[f64]) -> Vec<f64> {
        let (m, nt) = (self.m, self.nt());
        let mut out = Vec::with_capacity(self.dim());
        for n in 0..nt {
            out.extend(self.stiffness.matvec(self.block(v, n)).iter().map(|x| x * self.dt));
        }
        out.extend(self.mass.matvec(&v[nt * m..]));
        out
    }

    pub fn solve_gram_y(&self, r: &[f64]) -> Vec<f64> {
        let (m, nt) = (self.m, self.nt());
        let mut out = Vec::with_capacity(self.dim());
        for n in 0..nt {
            out.extend(self.solve_stiffness(self.block(r, n)).iter().map(|x| x / self.dt));
        }
        let l = &self.mass_factor;
        out.extend(solve_lower_transpose(l, &solve_lower(l, &r[nt * m..])));
        out
    }

    /// `K⁻¹ g`.
    pub fn solve_stiffness(&self, g: &[f64]) -> Vec<f64> {
        let l = &self.stiffness_factor;
        solve_lower_transpose(l, &solve_lower(l, g))
    }

    /// `M⁻¹ g`.
    pub fn solve_mass(&self, g: &[f64]) -> Vec<f64> {
        let l = &self.mass_factor;
        solve_lower_transpose(l, &solve_lower(l, g))
    }

    pub(crate) fn mass_factor(&self) -> &DenseMatrix {
        &self.mass_factor
    }

    pub(crate) fn gram_x_factor(&self) -> &BlockCholesky {
        &self.gram_x_factor
    }

    pub fn x_norm(&self, u: &[f64]) -> f64 {
        crate::linalg::dot(u, &self.apply_gram_x(u)).sqrt()
    }

    /// `‖r‖_{Y′}` for a test-space pairing vector.
    pub fn y_dual_norm(&self, r: &[f64]) -> f64 {
        crate::linalg::dot(r, &self.solve_gram_y(r)).sqrt()
    }

    pub fn b_dense(&self) -> DenseMatrix {
        let (m, nt) = (self.m, self.nt());
        let mut b = DenseMatrix::zeros(self.dim(), self.dim());
        for n in 0..nt {
            b.set_block(n * m, n * m, &self.d_blocks[n]);
            b.set_block(n * m, (n + 1) * m, &self.e_blocks[n]);
        }
        b.set_block(nt * m, 0, &self.mass);
        b
    }

    pub fn gram_x_dense(&self) -> DenseMatrix {
        self.gram_x.to_dense()
    }

    pub fn gram_y_dense(&self) -> DenseMatrix {
        let (m, nt) = (self.m, self.nt());
        let mut g = DenseMatrix::zeros(self.dim(), self.dim());
        let k = self.stiffness.scaled(self.dt);
        for n in 0..nt {
            g.set_block(n * m, n * m, &k);
        }
        g.set_block(nt * m, nt * m, &self.mass);
        g
    }

    /// `B` as an operator from `X_h` to `Y_h′`. Dense; meant for small
    /// meshes.
    pub fn dense_operator(&self) -> Result<DiscreteOperator, ParabolicError> {
        let x = GramSpace::new(self.gram_x_dense()).map_err(|e| match e {
            crate::spaces::SpaceError::InvalidGram(l) => ParabolicError::Linalg(l),
            other => ParabolicError::InvalidInput(other.to_string()),
        })?;
        let y = GramSpace::new(self.gram_y_dense()).map_err(|e| match e {
            crate::spaces::SpaceError::InvalidGram(l) => ParabolicError::Linalg(l),
            other => ParabolicError::InvalidInput(other.to_string()),
        })?;
        DiscreteOperator::new(x, y, self.b_dense())
            .map_err(|e| ParabolicError::InvalidInput(e.to_string()))
    }

    /// `∫_J (w′(t), v(t))_H dt` for trial vectors `w`, `v`; 2-point Gauss
    /// per slab, exact for piecewise linears.
    pub fn time_derivative_pairing(&self, w: &[f64], v: &[f64]) -> f64 {
        let (tau, wq) = gauss_legendre(2);
        let mut total = 0.0;
        for n in 0..self.nt() {
            let dw: Vec<f64> = self
                .block(w, n + 1)
                .iter()
                .zip(self.block(w, n))
                .map(|(a, b)| (a - b) / self.dt)
                .collect();
            let mdw = self.mass.matvec(&dw);
            for q in 0..2 {
                let vt: Vec<f64> = self
                    .block(v, n)
                    .iter()
                    .zip(self.block(v, n + 1))
                    .map(|(a, b)| (1.0 - tau[q]) * a + tau[q] * b)
                    .collect();
                total += self.dt * wq[q] * crate::linalg::dot(&mdw, &vt);
            }
        }
        total
    }

    /// `(w(t_k), v(t_k))_H`.
    pub fn trace_inner(&self, w: &[f64], v: &[f64], k: usize) -> f64 {
        crate::linalg::dot(self.block(w, k), &self.mass.matvec(self.block(v, k)))
    }
}

impl From<LinalgError> for ParabolicError {
    fn from(e: LinalgError) -> Self {
        ParabolicError::Linalg(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;

    fn heat(nx: usize, nt: usize) -> ParabolicAssembly {
        let p = ParabolicProblem::constant(1.0, 0.0, 1.0, "0", "0", 1.0, nx, nt).unwrap();
        assemble_space_time(&p).unwrap()
    }

    #[test]
    fn square_system() {
        let a = heat(4, 3);
        let b = a.b_dense();
        assert_eq!((b.rows(), b.cols()), (4 * 3, 4 * 3));
        assert_eq!(a.dim(), (3 + 1) * (4 - 1));
        assert_eq!(a.rhs.len(), a.dim());
    }

    #[test]
    fn constant_coefficient_blocks() {
        let a = heat(4, 2);
        let ax = a.stiffness.add(&a.mass);
        let want_d = a.mass.scaled(-1.0).add(&ax.scaled(a.dt / 2.0));
        let want_e = a.mass.add(&ax.scaled(a.dt / 2.0));
        assert!(a.d_blocks[1].sub(&want_d).max_abs() < 1e-14);
        assert!(a.e_blocks[0].sub(&want_e).max_abs() < 1e-14);
    }

    #[test]
    fn structured_products_match_dense() {
        let p = ParabolicProblem::constant(1.0, 0.5, 2.0, "x*t", "x*(1-x)", 1.0, 5, 4).unwrap();
        let a = assemble_space_time(&p).unwrap();
        let n = a.dim();
        let u: Vec<f64> = (0..n).map(|i| ((i * 7 % 11) as f64 - 5.0) / 3.0).collect();
        let close = |x: &[f64], y: &[f64]| x.iter().zip(y).all(|(p, q)| (p - q).abs() < 1e-12);
        assert!(close(&a.apply_b(&u), &a.b_dense().matvec(&u)));
        assert!(close(&a.apply_bt(&u), &a.b_dense().tr_matvec(&u)));
        assert!(close(&a.apply_gram_x(&u), &a.gram_x_dense().matvec(&u)));
        assert!(close(&a.apply_gram_y(&u), &a.gram_y_dense().matvec(&u)));
        assert!(close(&a.apply_b(&a.solve_b(&u)), &u));
        assert!(close(&a.apply_bt(&a.solve_bt(&u)), &u));
        assert!(close(&a.apply_gram_x(&a.solve_gram_x(&u)), &u));
        assert!(close(&a.apply_gram_y(&a.solve_gram_y(&u)), &u));
    }

    #[test]
    fn one_interior_node_needs_two_cells() {
        let p = ParabolicProblem::constant(1.0, 0.0, 1.0, "0", "0", 1.0, 1, 1).unwrap();
        assert!(matches!(assemble_space_time(&p), Err(ParabolicError::EmptySpace)));
    }

    #[test]
    fn integration_by_parts_in_time() {
        let a = heat(4, 5);
        let w: Vec<f64> = (0..a.dim()).map(|i| (i as f64 * 0.37).sin()).collect();
        let lhs = a.time_derivative_pairing(&w, &w);
        let rhs = 0.5 * (a.trace_inner(&w, &w, a.nt()) - a.trace_inner(&w, &w, 0));
        assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        assert!(dot(&w, &w) > 0.0);
    }
}
