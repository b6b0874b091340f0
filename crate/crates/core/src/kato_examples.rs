//! Multiplication by `t` on `L²(0,1)`: `⟨Av, w⟩ = ∫₀¹ t v w dt`.
//!
//! `A` is injective with dense, non-closed range. The functional
//! `⟨f, w⟩ = ∫₀¹ w dt` lies in the closure of the range but not in it:
//! `u_ε = 1/t` on `[ε, 1)` and `0` below gives `A u_ε → f` while
//! `‖u_ε‖² = 1/ε − 1` blows up as `ε → 0`. Discretized on a uniform mesh,
//! `γ` of the discrete operator is `h/2` for piecewise constants, so the
//! family decays like `h`.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::DenseMatrix;
use crate::modulus::DiscreteOperator;
use crate::quadrature::{GAUSS3_NODES, GAUSS3_WEIGHTS};
use crate::spaces::{DualVector, GramSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    P0,
    P1,
}

impl std::str::FromStr for ElementKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "p0" => Ok(ElementKind::P0),
            "p1" => Ok(ElementKind::P1),
            _ => Err(format!("unknown element kind {s:?} (expected p0 or p1)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KatoError {
    #[error("need at least 2 cells, got {0}")]
    TooFewCells(usize),
    #[error("eps must lie in (0, 1), got {0}")]
    InvalidEps(f64),
    #[error("mesh with {cells} cells does not resolve eps = {eps} (need eps >= 2/n)")]
    MeshTooCoarse { cells: usize, eps: f64 },
}

#[derive(Debug, Clone)]
pub struct KikuchiInstance {
    pub cells: usize,
    pub kind: ElementKind,
    pub operator: DiscreteOperator,
    /// `⟨f, w⟩ = ∫₀¹ w dt`.
    pub f: DualVector,
}

impl KikuchiInstance {
    pub fn h(&self) -> f64 {
        1.0 / self.cells as f64
    }
}

pub fn build_kikuchi(cells: usize, kind: ElementKind) -> Result<KikuchiInstance, KatoError> {
    if cells < 2 {
        return Err(KatoError::TooFewCells(cells));
    }
    let n = cells;
    let h = 1.0 / n as f64;
    let (mass, mult, load) = match kind {
        ElementKind::P0 => {
            // ∫_cell t dt = h · midpoint
            let mids: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
            let mult: Vec<f64> = mids.iter().map(|m| h * m).collect();
            (DenseMatrix::from_diag(&vec![h; n]), DenseMatrix::from_diag(&mult), vec![h; n])
        }
        ElementKind::P1 => {
            let mut mass = DenseMatrix::zeros(n + 1, n + 1);
            let mut mult = DenseMatrix::zeros(n + 1, n + 1);
            let mut load = vec![0.0; n + 1];
            // 3-point Gauss is exact for the cubic integrands t φ_i φ_j
            for c in 0..n {
                let a = c as f64 * h;
                for (&xi, &w) in GAUSS3_NODES.iter().zip(&GAUSS3_WEIGHTS) {
                    let t = a + xi * h;
                    let phi = [1.0 - xi, xi];
                    for p in 0..2 {
                        load[c + p] += w * h * phi[p];
                        for q in 0..2 {
                            mass[(c + p, c + q)] += w * h * phi[p] * phi[q];
                            mult[(c + p, c + q)] += w * h * t * phi[p] * phi[q];
                        }
                    }
                }
            }
            (mass.symmetrized(), mult.symmetrized(), load)
        }
    };
    let space = GramSpace::new(mass).expect("mass matrix is SPD");
    let operator = DiscreteOperator::new(space.clone(), space.clone(), mult).expect("square");
    let f = DualVector::new(&space, load).expect("load has mesh dimension");
    Ok(KikuchiInstance { cells, kind, operator, f })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Blowup {
    pub cells: usize,
    pub eps: f64,
    /// `‖A u_ε − f‖_{W′}` on the mesh.
    pub residual: f64,
    /// `‖u_ε‖_{L²}` of the projected field.
    pub u_norm: f64,
}

/// Projects `u_ε` onto piecewise constants and measures how closely
/// `A u_ε` reaches `f`.
pub fn kikuchi_blowup(cells: usize, eps: f64) -> Result<Blowup, KatoError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(KatoError::InvalidEps(eps));
    }
    if cells < 2 {
        return Err(KatoError::TooFewCells(cells));
    }
    if eps < 2.0 / cells as f64 {
        return Err(KatoError::MeshTooCoarse { cells, eps });
    }
    let inst = build_kikuchi(cells, ElementKind::P0)?;
    let h = inst.h();
    // cell average of 1/t over [a, b] ∩ [ε, 1)
    let u: Vec<f64> = (0..cells)
        .map(|i| {
            let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
            if b <= eps {
                0.0
            } else {
                (b / a.max(eps)).ln() / h
            }
        })
        .collect();
    let space = inst.operator.domain();
    let au = inst.operator.apply(&u);
    let r: Vec<f64> = au.iter().zip(inst.f.coeffs()).map(|(a, b)| a - b).collect();
    Ok(Blowup {
        cells,
        eps,
        residual: space.dual_norm_of(&r).expect("mesh dimension"),
        u_norm: space.norm(&u).expect("mesh dimension"),
    })
}

/// Mesh size used for a given `ε`: `⌈4/ε⌉` cells.
pub fn blowup_cells(eps: f64) -> usize {
    (4.0 / eps).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulus::{analyze, Gamma};

    #[test]
    fn p0_whitening_is_midpoints() {
        let k = build_kikuchi(2, ElementKind::P0).unwrap();
        let w = k.operator.whitened_matrix();
        assert!(w.sub(&DenseMatrix::from_diag(&[0.25, 0.75])).max_abs() < 1e-15);
    }

    #[test]
    fn p0_gamma_is_half_h() {
        let k = build_kikuchi(10, ElementKind::P0).unwrap();
        let r = analyze(&k.operator, None).unwrap();
        assert!((r.gamma.finite().unwrap() - 0.05).abs() < 1e-13);
        assert_eq!(r.rank, 10);
        assert_eq!(r.gamma, Gamma::Finite(r.mu));
    }

    #[test]
    fn constant_field() {
        for n in [3, 7] {
            let k = build_kikuchi(n, ElementKind::P0).unwrap();
            let h = k.h();
            let av = k.operator.apply(&vec![1.0; n]);
            let got = k.operator.test_space().dual_norm_of(&av).unwrap().powi(2);
            let want: f64 = (0..n).map(|i| h * ((i as f64 + 0.5) * h).powi(2)).sum();
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn p1_matches_exact_integrals() {
        let k = build_kikuchi(4, ElementKind::P1).unwrap();
        let m = k.operator.domain().gram();
        let h = 0.25;
        assert!((m[(0, 0)] - h / 3.0).abs() < 1e-15);
        assert!((m[(1, 1)] - 2.0 * h / 3.0).abs() < 1e-15);
        assert!((m[(0, 1)] - h / 6.0).abs() < 1e-15);
        // ∫₀ʰ t (1 - t/h)² dt = h²/12
        assert!((k.operator.matrix()[(0, 0)] - h * h / 12.0).abs() < 1e-15);
        // row sums of the multiplication matrix integrate t φ_j
        let total: f64 = k.operator.matrix().as_slice().iter().sum();
        assert!((total - 0.5).abs() < 1e-14);
        assert!((k.f.coeffs().iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn blowup_norms() {
        let b = kikuchi_blowup(blowup_cells(0.5), 0.5).unwrap();
        assert!((b.u_norm.powi(2) - 1.0).abs() < 0.1);
        let b = kikuchi_blowup(blowup_cells(0.125), 0.125).unwrap();
        assert!((b.u_norm.powi(2) - 7.0).abs() < 0.7);
        assert_eq!(kikuchi_blowup(10, 0.1), Err(KatoError::MeshTooCoarse { cells: 10, eps: 0.1 }));
        assert!(kikuchi_blowup(10, 1.5).is_err());
        assert_eq!(build_kikuchi(1, ElementKind::P0).unwrap_err(), KatoError::TooFewCells(1));
    }

    #[test]
    fn blowup_residual_decreases() {
        let r: Vec<f64> = [0.25, 0.125, 0.0625]
            .iter()
            .map(|&e| kikuchi_blowup(blowup_cells(e), e).unwrap().residual)
            .collect();
        assert!(r[0] > r[1] && r[1] > r[2], "{r:?}");
    }
}
