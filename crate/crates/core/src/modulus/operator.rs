use serde::Serialize;

use crate::linalg::{
    dot, solve_lower_matrix, solve_lower_transpose, svd, DenseMatrix, LinalgError, SvdResult,
};
use crate::spaces::GramSpace;

use super::ModulusError;

/// A bounded operator `A : V → W′` given by its matrix against bases of
/// `V` (columns) and `W` (rows): `matrix[j][i] = a(φ_i, ψ_j)`.
///
/// For a coefficient vector `v`, `A v` is the vector of pairings of the
/// functional `Av` with the test basis, so `⟨Av, w⟩ = wᵀ A v`.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    domain: GramSpace,
    test_space: GramSpace,
    matrix: DenseMatrix,
}

impl DiscreteOperator {
    pub fn new(
        domain: GramSpace,
        test_space: GramSpace,
        matrix: DenseMatrix,
    ) -> Result<Self, ModulusError> {
        if matrix.rows() != test_space.dim() || matrix.cols() != domain.dim() {
            return Err(ModulusError::DimensionMismatch {
                expected: (test_space.dim(), domain.dim()),
                found: (matrix.rows(), matrix.cols()),
            });
        }
        Ok(DiscreteOperator { domain, test_space, matrix })
    }

    /// Both spaces Euclidean.
    pub fn euclidean(matrix: DenseMatrix) -> Self {
        DiscreteOperator {
            domain: GramSpace::euclidean(matrix.cols()),
            test_space: GramSpace::euclidean(matrix.rows()),
            matrix,
        }
    }

    pub fn domain(&self) -> &GramSpace {
        &self.domain
    }

    pub fn test_space(&self) -> &GramSpace {
        &self.test_space
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    /// Pairing coefficients of `Av` against the test basis.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.matrix.matvec(v)
    }

    /// `a(v, w) = ⟨Av, w⟩`.
    pub fn pairing(&self, v: &[f64], w: &[f64]) -> f64 {
        dot(w, &self.matrix.matvec(v))
    }

    /// `A′ : W → V′` with `⟨Av, w⟩ = ⟨v, A′w⟩`. Its matrix is `Aᵀ`.
    pub fn adjoint(&self) -> DiscreteOperator {
        DiscreteOperator {
            domain: self.test_space.clone(),
            test_space: self.domain.clone(),
            matrix: self.matrix.transpose(),
        }
    }

    /// `Â = L_W⁻¹ A L_V⁻ᵀ`.
    ///
    /// With `G_V = L_V L_Vᵀ` and `y = L_Vᵀ v` we have `‖v‖_V = |y|`, and
    /// with `G_W = L_W L_Wᵀ` the dual norm is `‖f‖_{W′} = |L_W⁻¹ f|`. Hence
    /// `‖Av‖_{W′} / ‖v‖_V = |Â y| / |y|`, and every extremal problem over
    /// the quotient `‖Av‖_{W′}/‖v‖_V` becomes an ordinary singular value
    /// problem for `Â`. Equivalently, `σ(Â)²` are the eigenvalues of the
    /// pencil `Aᵀ G_W⁻¹ A x = λ G_V x`.
    pub fn whitened_matrix(&self) -> DenseMatrix {
        let lw = self.test_space.cholesky_factor();
        let lv = self.domain.cholesky_factor();
        let left = solve_lower_matrix(lw, &self.matrix);
        solve_lower_matrix(lv, &left.transpose()).transpose()
    }
}

/// SVD of the whitened matrix together with the maps back to the
/// original coordinates.
#[derive(Debug, Clone)]
pub(crate) struct WhitenedSvd {
    pub svd: SvdResult,
    /// Singular values padded with zeros to `domain.dim`; the tail counts
    /// the kernel dimension forced by `dim V > dim W`.
    pub padded: Vec<f64>,
    pub rank: usize,
    pub cutoff: f64,
}

impl WhitenedSvd {
    pub fn new(op: &DiscreteOperator, rel_tol: f64) -> Result<Self, LinalgError> {
        let svd = svd(&op.whitened_matrix())?;
        let n = op.domain.dim();
        let mut padded = svd.singular_values.clone();
        padded.resize(n, 0.0);
        let smax = svd.max_singular_value();
        let rank = crate::linalg::numerical_rank(&svd.singular_values, rel_tol);
        Ok(WhitenedSvd { svd, padded, rank, cutoff: rel_tol * smax })
    }

    /// Right singular vector `k` mapped back to `V`; unit in the `V`-norm.
    pub fn domain_vector(&self, op: &DiscreteOperator, k: usize) -> Vec<f64> {
        solve_lower_transpose(op.domain.cholesky_factor(), &self.svd.right.column(k))
    }

    /// Left singular vector `k` mapped to `W′`; unit in the dual norm.
    pub fn range_functional(&self, op: &DiscreteOperator, k: usize) -> Vec<f64> {
        op.test_space.cholesky_factor().matvec(&self.svd.left.column(k))
    }

    pub fn kernel_basis(&self, op: &DiscreteOperator) -> Vec<Vec<f64>> {
        (self.rank..op.domain.dim()).map(|k| self.domain_vector(op, k)).collect()
    }

    pub fn gamma(&self) -> Gamma {
        if self.rank == 0 {
            Gamma::Infinite
        } else {
            Gamma::Finite(self.padded[self.rank - 1])
        }
    }

    pub fn mu(&self) -> f64 {
        self.padded.last().copied().unwrap_or(0.0)
    }

    /// `σ_r / σ_{r+1}` around the rank decision, when both exist and the
    /// lower one is nonzero.
    pub fn gap_ratio(&self) -> Option<f64> {
        if self.rank == 0 || self.rank >= self.padded.len() {
            return None;
        }
        let below = self.padded[self.rank];
        (below > 0.0).then(|| self.padded[self.rank - 1] / below)
    }
}

/// Reduced minimum modulus; `Infinite` exactly when the operator is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma {
    Finite(f64),
    Infinite,
}

impl Gamma {
    pub fn finite(self) -> Option<f64> {
        match self {
            Gamma::Finite(g) => Some(g),
            Gamma::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Gamma::Infinite)
    }

    /// Relative agreement; two infinities agree.
    pub fn agrees_with(self, other: Gamma, rel: f64) -> bool {
        match (self, other) {
            (Gamma::Infinite, Gamma::Infinite) => true,
            (Gamma::Finite(a), Gamma::Finite(b)) => (a - b).abs() <= rel * a.abs().max(b.abs()),
            _ => false,
        }
    }
}

impl std::fmt::Display for Gamma {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Gamma::Finite(g) => write!(f, "{g}"),
            Gamma::Infinite => write!(f, "infinity"),
        }
    }
}

impl Serialize for Gamma {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Gamma::Finite(g) => s.serialize_f64(*g),
            Gamma::Infinite => s.serialize_str("infinity"),
        }
    }
}
