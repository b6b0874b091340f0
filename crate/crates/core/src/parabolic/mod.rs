//! Space-time Petrov–Galerkin discretization of a 1D convection–diffusion–
//! reaction problem and its stability diagnostics.

mod assembly;
mod blocks;
mod diagnostics;
mod expr;
mod problem;
mod report;
mod solve;

use serde::Serialize;
use thiserror::Error;

use crate::linalg::LinalgError;

pub use assembly::{assemble_space_time, load_vector, spatial_operator, ParabolicAssembly};
pub use blocks::{BlockCholesky, BlockTridiagonal};
pub use diagnostics::{
    continuity_constant, estimate_trace_constant, infsup_constant, inverse_operator_bounds,
    spectral_bounds, triple_norm, Continuity, InverseBounds, SpectralBounds, SpectralMethod,
    DENSE_LIMIT,
};
pub use expr::{parse_coefficient, Coefficient, EvalError, ParseError};
pub use problem::{
    validate_assumptions, Constants, ExprOrNumber, ParabolicConfig, ParabolicProblem,
    DEFAULT_SAMPLE_DENSITY, DX_STEP, POINCARE,
};
pub use report::{run_pipeline, sweep, ParabolicReport, SweepLevel, SweepReport};
pub use solve::{
    solution_errors, solution_table, solve_parabolic, solve_with_beta, write_solution_csv,
    ParabolicSolution, SolutionErrors, SolutionNorms,
};

#[derive(Debug, Error)]
pub enum ParabolicError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot parse `{field}`: {error}")]
    Parse { field: &'static str, error: ParseError },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("assumption violated: {inequality} fails at x = {x}, t = {t} (value {value})")]
    AssumptionViolated { inequality: &'static str, x: f64, t: f64, value: f64 },
    #[error("no interior spatial nodes; nx must be at least 2")]
    EmptySpace,
    #[error("space-time system is singular")]
    SingularSystem,
    #[error(transparent)]
    Linalg(LinalgError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    InvalidInput(String),
}

/// Witness point of a violated assumption, for machine-readable reports.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub inequality: &'static str,
    pub x: f64,
    pub t: f64,
    pub value: f64,
}

impl ParabolicError {
    pub fn witness(&self) -> Option<Witness> {
        match *self {
            ParabolicError::AssumptionViolated { inequality, x, t, value } => {
                Some(Witness { inequality, x, t, value })
            }
            _ => None,
        }
    }
}
