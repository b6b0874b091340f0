use std::path::Path;

use serde::{Deserialize, Serialize};

use super::expr::{parse_coefficient, Coefficient};
use super::ParabolicError;

/// Poincaré constant of `(0, 1)` with zero boundary values:
/// `‖v‖_{L²} ≤ (1/π) ‖v′‖_{L²}`.
pub const POINCARE: f64 = 1.0 / std::f64::consts::PI;

/// Step of the central difference used for `∂ₓb`.
pub const DX_STEP: f64 = 1e-6;

/// Default samples per quadrature point and direction.
pub const DEFAULT_SAMPLE_DENSITY: usize = 4;

/// Quadrature points per cell or slab.
pub(crate) const QUAD_POINTS: usize = 3;

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum ExprOrNumber {
    Number(f64),
    Expr(String),
}

impl ExprOrNumber {
    fn source(&self) -> String {
        match self {
            ExprOrNumber::Number(v) => format!("{v:?}"),
            ExprOrNumber::Expr(s) => s.clone(),
        }
    }
}

/// On-disk problem description.
#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ParabolicConfig {
    #[serde(rename = "T")]
    pub t_final: f64,
    pub nx: usize,
    pub nt: usize,
    pub nu: ExprOrNumber,
    pub b: ExprOrNumber,
    pub c: ExprOrNumber,
    #[serde(rename = "F")]
    pub f: ExprOrNumber,
    pub u0: ExprOrNumber,
    /// Exact solution `u(x, t)`, used only for error reporting.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExprOrNumber>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_density: Option<usize>,
}

/// `u′ − (ν uₓ)ₓ + (b u)ₓ + c u = F` on `(0,1) × (0,T)`, `u = 0` at
/// `x = 0, 1`, `u(·, 0) = u₀`.
#[derive(Debug, Clone)]
pub struct ParabolicProblem {
    pub t_final: f64,
    pub nx: usize,
    pub nt: usize,
    pub nu: Coefficient,
    pub b: Coefficient,
    pub c: Coefficient,
    pub f: Coefficient,
    pub u0: Coefficient,
    pub exact: Option<Coefficient>,
    pub sample_density: usize,
}

impl ParabolicProblem {
    pub fn from_config(cfg: &ParabolicConfig) -> Result<Self, ParabolicError> {
        let parse = |field: &'static str, e: &ExprOrNumber| {
            parse_coefficient(&e.source()).map_err(|error| ParabolicError::Parse { field, error })
        };
        if !(cfg.t_final > 0.0 && cfg.t_final.is_finite()) {
            return Err(ParabolicError::InvalidInput(format!("T must be positive, got {}", cfg.t_final)));
        }
        if cfg.nt == 0 {
            return Err(ParabolicError::InvalidInput("nt must be at least 1".into()));
        }
        if cfg.nx == 0 {
            return Err(ParabolicError::InvalidInput("nx must be at least 1".into()));
        }
        let sample_density = cfg.sample_density.unwrap_or(DEFAULT_SAMPLE_DENSITY);
        if sample_density == 0 {
            return Err(ParabolicError::InvalidInput("sample_density must be at least 1".into()));
        }
        Ok(ParabolicProblem {
            t_final: cfg.t_final,
            nx: cfg.nx,
            nt: cfg.nt,
            nu: parse("nu", &cfg.nu)?,
            b: parse("b", &cfg.b)?,
            c: parse("c", &cfg.c)?,
            f: parse("F", &cfg.f)?,
            u0: parse("u0", &cfg.u0)?,
            exact: cfg.exact.as_ref().map(|e| parse("exact", e)).transpose()?,
            sample_density,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self, ParabolicError> {
        let cfg: ParabolicConfig =
            serde_json::from_str(text).map_err(|e| ParabolicError::Config(e.to_string()))?;
        Self::from_config(&cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ParabolicError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ParabolicError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json_str(&text)
    }

    /// Constant coefficients `ν`, `b`, `c` with the given data.
    #[allow(clippy::too_many_arguments)]
    pub fn constant(
        nu: f64,
        b: f64,
        c: f64,
        f: &str,
        u0: &str,
        t_final: f64,
        nx: usize,
        nt: usize,
    ) -> Result<Self, ParabolicError> {
        Self::from_config(&ParabolicConfig {
            t_final,
            nx,
            nt,
            nu: ExprOrNumber::Number(nu),
            b: ExprOrNumber::Number(b),
            c: ExprOrNumber::Number(c),
            f: ExprOrNumber::Expr(f.into()),
            u0: ExprOrNumber::Expr(u0.into()),
            exact: None,
            sample_density: None,
        })
    }

    /// Same problem on another mesh.
    pub fn with_mesh(&self, nx: usize, nt: usize) -> Self {
        ParabolicProblem { nx, nt, ..self.clone() }
    }

    pub fn with_exact(mut self, exact: &str) -> Result<Self, ParabolicError> {
        self.exact = Some(
            parse_coefficient(exact).map_err(|error| ParabolicError::Parse { field: "exact", error })?,
        );
        Ok(self)
    }

    pub fn h(&self) -> f64 {
        1.0 / self.nx as f64
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.nt as f64
    }
}

/// Constants of the coercivity and continuity assumptions, estimated by
/// sampling.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Constants {
    pub nu0: f64,
    pub c0: f64,
    pub alpha: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "C_P")]
    pub c_p: f64,
    /// `α³/M²`, the continuous inf-sup lower bound.
    pub alpha3_over_m2: f64,
    pub samples_x: usize,
    pub samples_t: usize,
}

/// Samples `ν`, `½∂ₓb + c` and `ν + C_P|b| + C_P²|c|` on a uniform grid
/// with `density · 3` points per cell and slab (endpoints included).
///
/// Fails with the offending inequality and a witness point when
/// `ν₀ ≤ 0` or `c₀ ≤ 0`, or with an evaluation error where any
/// coefficient is not finite.
pub fn validate_assumptions(problem: &ParabolicProblem) -> Result<Constants, ParabolicError> {
    let sx = problem.sample_density * QUAD_POINTS * problem.nx;
    let st = problem.sample_density * QUAD_POINTS * problem.nt;
    let xs: Vec<f64> = (0..=sx).map(|i| i as f64 / sx as f64).collect();
    let ts: Vec<f64> = (0..=st).map(|k| problem.t_final * k as f64 / st as f64).collect();

    problem.u0.check_grid(&xs, &[0.0])?;
    let mut nu0 = (f64::INFINITY, 0.0, 0.0);
    let mut c0 = (f64::INFINITY, 0.0, 0.0);
    let mut m = 0.0_f64;
    for &t in &ts {
        for &x in &xs {
            let nu = problem.nu.try_eval(x, t)?;
            let b = problem.b.try_eval(x, t)?;
            let c = problem.c.try_eval(x, t)?;
            problem.f.try_eval(x, t)?;
            let db = (problem.b.try_eval(x + DX_STEP, t)? - problem.b.try_eval(x - DX_STEP, t)?)
                / (2.0 * DX_STEP);
            let react = 0.5 * db + c;
            if nu < nu0.0 {
                nu0 = (nu, x, t);
            }
            if react < c0.0 {
                c0 = (react, x, t);
            }
            m = m.max(nu + POINCARE * b.abs() + POINCARE * POINCARE * c.abs());
        }
    }
    if nu0.0 <= 0.0 {
        return Err(ParabolicError::AssumptionViolated {
            inequality: "nu(x,t) >= nu0 > 0",
            x: nu0.1,
            t: nu0.2,
            value: nu0.0,
        });
    }
    if c0.0 <= 0.0 {
        return Err(ParabolicError::AssumptionViolated {
            inequality: "1/2 db/dx(x,t) + c(x,t) >= c0 > 0",
            x: c0.1,
            t: c0.2,
            value: c0.0,
        });
    }
    let alpha = nu0.0;
    Ok(Constants {
        nu0: nu0.0,
        c0: c0.0,
        alpha,
        m,
        c_p: POINCARE,
        alpha3_over_m2: alpha.powi(3) / (m * m),
        samples_x: xs.len(),
        samples_t: ts.len(),
    })
}
