use rayon::prelude::*;
use serde::Serialize;

use super::{resolve_rel_tol, DiscreteOperator, Gamma, ModulusError, WhitenedSvd};

/// One member of a refinement family, tagged with the parameter the decay
/// rate is fitted against (cell count, `1/h`, ...).
#[derive(Debug, Clone)]
pub struct ProbeLevel {
    pub parameter: f64,
    pub operator: DiscreteOperator,
}

/// Thresholds for the trend heuristics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProbeConfig {
    /// `None` uses the per-level default `max(rows, cols)·ε`.
    pub rel_tol: Option<f64>,
    /// Fraction of trailing levels used for the slope fit and the
    /// min/max comparison.
    pub tail_fraction: f64,
    /// A fitted log-log slope at or below this counts as decay.
    pub decay_slope: f64,
    /// `min γ ≥ bounded_ratio · max γ` over the tail counts as bounded.
    pub bounded_ratio: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { rel_tol: None, tail_fraction: 0.5, decay_slope: -0.5, bounded_ratio: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Diagnosis {
    #[serde(rename = "non-closed-range limit")]
    NonClosedRangeLimit,
    #[serde(rename = "uniformly bounded below")]
    UniformlyBoundedBelow,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl std::fmt::Display for Diagnosis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Diagnosis::NonClosedRangeLimit => "non-closed-range limit",
            Diagnosis::UniformlyBoundedBelow => "uniformly bounded below",
            Diagnosis::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeRow {
    pub parameter: f64,
    pub dim: usize,
    pub gamma: Gamma,
    pub cutoff: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub levels: Vec<ProbeRow>,
    /// Least-squares slope of `ln γ` against `ln parameter` over the tail.
    pub slope: Option<f64>,
    pub diagnosis: Diagnosis,
}

/// Computes `γ` on every level (in parallel) and reads off the trend.
///
/// The labels are extrapolations: each discrete operator has closed range.
/// A clear decay is checked first, so that a family whose `γ` halves
/// between the last two levels is reported as decaying even though it
/// also sits exactly on the bounded ratio.
pub fn closed_range_probe(
    family: &[ProbeLevel],
    config: &ProbeConfig,
) -> Result<ProbeReport, ModulusError> {
    if family.is_empty() {
        return Err(ModulusError::EmptyFamily);
    }
    let levels: Vec<ProbeRow> = family
        .par_iter()
        .map(|level| {
            let rel_tol = resolve_rel_tol(&level.operator, config.rel_tol);
            let ws = WhitenedSvd::new(&level.operator, rel_tol)?;
            Ok(ProbeRow {
                parameter: level.parameter,
                dim: level.operator.domain().dim(),
                gamma: ws.gamma(),
                cutoff: ws.cutoff,
            })
        })
        .collect::<Result<_, ModulusError>>()?;

    let tail_len = ((levels.len() as f64 * config.tail_fraction).ceil() as usize)
        .clamp(1, levels.len());
    let tail_len = if levels.len() >= 2 { tail_len.max(2) } else { tail_len };
    let tail = &levels[levels.len() - tail_len..];
    let finite: Vec<(f64, f64)> = tail
        .iter()
        .filter_map(|r| r.gamma.finite().map(|g| (r.parameter, g)))
        .collect();
    let slope = fit_loglog_slope(&finite);

    let diagnosis = if finite.is_empty() {
        Diagnosis::Inconclusive
    } else if slope.is_some_and(|s| s <= config.decay_slope) {
        Diagnosis::NonClosedRangeLimit
    } else {
        let max = finite.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let min = finite.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        if finite.len() == tail.len() && min >= config.bounded_ratio * max {
            Diagnosis::UniformlyBoundedBelow
        } else {
            Diagnosis::Inconclusive
        }
    };
    Ok(ProbeReport { levels, slope, diagnosis })
}

/// Least-squares slope of `ln y` against `ln x`; `None` for fewer than two
/// distinct abscissae.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}
