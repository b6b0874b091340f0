//! The Volterra operator `(Au)(t) = ∫₀ᵗ u` on `L²(0,1)` does not have a
//! closed range. Its discretizations do, but their reduced minimum moduli
//! decay like `h`, which the closed-range probe picks up. The second part
//! builds solutions of `A u = f` whose norms blow up as the residual
//! shrinks.
//!
//! ```text
//! cargo run --example kikuchi_closed_range
//! ```

use infsup::kato_examples::{blowup_cells, build_kikuchi, kikuchi_blowup, ElementKind};
use infsup::modulus::{closed_range_probe, ProbeConfig, ProbeLevel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for kind in [ElementKind::P0, ElementKind::P1] {
        let levels = [8, 16, 32, 64, 128]
            .iter()
            .map(|&n| {
                build_kikuchi(n, kind).map(|k| ProbeLevel { parameter: n as f64, operator: k.operator })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let probe = closed_range_probe(&levels, &ProbeConfig::default())?;
        println!("{kind:?}:");
        for row in &probe.levels {
            println!("  n = {:>4}  gamma = {}", row.parameter, row.gamma);
        }
        println!("  slope {:.3}  -> {}", probe.slope.unwrap_or(f64::NAN), probe.diagnosis);
    }

    println!("\n{:>8} {:>6} {:>12} {:>12}", "eps", "cells", "residual", "|u_eps|");
    for eps in [0.5, 0.1, 0.02, 0.004] {
        let b = kikuchi_blowup(blowup_cells(eps), eps)?;
        println!("{:>8} {:>6} {:>12.4e} {:>12.4e}", eps, b.cells, b.residual, b.u_norm);
    }
    Ok(())
}
