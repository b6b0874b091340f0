//! Inf-sup, continuity and trace constants of the space-time heat problem
//! `u′ − uₓₓ + u = 0`, `u₀ = sin(πx)`, under mesh refinement.
//!
//! ```text
//! cargo run --example parabolic_wellposedness -- 8 16 32 64
//! ```

use std::time::Instant;

use infsup::parabolic::{run_pipeline, ParabolicProblem, SpectralMethod};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sizes: Vec<usize> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let sizes = if sizes.is_empty() { vec![8, 16, 32] } else { sizes };
    let base = ParabolicProblem::constant(1.0, 0.0, 1.0, "0", "sin(pi*x)", 1.0, 2, 2)?;

    println!("{:>4} {:>10} {:>10} {:>10} {:>10} {:>8} {:>9} {:>8}", "n", "beta_h", "mu_h", "C_tr_h", "C_max", "apriori", "method", "secs");
    let mut betas = Vec::new();
    for n in sizes {
        let start = Instant::now();
        let (r, _, _) = run_pipeline(&base.with_mesh(n, n), SpectralMethod::Auto)?;
        println!(
            "{:>4} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>8} {:>9?} {:>8.2}",
            n, r.beta_h, r.mu_h, r.c_tr_h, r.c_max, r.apriori_ok, r.spectral_method,
            start.elapsed().as_secs_f64()
        );
        betas.push(r.beta_h);
        if betas.len() == 1 {
            println!("     alpha = {}, M = {:.12}, alpha^3/M^2 = {:.6}", r.alpha, r.m, r.alpha3_over_m2);
        }
    }
    let lo = betas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = betas.iter().copied().fold(0.0, f64::max);
    println!("beta_h min/max = {:.4}", lo / hi);
    Ok(())
}
