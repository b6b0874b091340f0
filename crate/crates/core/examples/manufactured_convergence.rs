//! Convergence of the space-time solver on two problems with known
//! solutions: a manufactured `sin(πx)e^{−t}` and the decaying first
//! eigenmode.
//!
//! ```text
//! cargo run --example manufactured_convergence -- 4
//! ```

use infsup::parabolic::{sweep, ParabolicProblem, SpectralMethod};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let levels: usize = std::env::args().nth(1).map_or(Ok(4), |s| s.parse())?;
    let cases = [
        ("manufactured", "pi^2*sin(pi*x)*exp(-t)", "sin(pi*x)*exp(-t)"),
        ("eigenmode", "0", "sin(pi*x)*exp(-(pi^2+1)*t)"),
    ];
    for (name, f, exact) in cases {
        let p = ParabolicProblem::constant(1.0, 0.0, 1.0, f, "sin(pi*x)", 1.0, 4, 4)?.with_exact(exact)?;
        let s = sweep(&p, levels, SpectralMethod::Auto)?;
        println!("{name}: u = {exact}");
        println!("  {:>4} {:>12} {:>12} {:>10}", "n", "L2(J;H)", "L2(J;V)", "beta_h");
        for l in &s.levels {
            let e = l.errors.expect("exact solution given");
            println!("  {:>4} {:>12.4e} {:>12.4e} {:>10.5}", l.nx, e.l2_h, e.l2_v, l.beta_h);
        }
        println!(
            "  rates: L2(J;H) {:.3}, L2(J;V) {:.3}\n",
            s.rate_l2_h.unwrap_or(f64::NAN),
            s.rate_l2_v.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
