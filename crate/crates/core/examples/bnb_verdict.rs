//! Well-posedness verdicts for a family of square operators approaching
//! singularity, and the a priori bound on a solved instance.
//!
//! ```text
//! cargo run --example bnb_verdict
//! ```

use infsup::bnb::{check_bnb, solve_variational, witness_residual};
use infsup::linalg::DenseMatrix;
use infsup::modulus::DiscreteOperator;
use infsup::spaces::{DualVector, GramSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let v = GramSpace::new(DenseMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]])?)?;
    let w = GramSpace::euclidean(2);
    println!("{:>8} {:>6} {:>6} {:>6} {:>12} {:>10}", "eps", "(i)", "(ii)", "(iii)", "beta", "borderline");
    for eps in [1.0, 1e-2, 1e-8, 1e-15, 0.0] {
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0 + eps]])?;
        let op = DiscreteOperator::new(v.clone(), w.clone(), a)?;
        let b = check_bnb(&op, None)?;
        println!(
            "{:>8.0e} {:>6} {:>6} {:>6} {:>12.4e} {:>10}",
            eps, b.cond_i, b.cond_ii, b.cond_iii, b.beta, b.borderline
        );
        if let Some(k) = &b.kernel_witness {
            println!("         kernel witness {k:?}, |A k| = {:.1e}", witness_residual(&op, k));
        }
    }

    let a = DenseMatrix::from_rows(&[vec![3.0, 1.0], vec![-1.0, 2.0]])?;
    let op = DiscreteOperator::new(v, w.clone(), a)?;
    let load = DualVector::new(&w, vec![1.0, -2.0])?;
    let s = solve_variational(&op, &load, None)?;
    println!(
        "\nu = {:?}\n|u|_V = {:.6} <= |L|/beta = {:.6}: {}",
        s.u, s.u_norm, s.load_norm / s.beta, s.bound_ok
    );
    Ok(())
}
