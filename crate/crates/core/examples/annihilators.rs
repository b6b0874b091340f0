//! Distance to an annihilator equals the norm of the restriction, and the
//! four kernel/range annihilator identities, on a random operator.
//!
//! ```text
//! cargo run --example annihilators
//! ```

use infsup::linalg::DenseMatrix;
use infsup::modulus::{annihilator_distance, annihilator_identities, range_dual_sup, DiscreteOperator};
use infsup::spaces::{DualVector, GramSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut rand_matrix = |r: usize, c: usize| {
        DenseMatrix::from_row_major(r, c, (0..r * c).map(|_| rng.gen_range(-1.0..1.0)).collect())
    };
    let x = rand_matrix(6, 6)?;
    let space = GramSpace::new(x.tr_matmul(&x).add(&DenseMatrix::identity(6)))?;
    let f = DualVector::new(&space, vec![1.0, -1.0, 0.5, 2.0, 0.0, 1.0])?;
    let basis = vec![vec![1.0, 0.0, 0.0, 1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0, 0.0, 0.0, -1.0]];
    let d = annihilator_distance(&space, &f, &basis)?;
    println!("dist(f, M^perp) = {:.15}", d.dist);
    println!("|f restricted|  = {:.15}", d.restricted_norm);

    // rank 2 operator R^5 -> (R^4)'
    let op = DiscreteOperator::euclidean(rand_matrix(4, 2)?.matmul(&rand_matrix(2, 5)?));
    let r = annihilator_identities(&op, None)?;
    println!("\nannihilator residuals: {r:#?}");
    let s = range_dual_sup(&op, &[1.0, 2.0, 3.0, 4.0], None)?;
    println!("quotient norm {:.15}  sup over range {:.15}", s.quotient_norm, s.sup);
    Ok(())
}
