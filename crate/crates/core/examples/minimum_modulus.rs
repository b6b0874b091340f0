//! Minimum modulus, reduced minimum modulus and kernel of an operator
//! between weighted spaces, read from CSV or built in place.
//!
//! ```text
//! cargo run --example minimum_modulus
//! cargo run --example minimum_modulus -- A.csv GV.csv GW.csv
//! ```

use infsup::linalg::DenseMatrix;
use infsup::modulus::{analyze, induced_operator, minimum_modulus, DiscreteOperator};
use infsup::spaces::{read_matrix_csv, GramSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let op = if let [a, gv, gw] = args.as_slice() {
        DiscreteOperator::new(
            GramSpace::new(read_matrix_csv(gv)?)?,
            GramSpace::new(read_matrix_csv(gw)?)?,
            read_matrix_csv(a)?,
        )?
    } else {
        // rank 2 map from R³ (weights 1, 4, 9) to R³ (weights 1, 1, 2)
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![0.0, 1.0, 1.0],
            vec![1.0, 3.0, 4.0],
        ])?;
        let v = GramSpace::new(DenseMatrix::from_diag(&[1.0, 4.0, 9.0]))?;
        let w = GramSpace::new(DenseMatrix::from_diag(&[1.0, 1.0, 2.0]))?;
        DiscreteOperator::new(v, w, a)?
    };

    let r = analyze(&op, None)?;
    println!("singular values (whitened): {:?}", r.singular_values);
    println!("rank {}  cutoff {:.3e}", r.rank, r.cutoff);
    println!("mu(A)     = {:.6e}", r.mu);
    println!("gamma(A)  = {}", r.gamma);
    println!("gamma(A') = {}", r.gamma_adjoint);
    for (k, v) in r.kernel_basis.iter().enumerate() {
        println!("kernel[{k}] = {v:?}");
    }
    let ind = induced_operator(&op, None)?;
    println!("mu of the induced injective operator = {:.6e}", minimum_modulus(&ind)?);
    Ok(())
}
