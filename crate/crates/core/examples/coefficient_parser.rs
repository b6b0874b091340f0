//! Parsing and evaluating coefficient expressions, with the error
//! reporting used for problem files.
//!
//! ```text
//! cargo run --example coefficient_parser -- "1 + 0.5*sin(pi*x)*t"
//! ```

use infsup::parabolic::parse_coefficient;

fn main() {
    let inputs: Vec<String> = std::env::args().skip(1).collect();
    let inputs = if inputs.is_empty() {
        ["2 + sin(pi*x)*t", "-x^2", "exp(-(pi^2+1)*t)", "1/(1-x)", "1 + * 2", "sqrt(x"]
            .map(String::from)
            .to_vec()
    } else {
        inputs
    };
    let grid: Vec<f64> = (0..=4).map(|i| i as f64 / 4.0).collect();
    for src in inputs {
        match parse_coefficient(&src) {
            Ok(c) => {
                let time = if c.depends_on_t() { "depends on t" } else { "constant in t" };
                println!("{src}\n  ok, {time}, value at (0.5, 1) = {:?}", c.try_eval(0.5, 1.0).ok());
                if let Err(e) = c.check_grid(&grid, &[0.0, 1.0]) {
                    println!("  {e}");
                }
            }
            Err(e) => {
                println!("{src}\n{}^\n  {e}", " ".repeat(e.offset));
            }
        }
    }
}
