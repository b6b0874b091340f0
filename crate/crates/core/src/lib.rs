pub mod bnb;
pub mod cli;
pub mod kato_examples;
pub mod linalg;
pub mod modulus;
pub mod parabolic;
pub mod quadrature;
pub mod spaces;
