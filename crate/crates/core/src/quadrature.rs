//! Gauss–Legendre rules on the reference interval `[0, 1]`.

/// Nodes and weights of the `n`-point rule, `n ∈ {2, 3, 5}`; exact for
/// polynomials of degree `2n − 1`.
pub fn gauss_legendre(n: usize) -> (&'static [f64], &'static [f64]) {
    match n {
        2 => (&GAUSS2_NODES, &GAUSS2_WEIGHTS),
        3 => (&GAUSS3_NODES, &GAUSS3_WEIGHTS),
        5 => (&GAUSS5_NODES, &GAUSS5_WEIGHTS),
        _ => panic!("no {n}-point rule"),
    }
}

const G2: f64 = 0.288_675_134_594_812_9; // 1/(2√3)
const GAUSS2_NODES: [f64; 2] = [0.5 - G2, 0.5 + G2];
const GAUSS2_WEIGHTS: [f64; 2] = [0.5, 0.5];

const G3: f64 = 0.387_298_334_620_741_7; // √(3/5)/2
pub(crate) const GAUSS3_NODES: [f64; 3] = [0.5 - G3, 0.5, 0.5 + G3];
pub(crate) const GAUSS3_WEIGHTS: [f64; 3] = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];

const G5A: f64 = 0.269_234_655_052_841_6;
const G5B: f64 = 0.453_089_922_969_332;
const GAUSS5_NODES: [f64; 5] = [0.5 - G5B, 0.5 - G5A, 0.5, 0.5 + G5A, 0.5 + G5B];
const GAUSS5_WEIGHTS: [f64; 5] = [
    0.118_463_442_528_094_5,
    0.239_314_335_249_683_2,
    0.284_444_444_444_444_4,
    0.239_314_335_249_683_2,
    0.118_463_442_528_094_5,
];
