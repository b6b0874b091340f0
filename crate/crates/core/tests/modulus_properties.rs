mod common;

use common::*;
use infsup::bnb::{check_bnb, check_finite_dim_remark, witness_residual};
use infsup::linalg::{dot, DenseMatrix};
use infsup::modulus::{
    analyze, induced_operator, minimum_modulus, quotient_distance, reduced_minimum_modulus,
    Gamma,
};
use infsup::spaces::{DualVector, GramSpace};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64, n: usize, m: usize, rank: usize) -> (infsup::modulus::DiscreteOperator, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = random_gram(&mut rng, n, 0.3, 3.0);
    let w = random_gram(&mut rng, m, 0.3, 3.0);
    let sig: Vec<f64> = (0..rank).map(|_| rng.gen_range(0.2..4.0)).collect();
    (operator_with_singular_values(&mut rng, v, w, &sig), sig)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn moduli_match_construction(seed in any::<u64>(), n in 1usize..12, m in 1usize..12, r in 0usize..12) {
        let rank = r.min(n.min(m));
        let (op, sig) = instance(seed, n, m, rank);
        let rep = analyze(&op, None).unwrap();
        prop_assert_eq!(rep.rank, rank);
        let smin = sig.iter().copied().fold(f64::INFINITY, f64::min);
        if rank == 0 {
            prop_assert!(rep.gamma.is_infinite() && rep.gamma_adjoint.is_infinite());
        } else {
            prop_assert!(rel_diff(rep.gamma.finite().unwrap(), smin) < 1e-10);
            prop_assert!(rep.gamma.agrees_with(rep.gamma_adjoint, 1e-10));
        }
        let mu = minimum_modulus(&op).unwrap();
        if rank == n {
            prop_assert!(rel_diff(mu, smin) < 1e-10);
        } else {
            prop_assert!(mu < 1e-12);
        }
    }

    #[test]
    fn kernel_is_annihilated_and_quotient_bounds_gamma(seed in any::<u64>(), n in 2usize..10, m in 1usize..10) {
        let rank = (n - 1).min(m);
        let (op, _) = instance(seed, n, m, rank);
        let (gamma, kernel) = reduced_minimum_modulus(&op, None).unwrap();
        prop_assert_eq!(kernel.len(), n - rank);
        for k in &kernel {
            prop_assert!(witness_residual(&op, k) < 1e-10);
            prop_assert!((op.domain().norm(k).unwrap() - 1.0).abs() < 1e-10);
        }
        // ‖Av‖ ≥ γ dist(v, N(A)) for every v
        let g = gamma.finite().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        for _ in 0..10 {
            let v = gaussian_vec(&mut rng, n);
            let av = op.test_space().dual_norm_of(&op.apply(&v)).unwrap();
            let d = quotient_distance(op.domain(), &kernel, &v).unwrap();
            prop_assert!(av >= g * d * (1.0 - 1e-10));
        }
    }

    #[test]
    fn induced_operator_is_injective_with_same_gamma(seed in any::<u64>(), n in 2usize..10, m in 2usize..10) {
        let rank = 1 + (seed as usize) % n.min(m);
        let (op, _) = instance(seed, n, m, rank);
        let ind = induced_operator(&op, None).unwrap();
        prop_assert_eq!(ind.domain().dim(), rank);
        let g = reduced_minimum_modulus(&op, None).unwrap().0.finite().unwrap();
        prop_assert!(rel_diff(minimum_modulus(&ind).unwrap(), g) < 1e-10);
    }

    #[test]
    fn bnb_conditions_agree_with_remark(seed in any::<u64>(), n in 1usize..12, full in any::<bool>()) {
        let rank = if full || n == 1 { n } else { n - 1 };
        let (op, _) = instance(seed, n, n, rank);
        let v = check_bnb(&op, None).unwrap();
        prop_assert!(!v.disagreement);
        prop_assert_eq!(v.cond_i, rank == n);
        prop_assert_eq!(v.cond_ii, v.cond_i);
        prop_assert_eq!(v.cond_iii, v.cond_i);
        prop_assert!(check_finite_dim_remark(&op, None).unwrap());
        if let Some(k) = &v.kernel_witness {
            prop_assert!(witness_residual(&op, k) < 1e-10);
        }
    }

    #[test]
    fn dual_norm_is_the_supremum(seed in any::<u64>(), n in 1usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = random_gram(&mut rng, n, 0.2, 5.0);
        let f = DualVector::new(&space, gaussian_vec(&mut rng, n)).unwrap();
        let r = space.riesz_inverse(f.coeffs()).unwrap();
        let attained = f.pair(&r).unwrap() / space.norm(&r).unwrap();
        prop_assert!(rel_diff(attained, f.dual_norm()) < 1e-12);
        for _ in 0..20 {
            let v = gaussian_vec(&mut rng, n);
            prop_assert!(f.pair(&v).unwrap().abs() <= f.dual_norm() * space.norm(&v).unwrap() * (1.0 + 1e-12));
        }
    }
}

#[test]
fn constructed_beta_point_three() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let v = random_gram(&mut rng, 5, 0.5, 2.0);
    let w = random_gram(&mut rng, 5, 0.5, 2.0);
    let op = operator_with_singular_values(&mut rng, v, w, &[2.0, 1.5, 1.0, 0.7, 0.3]);
    let verdict = check_bnb(&op, None).unwrap();
    assert!(verdict.cond_i && verdict.cond_ii && verdict.cond_iii);
    assert!((verdict.beta - 0.3).abs() <= 1e-9);
    assert!((verdict.beta_adjoint - 0.3).abs() <= 1e-9);
}

#[test]
fn zero_operator_between_weighted_spaces() {
    let v = GramSpace::new(DenseMatrix::from_diag(&[1.0, 4.0])).unwrap();
    let w = GramSpace::new(DenseMatrix::from_diag(&[2.0, 3.0, 5.0])).unwrap();
    let op = infsup::modulus::DiscreteOperator::new(v, w, DenseMatrix::zeros(3, 2)).unwrap();
    let rep = analyze(&op, None).unwrap();
    assert_eq!(rep.gamma, Gamma::Infinite);
    assert_eq!(rep.mu, 0.0);
    assert_eq!(rep.kernel_basis.len(), 2);
    let g = op.domain().gram();
    assert!(dot(&rep.kernel_basis[0], &g.matvec(&rep.kernel_basis[1])).abs() < 1e-14);
}
