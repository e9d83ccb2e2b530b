mod common;

use orbitkit::sampling::{random_hermitian, random_matrix, random_normal, random_profile};
use orbitkit::{
    hermitian_eigen, linalg, materialize, normal_eigen, numeric_rank, polar, polar_unitary,
    singular_values, svd, DenseOperator,
};
use proptest::prelude::*;

fn near_identity_unitary(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> DenseOperator {
    let t = DenseOperator::identity(n) + random_matrix(rng, n).scale_real(0.2);
    polar_unitary(&t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn singular_values_unitarily_invariant(seed in any::<u64>(), n in 1usize..24) {
        let mut rng = common::rng(seed);
        let x = random_matrix(&mut rng, n);
        let u = near_identity_unitary(&mut rng, n);
        let v = near_identity_unitary(&mut rng, n);
        let y = &(&u * &x) * &v;
        prop_assert!(common::max_diff(&singular_values(&x), &singular_values(&y)) <= 1e-9);
    }

    #[test]
    fn prescribed_singular_values_recovered(
        seed in any::<u64>(),
        s in prop::collection::vec(0.0f64..5.0, 1..20),
    ) {
        let mut rng = common::rng(seed);
        let s = common::sorted_desc(s);
        let x = common::with_singular_values(&mut rng, &s);
        prop_assert!(common::max_diff(&singular_values(&x), &s) <= 1e-9);
    }

    #[test]
    fn svd_reconstructs(seed in any::<u64>(), n in 1usize..20, rank in 0usize..20) {
        let mut rng = common::rng(seed);
        let mut s: Vec<f64> = (0..n).map(|i| if i < rank { 1.0 + i as f64 } else { 0.0 }).collect();
        s = common::sorted_desc(s);
        let x = common::with_singular_values(&mut rng, &s);
        let d = svd(&x);
        let scale = x.frobenius_norm().max(1.0);
        prop_assert!((d.reconstruct() - x).frobenius_norm() <= 1e-10 * scale);
        let id = DenseOperator::identity(n);
        prop_assert!((&d.left.adjoint() * &d.left - id.clone()).max_abs() <= 1e-10);
        prop_assert!((&d.right.adjoint() * &d.right - id).max_abs() <= 1e-10);
    }

    #[test]
    fn polar_unitary_commutes_with_normal(seed in any::<u64>(), distinct in 1usize..6) {
        let mut rng = common::rng(seed);
        let p = random_profile(&mut rng, distinct, 3, 0, 1e-2);
        let t = random_normal(&mut rng, &p, p.minimal_dim());
        let w = polar_unitary(&t).unwrap();
        let c = &w * &t - &t * &w;
        prop_assert!(c.max_abs() <= 1e-9);
    }

    #[test]
    fn polar_factors_multiply_back(seed in any::<u64>(), n in 1usize..16) {
        let mut rng = common::rng(seed);
        let x = random_matrix(&mut rng, n);
        let f = polar(&x);
        prop_assert!((&f.isometric_factor * &f.positive_factor - x.clone()).frobenius_norm()
            <= 1e-10 * x.frobenius_norm());
    }

    #[test]
    fn numeric_rank_counts_multiplicities(seed in any::<u64>(), distinct in 1usize..6, kernel in 0usize..4) {
        let mut rng = common::rng(seed);
        let p = random_profile(&mut rng, distinct, 3, 0, 1e-2).with_kernel(orbitkit::KernelDim::Finite(kernel));
        let (a, _) = materialize(&p, p.minimal_dim()).unwrap();
        let max = p.eigenvalues.iter().map(|e| e.value.norm()).fold(0.0, f64::max);
        // values are at least 1e-2 in modulus; 1e-3 relative cut keeps them all
        let tol = 1e-3 * 1e-2 / max.max(1.0);
        prop_assert_eq!(numeric_rank(&a, tol), p.total_multiplicity());
    }
}

#[test]
fn power_iteration_agrees_with_operator_norm() {
    let mut rng = common::rng(3);
    for n in [1, 2, 5, 9, 16] {
        let x = random_matrix(&mut rng, n);
        let a = linalg::operator_norm(&x);
        let b = common::power_norm(&x);
        assert!((a - b).abs() <= 1e-9 * a, "n={n}: {a} vs {b}");
    }
}

#[test]
fn hermitian_eigen_residuals() {
    let mut rng = common::rng(5);
    for n in [1, 3, 8, 20, 40] {
        let h = random_hermitian(&mut rng, n);
        let e = hermitian_eigen(&h).unwrap();
        assert!(e.residual <= 1e-10 * h.frobenius_norm());
        let trace: f64 = e.values.iter().map(|z| z.re).sum();
        assert!((trace - h.trace().re).abs() <= 1e-10 * h.frobenius_norm());
    }
}

#[test]
fn normal_eigen_recovers_complex_spectrum() {
    let mut rng = common::rng(9);
    for _ in 0..10 {
        let p = random_profile(&mut rng, 6, 2, 2, 0.05);
        let x = random_normal(&mut rng, &p, p.minimal_dim());
        let e = normal_eigen(&x).unwrap();
        for ep in &p.eigenvalues {
            let hits = e
                .values
                .iter()
                .filter(|z| (*z - ep.value).norm() < 1e-9)
                .count();
            assert_eq!(hits, ep.multiplicity);
        }
    }
}

#[test]
fn rejects_non_normal() {
    let x = DenseOperator::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
    assert!(matches!(
        normal_eigen(&x),
        Err(orbitkit::OrbitError::NotNormal { .. })
    ));
    assert!(matches!(
        hermitian_eigen(&x),
        Err(orbitkit::OrbitError::NotHermitian { .. })
    ));
}
