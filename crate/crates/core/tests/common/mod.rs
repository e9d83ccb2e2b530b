#![allow(dead_code)]

use orbitkit::sampling::{random_unitary, rng_with_seed};
use orbitkit::{Complex64, DenseOperator};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rng_with_seed(seed, 0)
}

/// `u diag(s) v*` with prescribed singular values.
pub fn with_singular_values<R: Rng>(rng: &mut R, s: &[f64]) -> DenseOperator {
    let n = s.len();
    let d = DenseOperator::from_real_diagonal(s);
    let u = random_unitary(rng, n);
    let v = random_unitary(rng, n);
    &(&u * &d) * &v.adjoint()
}

/// Operator norm by power iteration on `x*x`; slow but independent of Jacobi.
pub fn power_norm(x: &DenseOperator) -> f64 {
    let n = x.dim();
    let g = &x.adjoint() * x;
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.37 * i as f64, 0.11 * (i % 3) as f64))
        .collect();
    let mut lambda = 0.0;
    for _ in 0..4000 {
        let w = g.apply(&v);
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        lambda = norm;
        v = w.into_iter().map(|z| z / norm).collect();
    }
    lambda.sqrt()
}

pub fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
