//! Shared fixtures for the criterion benches in `benches/`.

use orbitkit::sampling::{
    random_hermitian, random_normal, random_profile, rng_with_seed, shuffled,
};
use orbitkit::{DenseOperator, SpectralProfile};

const SEED: u64 = 0x5eed;

pub fn hermitian(dim: usize) -> DenseOperator {
    random_hermitian(&mut rng_with_seed(SEED, dim as u64), dim)
}

/// Normal matrix with `dim / 2` distinct eigenvalues, conjugated by a random unitary.
pub fn normal(dim: usize) -> DenseOperator {
    let mut r = rng_with_seed(SEED, 1000 + dim as u64);
    let p = random_profile(&mut r, (dim / 2).max(1), 2, 0, 1e-2);
    random_normal(&mut r, &p, dim.max(p.minimal_dim()))
}

/// A profile and a reordering of it.
pub fn profile_pair(distinct: usize) -> (SpectralProfile, SpectralProfile) {
    let mut r = rng_with_seed(SEED, 2000 + distinct as u64);
    let p = random_profile(&mut r, distinct, 3, 4, 1e-3);
    let q = shuffled(&mut r, &p);
    (p, q)
}
