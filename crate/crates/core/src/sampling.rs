//! Seeded random operators and profiles for property suites and benchmarks.
//!
//! All generators take an explicit RNG; [`rng`] builds one from the
//! `ORBITKIT_SEED` environment variable so that runs are reproducible.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::polar_unitary;
use crate::operator::DenseOperator;
use crate::spectral::{materialize, Eigenpair, ProjectionFamily, SpectralProfile};

pub const SEED_ENV: &str = "ORBITKIT_SEED";
pub const DEFAULT_SEED: u64 = 0x6f72_6269_746b_6974;

/// Seed from `ORBITKIT_SEED`, or [`DEFAULT_SEED`] when unset or unparsable.
pub fn seed_from_env() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

/// Independent stream `stream` of the environment seed.
pub fn rng(stream: u64) -> ChaCha8Rng {
    rng_with_seed(seed_from_env(), stream)
}

pub fn rng_with_seed(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn gaussian_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix<R: Rng>(rng: &mut R, dim: usize) -> DenseOperator {
    let data = (0..dim * dim).map(|_| gaussian_complex(rng)).collect();
    DenseOperator::from_row_major(dim, data).expect("finite entries")
}

pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize) -> DenseOperator {
    let g = random_matrix(rng, dim);
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Unitary factor of a Gaussian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> DenseOperator {
    loop {
        if let Ok(u) = polar_unitary(&random_matrix(rng, dim)) {
            return u;
        }
    }
}

/// Random partition of `0..dim` into between 1 and `dim` blocks.
pub fn random_family<R: Rng>(rng: &mut R, dim: usize) -> ProjectionFamily {
    let k = rng.random_range(1..=dim);
    let mut idx: Vec<usize> = (0..dim).collect();
    idx.shuffle(rng);
    let mut blocks = vec![Vec::new(); k];
    // first k indices seed the blocks so none is empty
    for (pos, &i) in idx.iter().enumerate() {
        let b = if pos < k { pos } else { rng.random_range(0..k) };
        blocks[b].push(i);
    }
    for b in &mut blocks {
        b.sort_unstable();
    }
    ProjectionFamily::new(dim, blocks).expect("blocks partition the index set")
}

/// `count` distinct nonzero complex values in the disc of radius `radius`,
/// pairwise and from 0 at least `min_gap` apart.
pub fn separated_values<R: Rng>(
    rng: &mut R,
    count: usize,
    radius: f64,
    min_gap: f64,
    real: bool,
) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::with_capacity(count);
    while out.len() < count {
        let z = if real {
            Complex64::new(rng.random_range(-radius..radius), 0.0)
        } else {
            Complex64::from_polar(
                radius * rng.random::<f64>().sqrt(),
                rng.random_range(0.0..std::f64::consts::TAU),
            )
        };
        if z.norm() >= min_gap && out.iter().all(|w| (w - z).norm() >= min_gap) {
            out.push(z);
        }
    }
    out
}

/// Exact finite profile with `distinct` eigenvalues of multiplicity at most
/// `max_mult` and a kernel of dimension at most `max_kernel`.
pub fn random_profile<R: Rng>(
    rng: &mut R,
    distinct: usize,
    max_mult: usize,
    max_kernel: usize,
    min_gap: f64,
) -> SpectralProfile {
    let real = rng.random_bool(0.3);
    let values = separated_values(rng, distinct, 2.0, min_gap, real);
    let pairs = values
        .into_iter()
        .map(|v| Eigenpair::new(v, rng.random_range(1..=max_mult)))
        .collect();
    SpectralProfile::finite(pairs, rng.random_range(0..=max_kernel))
}

/// The same profile with its eigenvalues listed in a random order.
pub fn shuffled<R: Rng>(rng: &mut R, p: &SpectralProfile) -> SpectralProfile {
    let mut q = p.clone();
    q.eigenvalues.shuffle(rng);
    q
}

/// `u d u*` for the diagonal realisation `d` of `p` and a random unitary `u`.
pub fn random_normal<R: Rng>(rng: &mut R, p: &SpectralProfile, dim: usize) -> DenseOperator {
    let (d, _) = materialize(p, dim).expect("dimension holds the profile");
    d.conjugate_by(&random_unitary(rng, dim))
        .expect("dimensions agree")
}

/// Partial isometry with initial projection `p`: a random unitary times `p`.
pub fn random_partial_isometry<R: Rng>(rng: &mut R, p: &DenseOperator) -> DenseOperator {
    random_unitary(rng, p.dim()).mul_unchecked(p)
}

/// Vector of `len` non-negative values sorted non-increasing.
pub fn random_singular_values<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    let mut s: Vec<f64> = (0..len).map(|_| rng.random::<f64>() * 3.0).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}
