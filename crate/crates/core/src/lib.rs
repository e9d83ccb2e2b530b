//! Normal operators under unitary and partial-isometry conjugation.
//!
//! Operators are dense complex matrices ([`DenseOperator`]); spectra are
//! described by [`SpectralProfile`]s, which can also stand for finite sections
//! of compact operators. On top of a Jacobi-based linear algebra layer the
//! crate provides symmetric norms, conditional expectations onto commutants,
//! the commutator map, orbit decisions and explicit counterexample families.
//!
//! ```
//! use orbitkit::{orbit_verdict, SpectralProfile, KernelDim};
//!
//! let a = SpectralProfile::from_reals(&[1.0], 0).with_kernel(KernelDim::Infinite);
//! let b = SpectralProfile::from_reals(&[1.0], 5);
//! let v = orbit_verdict(&a, &b).unwrap();
//! assert!(v.same_groupoid_orbit && !v.same_unitary_orbit);
//! ```

pub mod commutator;
pub mod counterexamples;
pub mod error;
pub mod expectation;
pub mod linalg;
pub mod norms;
pub mod operator;
pub mod orbit;
pub mod sampling;
pub mod spectral;

pub use num_complex::Complex64;

pub use commutator::{
    closed_range_witnesses, delta, min_witness_ratio, solve_commutator, tangent_split,
    ClosedRangeWitness, CommutatorSolution, DivisorConvention, TangentSplit,
};
pub use counterexamples::{
    escape_sequence, isclosed_escape, nonseparable_demo, shift_sequence, shift_topology_demo,
    shift_topology_demo_with_rank, EscapeReport, NonseparableReport, ResidualEntry, ShiftReport,
};
pub use error::{OrbitError, Result};
pub use expectation::{block_values, commutant_check, conditional_expectation};
pub use linalg::{
    hermitian_eigen, isometry_check, normal_eigen, numeric_rank, operator_norm, polar,
    polar_unitary, singular_values, svd, EigenDecomposition, IsometryReport, PolarFactors, Svd,
};
pub use norms::{
    ideal_norm, ky_fan_majorizes, ky_fan_majorizes_within, maximal_norm, operator_ideal_norm,
    ratio_partials, MajorizationReport, MaximalNorm, NormSpec, RatioReference,
};
pub use operator::DenseOperator;
pub use orbit::{
    construct_intertwiner, epsilon_partition, finite_rank_unitary_sequence, intertwine_operators,
    lagrange_coefficients, lagrange_lipschitz_bound, lagrange_spectral_projector, orbit_verdict,
    orbit_verdict_with_tol, Cell, FiniteRankApproximant, OrbitVerdict, PartialIsometryCert,
    PartitionCells,
};
pub use spectral::{
    clustered_eigenspaces, materialize, profile_of, validate_profile, Eigenpair, Eigenspaces,
    KernelDim, Point, ProjectionFamily, SpectralProfile,
};
