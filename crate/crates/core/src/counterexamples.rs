//! Finite sections of three constructions: an escape sequence leaving the
//! unitary orbit of a compact diagonal operator, a pair in one unitary orbit
//! that finite-rank unitaries cannot bring together in a ratio norm, and a
//! sequence converging in norm but not in the quotient topology of the orbit.
//!
//! Every report carries both the measured quantity and the analytic bound.

use serde::{Deserialize, Serialize};

use crate::error::{OrbitError, Result};
use crate::linalg::{operator_norm, singular_values};
use crate::norms::{ideal_norm, ratio_partials, NormSpec, RatioReference};
use crate::operator::{DenseOperator, ONE, ZERO};
use crate::orbit::{intertwine_operators, orbit_verdict};
use crate::spectral::{profile_of, DEFAULT_CLUSTER_TOL};

fn check_strictly_decreasing(x: &[f64]) -> Result<()> {
    for (i, &v) in x.iter().enumerate() {
        if !(v > 0.0 && v.is_finite()) || (i > 0 && v >= x[i - 1]) {
            return Err(OrbitError::NotDecreasing(i));
        }
    }
    Ok(())
}

fn kernel_dim_of_diagonal(d: &DenseOperator) -> usize {
    d.diagonal().iter().filter(|z| **z == ZERO).count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeReport {
    pub n: usize,
    pub distance: f64,
    pub bound: f64,
    pub limit_outside_orbit: bool,
    pub kernel_dim_limit: usize,
    pub kernel_dim_orbit: usize,
}

/// Operators of the escape construction on `N + 1` coordinates `q_1..q_{N+1}`:
/// `a = diag(x_1, …, x_N, 0)`, the rotated `a_n` and the shifted limit `a'`.
pub struct EscapeOperators {
    pub a: DenseOperator,
    pub a_n: DenseOperator,
    pub limit: DenseOperator,
}

/// `a_n = x_{n+1} q_1 + Σ_{i≤n} x_i q_{i+1} + Σ_{i≥n+2} x_i q_i` is `a`
/// conjugated by the cyclic permutation of `q_1, …, q_{n+1}`. The limit
/// `a' = Σ x_i q_{i+1}` is cut at `i = N − 1`: the last shifted value would
/// need the coordinate `q_{N+2}`, which lies outside the section.
pub fn escape_operators(eigs: &[f64], n: usize) -> Result<EscapeOperators> {
    check_strictly_decreasing(eigs)?;
    let big_n = eigs.len();
    if n >= big_n {
        return Err(OrbitError::BadIndex {
            index: n,
            reason: format!("n must be below the number of eigenvalues ({big_n})"),
        });
    }
    let dim = big_n + 1;
    let mut a = vec![0.0; dim];
    a[..big_n].copy_from_slice(eigs);

    let mut a_n = a.clone();
    a_n[0] = eigs[n];
    a_n[1..=n].copy_from_slice(&eigs[..n]);

    let mut limit = vec![0.0; dim];
    limit[1..big_n].copy_from_slice(&eigs[..big_n - 1]);

    Ok(EscapeOperators {
        a: DenseOperator::from_real_diagonal(&a),
        a_n: DenseOperator::from_real_diagonal(&a_n),
        limit: DenseOperator::from_real_diagonal(&limit),
    })
}

pub fn isclosed_escape(eigs: &[f64], spec: &NormSpec, n: usize) -> Result<EscapeReport> {
    spec.validate()?;
    let ops = escape_operators(eigs, n)?;
    let distance = ideal_norm(&singular_values(&(&ops.a_n - &ops.limit)), spec)?;
    let bound = 2.0 * eigs[n..].iter().sum::<f64>();
    let kernel_dim_orbit = kernel_dim_of_diagonal(&ops.a);
    let kernel_dim_limit = kernel_dim_of_diagonal(&ops.limit);
    Ok(EscapeReport {
        n,
        distance,
        bound,
        limit_outside_orbit: kernel_dim_limit > kernel_dim_orbit,
        kernel_dim_limit,
        kernel_dim_orbit,
    })
}

/// Escape reports for every `n` in `0..N`.
pub fn escape_sequence(eigs: &[f64], spec: &NormSpec) -> Result<Vec<EscapeReport>> {
    (0..eigs.len())
        .map(|n| isclosed_escape(eigs, spec, n))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub m: usize,
    pub ratio_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonseparableReport {
    pub n: usize,
    pub ratio_partials_a: Vec<f64>,
    pub ratio_partials_b: Vec<f64>,
    pub ratio_partials_diff: Vec<f64>,
    /// Ratio norm of `b − u_m a u_m*` for `m = 0, …, m_max`.
    pub residuals: Vec<ResidualEntry>,
    pub same_unitary_orbit: bool,
}

/// Operators of the nonseparable pair on `2N` coordinates: `a` carries the
/// reference on the even (1-based) coordinates, `b` on the odd ones.
pub fn nonseparable_operators(reference: &[f64], n: usize) -> (DenseOperator, DenseOperator) {
    let mut a = vec![0.0; 2 * n];
    let mut b = vec![0.0; 2 * n];
    for k in 0..n {
        a[2 * k + 1] = reference[k];
        b[2 * k] = reference[k];
    }
    (
        DenseOperator::from_real_diagonal(&a),
        DenseOperator::from_real_diagonal(&b),
    )
}

/// Swaps the coordinates of the first `m` pairs and fixes the rest.
pub fn pair_swap(n: usize, m: usize) -> DenseOperator {
    let mut u = DenseOperator::identity(2 * n);
    for k in 0..m.min(n) {
        let (p, q) = (2 * k, 2 * k + 1);
        u[(p, p)] = ZERO;
        u[(q, q)] = ZERO;
        u[(p, q)] = ONE;
        u[(q, p)] = ONE;
    }
    u
}

pub fn nonseparable_demo(
    reference: &RatioReference,
    n: usize,
    m_max: usize,
) -> Result<NonseparableReport> {
    if !reference.bi_normalizing {
        return Err(OrbitError::NotBiNormalizing);
    }
    if reference.values.len() < 2 * n {
        return Err(OrbitError::ReferenceTooShort {
            needed: 2 * n,
            available: reference.values.len(),
        });
    }
    let r = &reference.values;
    let spec = NormSpec::ratio(reference);
    let (a, b) = nonseparable_operators(r, n);

    let partials = |x: &DenseOperator| ratio_partials(&singular_values(x), r);
    let ratio_partials_a = partials(&a);
    let ratio_partials_b = partials(&b);
    let ratio_partials_diff = partials(&(&b - &a));

    let residuals = (0..=m_max.min(n))
        .map(|m| {
            let moved = a.conjugate_by(&pair_swap(n, m))?;
            let ratio_norm = ideal_norm(&singular_values(&(&b - &moved)), &spec)?;
            Ok(ResidualEntry { m, ratio_norm })
        })
        .collect::<Result<Vec<_>>>()?;

    let verdict = orbit_verdict(
        &profile_of(&a, DEFAULT_CLUSTER_TOL)?,
        &profile_of(&b, DEFAULT_CLUSTER_TOL)?,
    )?;
    Ok(NonseparableReport {
        n,
        ratio_partials_a,
        ratio_partials_b,
        ratio_partials_diff,
        residuals,
        same_unitary_orbit: verdict.same_unitary_orbit,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    pub n: usize,
    /// `‖b_n − a‖`.
    pub distance: f64,
    /// `max(λ_n, λ_N, max_{n≤k<N} (λ_k − λ_{k+1}))`.
    pub analytic_distance: f64,
    /// `2 λ_n`.
    pub bound: f64,
    /// `‖u*u − p_a‖`.
    pub isometry_defect: f64,
    /// `‖ww* − (p_a + p_z − p_n)‖`, where `p_z` is the coordinate receiving
    /// the image of the last block.
    pub final_defect: f64,
    /// `‖ww* − (p_a − p_n)‖` without the overflow coordinate.
    pub final_defect_raw: f64,
    /// `‖w − p_a‖`.
    pub witness_distance: f64,
    pub same_groupoid_orbit: bool,
}

/// Operators of the shift construction for blocks `Q_k` of rank `rank`:
/// coordinates `(k−1)·rank .. k·rank` hold `Q_k`, the first of them is `ξ_k`,
/// and one extra coordinate `z` at the end receives `ξ_N` under `u`.
pub struct ShiftOperators {
    pub a: DenseOperator,
    pub u: DenseOperator,
    pub u_n: DenseOperator,
    pub b_n: DenseOperator,
    pub p_a: DenseOperator,
    pub xi: Vec<usize>,
    pub overflow: usize,
}

pub fn shift_operators(eigs: &[f64], n: usize, rank: usize) -> Result<ShiftOperators> {
    check_strictly_decreasing(eigs)?;
    let big_n = eigs.len();
    if n < 2 || n >= big_n {
        return Err(OrbitError::BadIndex {
            index: n,
            reason: format!("n must satisfy 2 <= n < {big_n}"),
        });
    }
    if rank == 0 {
        return Err(OrbitError::InvalidParameter(
            "block rank must be positive".into(),
        ));
    }
    let overflow = big_n * rank;
    let dim = overflow + 1;
    let xi: Vec<usize> = (0..=big_n).map(|k| k * rank).collect();

    let mut diag = vec![0.0; dim];
    let mut pa = vec![0.0; dim];
    for (k, &l) in eigs.iter().enumerate() {
        for i in k * rank..(k + 1) * rank {
            diag[i] = l;
            pa[i] = 1.0;
        }
    }
    let a = DenseOperator::from_real_diagonal(&diag);
    let p_a = DenseOperator::from_real_diagonal(&pa);

    // u = Σ ξ_{k+1} ξ_k* + Σ (Q_k − p_k)
    let mut u = DenseOperator::zeros(dim);
    for k in 0..big_n {
        u[(xi[k + 1], xi[k])] = ONE;
        for i in k * rank + 1..(k + 1) * rank {
            u[(i, i)] = ONE;
        }
    }
    // u_n: ξ_1 → ξ_2 → … → ξ_n → ξ_1, identity elsewhere
    let mut u_n = DenseOperator::identity(dim);
    for k in 0..n {
        let (from, to) = (xi[k], xi[(k + 1) % n]);
        u_n[(from, from)] = ZERO;
        u_n[(to, from)] = ONE;
    }
    let b_n = a.conjugate_by(&u)?.conjugate_by(&u_n.adjoint())?;
    Ok(ShiftOperators {
        a,
        u,
        u_n,
        b_n,
        p_a,
        xi,
        overflow,
    })
}

pub fn shift_topology_demo(eigs: &[f64], n: usize) -> Result<ShiftReport> {
    shift_topology_demo_with_rank(eigs, n, 2)
}

pub fn shift_topology_demo_with_rank(eigs: &[f64], n: usize, rank: usize) -> Result<ShiftReport> {
    let ops = shift_operators(eigs, n, rank)?;
    let big_n = eigs.len();
    let distance = operator_norm(&(&ops.b_n - &ops.a));
    let gaps = eigs[n - 1..]
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(0.0, f64::max);
    let analytic_distance = eigs[n - 1].max(eigs[big_n - 1]).max(gaps);

    let isometry_defect = operator_norm(&(ops.u.adjoint().mul_unchecked(&ops.u) - ops.p_a.clone()));

    let w = intertwine_operators(&ops.a, &ops.b_n, 0.0)?.v;
    let ww = w.mul_unchecked(&w.adjoint());
    let mut p_n = DenseOperator::zeros(ops.a.dim());
    p_n[(ops.xi[n - 1], ops.xi[n - 1])] = ONE;
    let mut p_z = DenseOperator::zeros(ops.a.dim());
    p_z[(ops.overflow, ops.overflow)] = ONE;
    let untruncated = &ops.p_a - &p_n;
    let model = &untruncated + &p_z;
    let final_defect = operator_norm(&(&ww - &model));
    let final_defect_raw = operator_norm(&(&ww - &untruncated));
    let witness_distance = operator_norm(&(&w - &ops.p_a));

    let verdict = orbit_verdict(
        &profile_of(&ops.a, DEFAULT_CLUSTER_TOL)?,
        &profile_of(&ops.b_n, DEFAULT_CLUSTER_TOL)?,
    )?;
    Ok(ShiftReport {
        n,
        distance,
        analytic_distance,
        bound: 2.0 * eigs[n - 1],
        isometry_defect,
        final_defect,
        final_defect_raw,
        witness_distance,
        same_groupoid_orbit: verdict.same_groupoid_orbit,
    })
}

/// Shift reports for every `n` in `2..N`.
pub fn shift_sequence(eigs: &[f64], rank: usize) -> Result<Vec<ShiftReport>> {
    (2..eigs.len())
        .map(|n| shift_topology_demo_with_rank(eigs, n, rank))
        .collect()
}
