//! The commutator map `δ_a(x) = xa − ax`.
//!
//! For a finite spectrum the range of `δ_a` is exactly the kernel of the
//! conditional expectation and [`solve_commutator`] inverts it there. For
//! accumulating spectra the range is not closed; at finite truncation this
//! shows up as the ratios reported by [`closed_range_witnesses`] tending to 0.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{OrbitError, Result};
use crate::expectation::conditional_expectation;
use crate::linalg::{self, operator_norm};
use crate::operator::{check_dims, DenseOperator, ONE, ZERO};
use crate::spectral::{materialize, ProjectionFamily, SpectralProfile};

/// Threshold, relative to `2‖a_0‖_F`, below which [`tangent_split`] counts a
/// singular value of the commutator map as zero.
pub const RANGE_RANK_TOL: f64 = 1e-6;

/// `xa − ax`.
pub fn delta(a: &DenseOperator, x: &DenseOperator) -> Result<DenseOperator> {
    check_dims(a.dim(), x.dim())?;
    Ok(x.mul_unchecked(a) - a.mul_unchecked(x))
}

/// Which divisor reproduced the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivisorConvention {
    /// `x_ij = y_ij / (μ_col − μ_row)`.
    ColumnMinusRow,
    /// `x_ij = y_ij / (μ_row − μ_col)`.
    RowMinusColumn,
}

#[derive(Debug, Clone)]
pub struct CommutatorSolution {
    pub x: DenseOperator,
    pub convention: DivisorConvention,
    /// `‖[x, a] − y‖_F`.
    pub residual: f64,
}

/// Spectral value carried by each block of `fam` for a materialized profile:
/// eigenvalues in listed order, then 0 for a trailing kernel block.
fn family_values(profile: &SpectralProfile, fam: &ProjectionFamily) -> Result<Vec<Complex64>> {
    let blocks = fam.blocks();
    let k = profile.eigenvalues.len();
    if blocks.len() != k && blocks.len() != k + 1 {
        return Err(OrbitError::InconsistentFamily(format!(
            "{} blocks for {} eigenvalues",
            blocks.len(),
            k
        )));
    }
    let mut values = Vec::with_capacity(blocks.len());
    for (e, block) in profile.eigenvalues.iter().zip(blocks) {
        if block.len() != e.multiplicity {
            return Err(OrbitError::InconsistentFamily(format!(
                "block of size {} for multiplicity {}",
                block.len(),
                e.multiplicity
            )));
        }
        values.push(e.value);
    }
    if blocks.len() == k + 1 {
        values.push(ZERO);
    }
    for (i, v) in values.iter().enumerate() {
        if values[..i].contains(v) {
            return Err(OrbitError::RepeatedBlockValue);
        }
    }
    Ok(values)
}

fn diagonal_from_blocks(fam: &ProjectionFamily, values: &[Complex64]) -> DenseOperator {
    let mut d = vec![ZERO; fam.dim()];
    for (block, &v) in fam.blocks().iter().zip(values) {
        for &i in block {
            d[i] = v;
        }
    }
    DenseOperator::from_diagonal(&d)
}

/// Solves `[x, a] = y` for `y` in the kernel of the expectation.
///
/// `a = Σ μ_b p_b` is the diagonal operator carried by `fam` (block `b` of
/// `fam` holds the b-th listed eigenvalue; a trailing extra block is the
/// kernel). The off-diagonal blocks of `x` are `y_ij` divided by a difference
/// of block values; the sign of that difference is settled by checking the
/// residual and reported in the result.
pub fn solve_commutator(
    a_profile: &SpectralProfile,
    fam: &ProjectionFamily,
    y: &DenseOperator,
) -> Result<CommutatorSolution> {
    check_dims(fam.dim(), y.dim())?;
    let values = family_values(a_profile, fam)?;
    let y_norm = y.frobenius_norm();
    let ey = conditional_expectation(y, fam)?.frobenius_norm();
    if ey > 1e-10 * y_norm.max(f64::MIN_POSITIVE) {
        return Err(OrbitError::ExpectationNonzero { norm: ey });
    }
    let a = diagonal_from_blocks(fam, &values);
    let labels = fam.labels();
    let tol = if y_norm > 0.0 {
        1e-9 * y_norm
    } else {
        linalg::ABS_ZERO_TOL
    };

    let mut best_residual = f64::INFINITY;
    for convention in [
        DivisorConvention::ColumnMinusRow,
        DivisorConvention::RowMinusColumn,
    ] {
        let n = y.dim();
        let mut x = DenseOperator::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let (bi, bj) = (labels[i], labels[j]);
                if bi == bj {
                    continue;
                }
                let divisor = match convention {
                    DivisorConvention::ColumnMinusRow => values[bj] - values[bi],
                    DivisorConvention::RowMinusColumn => values[bi] - values[bj],
                };
                x[(i, j)] = y[(i, j)] / divisor;
            }
        }
        let residual = (delta(&a, &x)? - y.clone()).frobenius_norm();
        if residual <= tol {
            return Ok(CommutatorSolution {
                x,
                convention,
                residual,
            });
        }
        best_residual = best_residual.min(residual);
    }
    Err(OrbitError::ResidualCheckFailed {
        residual: best_residual,
    })
}

/// Rank-two witness `z = ξ_j⊗ξ̄_{j+1} + ξ_{j+1}⊗ξ̄_j` for a consecutive pair
/// of eigenvalues in canonical order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedRangeWitness {
    /// Positions `(j, j+1)` in the canonical eigenvalue order (0-based).
    pub index_pair: (usize, usize),
    pub gap: f64,
    /// `‖z‖`, a lower bound for the norm of z in every symmetric norm.
    pub witness_norm_lower: f64,
    /// `‖δ_a(z)‖`.
    pub commutator_norm: f64,
    pub ratio: f64,
}

pub fn closed_range_witnesses(a_profile: &SpectralProfile) -> Result<Vec<ClosedRangeWitness>> {
    if a_profile.eigenvalues.len() < 2 {
        return Err(OrbitError::TooFewEigenvalues);
    }
    let dim = a_profile.minimal_dim();
    let (a, fam) = materialize(a_profile, dim)?;
    let order = a_profile.canonical_order();
    let first_index: Vec<usize> = order.iter().map(|&b| fam.blocks()[b][0]).collect();

    let mut out = Vec::with_capacity(order.len() - 1);
    for j in 0..order.len() - 1 {
        let (p, q) = (first_index[j], first_index[j + 1]);
        let mut z = DenseOperator::zeros(dim);
        z[(p, q)] = ONE;
        z[(q, p)] = ONE;
        let lj = a_profile.eigenvalues[order[j]].value;
        let lk = a_profile.eigenvalues[order[j + 1]].value;
        let commutator_norm = operator_norm(&delta(&a, &z)?);
        let witness_norm_lower = operator_norm(&z);
        out.push(ClosedRangeWitness {
            index_pair: (j, j + 1),
            gap: (lj - lk).norm(),
            witness_norm_lower,
            commutator_norm,
            ratio: commutator_norm / witness_norm_lower,
        });
    }
    Ok(out)
}

/// Smallest witness ratio: the finite-section "closed-range gap".
pub fn min_witness_ratio(witnesses: &[ClosedRangeWitness]) -> f64 {
    witnesses
        .iter()
        .map(|w| w.ratio)
        .fold(f64::INFINITY, f64::min)
}

/// Real dimensions of the tangent splitting at a partial isometry `v0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TangentSplit {
    pub dim_total: usize,
    pub dim_isotropy: usize,
    pub dim_complement: usize,
    pub range_dim: usize,
}

/// Splits the skew-hermitian directions on `Ran(v0 v0*)` into the commutant
/// of `a_0 = v0 a v0*` and its complement, and measures the rank of
/// `w ↦ [w, a_0]` numerically.
pub fn tangent_split(a_profile: &SpectralProfile, v0: &DenseOperator) -> Result<TangentSplit> {
    let n = v0.dim();
    let (a, fam) = materialize(a_profile, n)?;
    let support: Vec<usize> = fam
        .blocks()
        .iter()
        .take(a_profile.eigenvalues.len())
        .flatten()
        .copied()
        .collect();
    let mut pd = vec![0.0; n];
    for &i in &support {
        pd[i] = 1.0;
    }
    let p_a = DenseOperator::from_real_diagonal(&pd);

    let initial = v0.adjoint().mul_unchecked(v0);
    let defect = operator_norm(&(&initial - &p_a));
    if defect > 1e-9 {
        return Err(if linalg::projection_defect(&initial) <= 1e-9 {
            OrbitError::InitialSpaceMismatch { defect }
        } else {
            OrbitError::NotPartialIsometry { defect }
        });
    }

    let a0 = a.conjugate_by(v0)?;
    let basis: Vec<Vec<Complex64>> = support.iter().map(|&i| v0.column(i)).collect();
    let r = basis.len();
    // compression of a0 to Ran p0
    let mut c = DenseOperator::zeros(r.max(1));
    for (j, bj) in basis.iter().enumerate() {
        let abj = a0.apply(bj);
        for (i, bi) in basis.iter().enumerate() {
            c[(i, j)] = bi.iter().zip(&abj).map(|(u, w)| u.conj() * w).sum();
        }
    }

    let dim_total = r * r;
    let dim_isotropy: usize = a_profile
        .eigenvalues
        .iter()
        .map(|e| e.multiplicity.pow(2))
        .sum();
    let range_dim = if r == 0 {
        0
    } else {
        commutator_map_rank(&c, r)
    };
    Ok(TangentSplit {
        dim_total,
        dim_isotropy,
        dim_complement: dim_total - dim_isotropy,
        range_dim,
    })
}

/// Rank of the real-linear map `w ↦ wc − cw` on skew-hermitian `r×r` matrices,
/// through the Gram matrix of its images in a real basis.
fn commutator_map_rank(c: &DenseOperator, r: usize) -> usize {
    let i_unit = Complex64::new(0.0, 1.0);
    let mut basis = Vec::with_capacity(r * r);
    for j in 0..r {
        let mut w = DenseOperator::zeros(r);
        w[(j, j)] = i_unit;
        basis.push(w);
    }
    for j in 0..r {
        for k in (j + 1)..r {
            let mut w = DenseOperator::zeros(r);
            w[(j, k)] = ONE;
            w[(k, j)] = -ONE;
            basis.push(w);
            let mut w = DenseOperator::zeros(r);
            w[(j, k)] = i_unit;
            w[(k, j)] = i_unit;
            basis.push(w);
        }
    }
    let images: Vec<Vec<f64>> = basis
        .iter()
        .map(|w| {
            let img = w.mul_unchecked(c) - c.mul_unchecked(w);
            img.as_slice().iter().flat_map(|z| [z.re, z.im]).collect()
        })
        .collect();
    let m = images.len();
    let mut gram = DenseOperator::zeros(m);
    for i in 0..m {
        for j in i..m {
            let v: f64 = images[i].iter().zip(&images[j]).map(|(a, b)| a * b).sum();
            gram[(i, j)] = Complex64::new(v, 0.0);
            gram[(j, i)] = Complex64::new(v, 0.0);
        }
    }
    // eigenvalues of the Gram matrix are the squared singular values of the
    // map, whose norm is at most 2‖c‖
    let eig = linalg::hermitian_eigen(&gram).expect("Gram matrix is hermitian");
    let scale = 2.0 * c.frobenius_norm();
    let cut = (RANGE_RANK_TOL * scale).powi(2);
    eig.values
        .iter()
        .filter(|z| scale > 0.0 && z.re > cut)
        .count()
}
