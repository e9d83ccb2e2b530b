//! Conditional expectation `E(x) = Σ p_k x p_k` onto the commutant of a
//! diagonal operator that is constant on the blocks of a projection family.

use num_complex::Complex64;

use crate::error::{OrbitError, Result};
use crate::linalg::operator_norm;
use crate::operator::{check_dims, DenseOperator, ZERO};
use crate::spectral::ProjectionFamily;

/// Relative threshold shared by both commutant tests.
pub const COMMUTANT_TOL: f64 = 1e-9;

/// Block-diagonal compression: keeps `x(i,j)` when `i` and `j` share a block.
pub fn conditional_expectation(x: &DenseOperator, fam: &ProjectionFamily) -> Result<DenseOperator> {
    check_dims(x.dim(), fam.dim())?;
    let labels = fam.labels();
    let n = x.dim();
    let mut out = x.clone();
    for i in 0..n {
        for j in 0..n {
            if labels[i] != labels[j] {
                out[(i, j)] = ZERO;
            }
        }
    }
    Ok(out)
}

/// Block values of a diagonal operator that is constant on the blocks of `fam`,
/// with distinct values on distinct blocks.
pub fn block_values(a: &DenseOperator, fam: &ProjectionFamily) -> Result<Vec<Complex64>> {
    check_dims(a.dim(), fam.dim())?;
    let n = a.dim();
    for i in 0..n {
        for j in 0..n {
            if i != j && a[(i, j)] != ZERO {
                return Err(OrbitError::InconsistentFamily(format!(
                    "operator has off-diagonal entry at ({i}, {j})"
                )));
            }
        }
    }
    let mut values = Vec::with_capacity(fam.blocks().len());
    for (b, block) in fam.blocks().iter().enumerate() {
        let v = a[(block[0], block[0])];
        if let Some(&i) = block.iter().find(|&&i| a[(i, i)] != v) {
            return Err(OrbitError::InconsistentFamily(format!(
                "block {b} is not constant (index {i})"
            )));
        }
        values.push(v);
    }
    for (i, v) in values.iter().enumerate() {
        if values[..i].contains(v) {
            return Err(OrbitError::InconsistentFamily(format!(
                "blocks share the value {v}; the family is finer than the spectral partition"
            )));
        }
    }
    Ok(values)
}

/// Decides whether `x` lies in the commutant `{a}'`.
///
/// Runs both `‖xa − ax‖ ≤ tol·‖a‖‖x‖` and `‖E(x) − x‖ ≤ tol·‖x‖`; they must agree.
pub fn commutant_check(
    x: &DenseOperator,
    a: &DenseOperator,
    fam: &ProjectionFamily,
) -> Result<bool> {
    check_dims(x.dim(), a.dim())?;
    block_values(a, fam)?;
    let norm_x = operator_norm(x);
    let norm_a = operator_norm(a);
    let commutator = x.mul_unchecked(a) - a.mul_unchecked(x);
    let by_commutator = operator_norm(&commutator) <= COMMUTANT_TOL * norm_a * norm_x;
    let ex = conditional_expectation(x, fam)?;
    let by_expectation = operator_norm(&(&ex - x)) <= COMMUTANT_TOL * norm_x;
    if by_commutator != by_expectation {
        return Err(OrbitError::CommutantTestsDisagree);
    }
    Ok(by_commutator)
}
