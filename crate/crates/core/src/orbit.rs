//! Orbit decisions, ε-partitions, intertwining partial isometries, finite-rank
//! unitary approximants and Lagrange spectral projectors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{OrbitError, Result};
use crate::linalg::{canonical_cmp, normal_eigen, operator_norm};
use crate::norms::{ideal_norm, NormSpec};
use crate::operator::{check_dims, DenseOperator, ONE, ZERO};
use crate::spectral::{
    clustered_eigenspaces, format_complex, materialize, KernelDim, SpectralProfile,
    DEFAULT_CLUSTER_TOL,
};

/// Relative tolerance (against the largest modulus in play) under which two
/// spectral values are treated as the same point.
pub const MATCH_TOL: f64 = 1e-9;

pub mod reason {
    pub const SPECTRUM_MISMATCH: &str = "SPECTRUM_MISMATCH";
    pub const ZERO_MEMBERSHIP_MISMATCH: &str = "ZERO_MEMBERSHIP_MISMATCH";
    pub const ISOLATED_MULTIPLICITY_MISMATCH: &str = "ISOLATED_MULTIPLICITY_MISMATCH";
    pub const MULTIPLICITY_MISMATCH: &str = "MULTIPLICITY_MISMATCH";
    pub const KERNEL_DIM_MISMATCH: &str = "KERNEL_DIM_MISMATCH";
    pub const ESSENTIAL_MISMATCH: &str = "ESSENTIAL_MISMATCH";
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitVerdict {
    pub same_unitary_orbit: bool,
    pub in_unitary_orbit_closure: bool,
    pub same_groupoid_orbit: bool,
    pub in_groupoid_orbit_closure: bool,
    pub reasons: Vec<String>,
}

struct Matcher {
    tol: f64,
}

impl Matcher {
    fn new(a: &SpectralProfile, b: &SpectralProfile, rel_tol: f64) -> Self {
        let scale = a
            .eigenvalues
            .iter()
            .chain(&b.eigenvalues)
            .map(|e| e.value.norm())
            .chain(
                a.essential_points
                    .iter()
                    .chain(&b.essential_points)
                    .map(|z| z.norm()),
            )
            .fold(0.0, f64::max);
        Self {
            tol: rel_tol * scale,
        }
    }

    fn eq(&self, z: Complex64, w: Complex64) -> bool {
        (z - w).norm() <= self.tol
    }

    fn contains(&self, set: &[Complex64], z: Complex64) -> bool {
        set.iter().any(|&w| self.eq(z, w))
    }

    fn same_set(&self, x: &[Complex64], y: &[Complex64]) -> bool {
        x.iter().all(|&z| self.contains(y, z)) && y.iter().all(|&z| self.contains(x, z))
    }

    fn multiplicity(&self, p: &SpectralProfile, z: Complex64) -> usize {
        p.eigenvalues
            .iter()
            .filter(|e| self.eq(e.value, z))
            .map(|e| e.multiplicity)
            .sum()
    }
}

fn spectrum_set(p: &SpectralProfile, with_zero: bool) -> Vec<Complex64> {
    let mut s: Vec<Complex64> = p.eigenvalues.iter().map(|e| e.value).collect();
    s.extend(&p.essential_points);
    if with_zero || !p.kernel_dim.is_zero() {
        s.push(ZERO);
    }
    s
}

fn nonzero_essential(p: &SpectralProfile) -> Vec<Complex64> {
    p.essential_points
        .iter()
        .copied()
        .filter(|z| *z != ZERO)
        .collect()
}

/// Every listed eigenvalue of `x` outside the essential set of `x` must be
/// isolated in `y` as well, with the same multiplicity.
fn isolated_match(m: &Matcher, x: &SpectralProfile, y: &SpectralProfile) -> bool {
    x.eigenvalues.iter().all(|e| {
        m.contains(&x.essential_points, e.value)
            || (!m.contains(&y.essential_points, e.value)
                && m.multiplicity(y, e.value) == e.multiplicity)
    })
}

fn zero_isolated_match(m: &Matcher, x: &SpectralProfile, y: &SpectralProfile) -> bool {
    let zero_in_spec = !x.kernel_dim.is_zero() || m.contains(&x.essential_points, ZERO);
    if !zero_in_spec || m.contains(&x.essential_points, ZERO) {
        return true;
    }
    !m.contains(&y.essential_points, ZERO) && x.kernel_dim == y.kernel_dim
}

pub fn orbit_verdict(a: &SpectralProfile, b: &SpectralProfile) -> Result<OrbitVerdict> {
    orbit_verdict_with_tol(a, b, MATCH_TOL)
}

/// Orbit verdict with an explicit relative matching tolerance.
pub fn orbit_verdict_with_tol(
    a: &SpectralProfile,
    b: &SpectralProfile,
    rel_tol: f64,
) -> Result<OrbitVerdict> {
    for p in [a, b] {
        p.validate()?;
        if !p.is_exact() {
            return Err(OrbitError::InexactProfile);
        }
    }
    let m = Matcher::new(a, b, rel_tol);

    let spec_eq = m.same_set(&spectrum_set(a, false), &spectrum_set(b, false));
    let spec0_eq = m.same_set(&spectrum_set(a, true), &spectrum_set(b, true));
    let ess_eq = m.same_set(&a.essential_points, &b.essential_points);
    let ess_nz_eq = m.same_set(&nonzero_essential(a), &nonzero_essential(b));
    let iso_eq = isolated_match(&m, a, b) && isolated_match(&m, b, a);
    let zero_iso_eq = zero_isolated_match(&m, a, b) && zero_isolated_match(&m, b, a);
    let multiset_eq = a.eigenvalues.len() == b.eigenvalues.len()
        && a.eigenvalues
            .iter()
            .all(|e| m.multiplicity(b, e.value) == e.multiplicity)
        && b.eigenvalues
            .iter()
            .all(|e| m.multiplicity(a, e.value) == e.multiplicity);
    let kernel_eq = a.kernel_dim == b.kernel_dim;

    let mut reasons = Vec::new();
    if !spec0_eq {
        reasons.push(reason::SPECTRUM_MISMATCH.to_string());
    } else if !spec_eq {
        reasons.push(reason::ZERO_MEMBERSHIP_MISMATCH.to_string());
    }
    if !iso_eq {
        reasons.push(reason::ISOLATED_MULTIPLICITY_MISMATCH.to_string());
    } else if !multiset_eq {
        reasons.push(reason::MULTIPLICITY_MISMATCH.to_string());
    }
    if !kernel_eq {
        reasons.push(reason::KERNEL_DIM_MISMATCH.to_string());
    }
    if !ess_eq {
        reasons.push(reason::ESSENTIAL_MISMATCH.to_string());
    }

    Ok(OrbitVerdict {
        same_unitary_orbit: multiset_eq && kernel_eq && ess_eq,
        in_unitary_orbit_closure: spec_eq && iso_eq && zero_iso_eq && ess_eq,
        same_groupoid_orbit: multiset_eq && ess_eq,
        in_groupoid_orbit_closure: spec0_eq && iso_eq && ess_nz_eq,
        reasons,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub center: Complex64,
    /// Indices into the listed eigenvalues, in canonical order.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionCells {
    pub cells: Vec<Cell>,
    pub diameter_bound: f64,
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(OrbitError::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )))
    }
}

/// Greedy clustering over `order` (indices into `values`): a value joins the
/// first cell whose center lies within `eps/2`, otherwise it opens a new cell
/// centered at itself.
fn greedy_cells(values: &[Complex64], order: &[usize], eps: f64) -> Vec<Cell> {
    let mut cells: Vec<Cell> = Vec::new();
    for &i in order {
        let z = values[i];
        match cells
            .iter_mut()
            .find(|c| (c.center - z).norm() <= eps / 2.0)
        {
            Some(c) => c.members.push(i),
            None => cells.push(Cell {
                center: z,
                members: vec![i],
            }),
        }
    }
    cells
}

pub fn epsilon_partition(p: &SpectralProfile, eps: f64) -> Result<PartitionCells> {
    check_eps(eps)?;
    p.validate()?;
    if !p.is_exact() {
        return Err(OrbitError::InexactProfile);
    }
    let values: Vec<Complex64> = p.eigenvalues.iter().map(|e| e.value).collect();
    Ok(PartitionCells {
        cells: greedy_cells(&values, &p.canonical_order(), eps),
        diameter_bound: eps,
    })
}

#[derive(Debug, Clone)]
pub struct PartialIsometryCert {
    pub v: DenseOperator,
    pub initial_proj: DenseOperator,
    pub final_proj: DenseOperator,
    pub epsilon: f64,
    pub certified_bound: f64,
    pub achieved_error: f64,
}

/// Distinct values of `values` up to `tol`, canonically ordered.
fn distinct_values(values: impl IntoIterator<Item = Complex64>, tol: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::new();
    for z in values {
        if !out.iter().any(|w| (w - z).norm() <= tol) {
            out.push(z);
        }
    }
    out.sort_by(canonical_cmp);
    out
}

/// Half the smallest distance between distinct values, or 1 with fewer than two.
fn default_eps(values: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for (i, z) in values.iter().enumerate() {
        for w in &values[i + 1..] {
            gap = gap.min((z - w).norm());
        }
    }
    if gap.is_finite() {
        gap / 2.0
    } else {
        1.0
    }
}

/// Center of a joint cell with the positions of `a`'s and `b`'s values in it.
type JointCell = (Complex64, Vec<usize>, Vec<usize>);

/// Joint ε-partition of two lists of spectral values. Returns, for each
/// cell, its center and the positions in `xs` and in `ys` falling into it.
fn joint_cells(xs: &[Complex64], ys: &[Complex64], eps: f64, tol: f64) -> (f64, Vec<JointCell>) {
    let union = distinct_values(xs.iter().chain(ys).copied(), tol);
    let eps = if eps == 0.0 { default_eps(&union) } else { eps };
    let order: Vec<usize> = (0..union.len()).collect();
    let cells = greedy_cells(&union, &order, eps);
    let cell_of = |z: Complex64| {
        let k = union
            .iter()
            .position(|w| (w - z).norm() <= tol)
            .expect("value belongs to the union");
        cells
            .iter()
            .position(|c| c.members.contains(&k))
            .expect("partition covers the union")
    };
    let mut out: Vec<JointCell> = cells
        .iter()
        .map(|c| (c.center, Vec::new(), Vec::new()))
        .collect();
    for (i, &z) in xs.iter().enumerate() {
        out[cell_of(z)].1.push(i);
    }
    for (j, &z) in ys.iter().enumerate() {
        out[cell_of(z)].2.push(j);
    }
    (eps, out)
}

fn mass_mismatch(center: Complex64, a: usize, b: usize) -> OrbitError {
    OrbitError::CellMassMismatch {
        center: format_complex(center),
        mass_a: a.to_string(),
        mass_b: b.to_string(),
    }
}

/// Support projection of a diagonal operator.
fn diagonal_support(d: &DenseOperator) -> DenseOperator {
    let diag: Vec<f64> = d
        .diagonal()
        .iter()
        .map(|z| if *z == ZERO { 0.0 } else { 1.0 })
        .collect();
    DenseOperator::from_real_diagonal(&diag)
}

/// Builds `v` with `v*v = p_a`, `vv* = p_b` and `‖vav* − b‖ ≤ 2ε` on the
/// diagonal realisations of `a` and `b` in dimension `total_dim`.
///
/// Within each cell of the joint ε-partition the eigenvectors of `a` are sent
/// to those of `b` in coordinate order. `eps = 0` selects half the smallest
/// gap between distinct values, which makes the matching exact.
pub fn construct_intertwiner(
    a: &SpectralProfile,
    b: &SpectralProfile,
    eps: f64,
    total_dim: usize,
) -> Result<PartialIsometryCert> {
    if eps != 0.0 {
        check_eps(eps)?;
    }
    let verdict = orbit_verdict(a, b)?;
    if !verdict.in_groupoid_orbit_closure {
        return Err(OrbitError::NotInClosure(verdict.reasons.join(",")));
    }
    let (a_op, _) = materialize(a, total_dim)?;
    let (b_op, _) = materialize(b, total_dim)?;
    let support = |d: &DenseOperator| -> (Vec<usize>, Vec<Complex64>) {
        d.diagonal()
            .into_iter()
            .enumerate()
            .filter(|(_, z)| *z != ZERO)
            .unzip()
    };
    let (a_idx, a_vals) = support(&a_op);
    let (b_idx, b_vals) = support(&b_op);
    let tol = Matcher::new(a, b, MATCH_TOL).tol;
    let (eps, cells) = joint_cells(&a_vals, &b_vals, eps, tol);

    let mut v = DenseOperator::zeros(total_dim);
    for (center, xs, ys) in &cells {
        if xs.len() != ys.len() {
            return Err(mass_mismatch(*center, xs.len(), ys.len()));
        }
        for (&i, &j) in xs.iter().zip(ys) {
            v[(b_idx[j], a_idx[i])] = ONE;
        }
    }
    let achieved_error = operator_norm(&(a_op.conjugate_by(&v)? - b_op.clone()));
    Ok(PartialIsometryCert {
        v,
        initial_proj: diagonal_support(&a_op),
        final_proj: diagonal_support(&b_op),
        epsilon: eps,
        certified_bound: 2.0 * eps,
        achieved_error,
    })
}

/// Intertwiner between two dense normal operators built from their clustered
/// eigenvectors: within each cell of the joint ε-partition, the `k`-th
/// eigenvector of `a` is sent to the `k`-th eigenvector of `b`.
pub fn intertwine_operators(
    a: &DenseOperator,
    b: &DenseOperator,
    eps: f64,
) -> Result<PartialIsometryCert> {
    check_dims(a.dim(), b.dim())?;
    if eps != 0.0 {
        check_eps(eps)?;
    }
    let (pa, sa) = clustered_eigenspaces(a, DEFAULT_CLUSTER_TOL)?;
    let (pb, sb) = clustered_eigenspaces(b, DEFAULT_CLUSTER_TOL)?;
    let verdict = orbit_verdict(&pa, &pb)?;
    if !verdict.in_groupoid_orbit_closure {
        return Err(OrbitError::NotInClosure(verdict.reasons.join(",")));
    }
    let flatten = |p: &SpectralProfile, blocks: &[Vec<Vec<Complex64>>]| {
        let mut vals = Vec::new();
        let mut vecs = Vec::new();
        for (e, block) in p.eigenvalues.iter().zip(blocks) {
            for v in block {
                vals.push(e.value);
                vecs.push(v.clone());
            }
        }
        (vals, vecs)
    };
    let (a_vals, a_vecs) = flatten(&pa, &sa.blocks);
    let (b_vals, b_vecs) = flatten(&pb, &sb.blocks);
    let tol = Matcher::new(&pa, &pb, MATCH_TOL).tol;
    let (eps, cells) = joint_cells(&a_vals, &b_vals, eps, tol);

    let n = a.dim();
    let mut v = DenseOperator::zeros(n);
    for (center, xs, ys) in &cells {
        if xs.len() != ys.len() {
            return Err(mass_mismatch(*center, xs.len(), ys.len()));
        }
        for (&i, &j) in xs.iter().zip(ys) {
            for r in 0..n {
                for c in 0..n {
                    v[(r, c)] += b_vecs[j][r] * a_vecs[i][c].conj();
                }
            }
        }
    }
    let projector = |vecs: &[Vec<Complex64>]| {
        let mut p = DenseOperator::zeros(n);
        for x in vecs {
            for r in 0..n {
                for c in 0..n {
                    p[(r, c)] += x[r] * x[c].conj();
                }
            }
        }
        p
    };
    let achieved_error = operator_norm(&(a.conjugate_by(&v)? - b.clone()));
    Ok(PartialIsometryCert {
        v,
        initial_proj: projector(&a_vecs),
        final_proj: projector(&b_vecs),
        epsilon: eps,
        certified_bound: 2.0 * eps,
        achieved_error,
    })
}

/// Permutation unitary aligning leading eigenvalue blocks, with the operators
/// it acts on.
#[derive(Debug, Clone)]
pub struct FiniteRankApproximant {
    pub m: usize,
    pub u: DenseOperator,
    pub a: DenseOperator,
    pub b: DenseOperator,
    /// Coordinates of the aligned blocks of `a` and of `b`.
    pub aligned_a: Vec<usize>,
    pub aligned_b: Vec<usize>,
}

impl FiniteRankApproximant {
    pub fn residual(&self) -> DenseOperator {
        let conj = self.a.conjugate_by(&self.u).expect("dimensions agree");
        conj - self.b.clone()
    }

    /// `‖u a u* − b‖` in the given norm.
    pub fn error_in(&self, spec: &NormSpec) -> Result<f64> {
        ideal_norm(&crate::linalg::singular_values(&self.residual()), spec)
    }

    /// `‖a − a p_m‖ + ‖b − b q_m‖` in the given norm.
    pub fn tail_bound(&self, spec: &NormSpec) -> Result<f64> {
        let tail = |x: &DenseOperator, keep: &[usize]| {
            let mut d: Vec<f64> = x
                .diagonal()
                .iter()
                .enumerate()
                .filter(|(i, _)| !keep.contains(i))
                .map(|(_, z)| z.norm())
                .collect();
            d.sort_by(|p, q| q.total_cmp(p));
            ideal_norm(&d, spec)
        };
        Ok(tail(&self.a, &self.aligned_a)? + tail(&self.b, &self.aligned_b)?)
    }
}

/// Unitary `u` (a permutation, so `u − 1` has finite rank) that carries the
/// eigenvectors of the `m` leading distinct eigenvalues of `a` onto those of
/// `b`; the remaining coordinates are matched in index order.
pub fn finite_rank_unitary_sequence(
    a: &SpectralProfile,
    b: &SpectralProfile,
    m: usize,
    total_dim: usize,
) -> Result<FiniteRankApproximant> {
    let verdict = orbit_verdict(a, b)?;
    if !verdict.in_unitary_orbit_closure {
        return Err(OrbitError::NotInClosure(verdict.reasons.join(",")));
    }
    let (a_op, a_fam) = materialize(a, total_dim)?;
    let (b_op, b_fam) = materialize(b, total_dim)?;
    let matcher = Matcher::new(a, b, MATCH_TOL);

    let mut aligned_a = Vec::new();
    let mut aligned_b = Vec::new();
    for &ia in a.canonical_order().iter().take(m) {
        let value = a.eigenvalues[ia].value;
        let Some(ib) = b
            .eigenvalues
            .iter()
            .position(|e| matcher.eq(e.value, value))
        else {
            continue;
        };
        let (ba, bb) = (&a_fam.blocks()[ia], &b_fam.blocks()[ib]);
        let k = ba.len().min(bb.len());
        aligned_a.extend_from_slice(&ba[..k]);
        aligned_b.extend_from_slice(&bb[..k]);
    }

    let n = total_dim;
    let mut target = vec![usize::MAX; n];
    for (&i, &j) in aligned_a.iter().zip(&aligned_b) {
        target[i] = j;
    }
    let in_a: Vec<bool> = (0..n).map(|i| aligned_a.contains(&i)).collect();
    let in_b: Vec<bool> = (0..n).map(|i| aligned_b.contains(&i)).collect();
    // outside both: fixed; aligned in b only -> the free slots aligned in a only
    let mut free = (0..n).filter(|&i| in_a[i] && !in_b[i]);
    for i in 0..n {
        if in_a[i] {
            continue;
        }
        target[i] = if in_b[i] {
            free.next().expect("aligned sets have equal size")
        } else {
            i
        };
    }
    let mut u = DenseOperator::zeros(n);
    for (i, &j) in target.iter().enumerate() {
        u[(j, i)] = ONE;
    }
    Ok(FiniteRankApproximant {
        m,
        u,
        a: a_op,
        b: b_op,
        aligned_a,
        aligned_b,
    })
}

/// Nodes of the Lagrange interpolation: listed eigenvalues, then 0 when the
/// kernel is nontrivial.
fn lagrange_nodes(p: &SpectralProfile) -> Vec<Complex64> {
    let mut nodes: Vec<Complex64> = p.eigenvalues.iter().map(|e| e.value).collect();
    if p.kernel_dim != KernelDim::Finite(0) {
        nodes.push(ZERO);
    }
    nodes
}

fn min_gap(nodes: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for (i, z) in nodes.iter().enumerate() {
        for w in &nodes[i + 1..] {
            gap = gap.min((z - w).norm());
        }
    }
    gap
}

/// Monomial coefficients `α_0, …, α_d` of the polynomial that is 1 at the
/// `j`-th listed eigenvalue (1-based) and 0 at every other node.
pub fn lagrange_coefficients(p: &SpectralProfile, j: usize) -> Result<Vec<Complex64>> {
    p.validate()?;
    if j == 0 || j > p.eigenvalues.len() {
        return Err(OrbitError::BadIndex {
            index: j,
            reason: format!("expected 1..={}", p.eigenvalues.len()),
        });
    }
    let nodes = lagrange_nodes(p);
    let gap = min_gap(&nodes);
    if gap < 1e-6 {
        return Err(OrbitError::SpectrumTooClose { gap });
    }
    let lj = nodes[j - 1];
    let mut coeffs = vec![ONE];
    for (i, &li) in nodes.iter().enumerate() {
        if i == j - 1 {
            continue;
        }
        // multiply by (z − λ_i) / (λ_j − λ_i)
        let d = lj - li;
        let mut next = vec![ZERO; coeffs.len() + 1];
        for (k, &c) in coeffs.iter().enumerate() {
            next[k + 1] += c / d;
            next[k] -= c * li / d;
        }
        coeffs = next;
    }
    Ok(coeffs)
}

/// `Σ_{k≥1} k |α_k| R^{k−1}`: Lipschitz constant of the polynomial on
/// operators of norm at most `r`.
pub fn lagrange_lipschitz_bound(coeffs: &[Complex64], r: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c.norm() * r.powi(k as i32 - 1))
        .sum()
}

/// Evaluates the `j`-th Lagrange polynomial (1-based) of the profile's
/// spectrum on `x` by Horner's rule.
pub fn lagrange_spectral_projector(
    p: &SpectralProfile,
    j: usize,
    x: &DenseOperator,
) -> Result<DenseOperator> {
    let coeffs = lagrange_coefficients(p, j)?;
    let nodes = lagrange_nodes(p);
    let scale = x.frobenius_norm();
    let defect = x.self_commutator().frobenius_norm();
    if defect > 1e-9 * scale * scale {
        return Err(OrbitError::NotNormal { defect });
    }
    let radius = min_gap(&nodes) / 4.0;
    if nodes.len() > 1 {
        for z in normal_eigen(x)?.values {
            if !nodes.iter().any(|w| (w - z).norm() <= radius) {
                return Err(OrbitError::SpectrumOutOfRange(format!(
                    "eigenvalue {} is farther than {radius:.3e} from every node",
                    format_complex(z)
                )));
            }
        }
    }
    Ok(horner(&coeffs, x))
}

pub(crate) fn horner(coeffs: &[Complex64], x: &DenseOperator) -> DenseOperator {
    let n = x.dim();
    let mut acc = DenseOperator::zeros(n);
    for &c in coeffs.iter().rev() {
        acc = acc.mul_unchecked(x);
        for i in 0..n {
            acc[(i, i)] += c;
        }
    }
    acc
}
