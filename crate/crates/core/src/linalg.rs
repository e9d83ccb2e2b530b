//! Dense complex linear algebra built on cyclic Jacobi rotations.
//!
//! Everything here is O(n³) per sweep and intended for desk-scale operators
//! (n ≤ 256). Tolerances are relative to the norm of the input; a zero input
//! falls back to the absolute tolerance [`ABS_ZERO_TOL`].

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{OrbitError, Result};
use crate::operator::{DenseOperator, ONE, ZERO};

/// Absolute tolerance used when the reference norm is zero.
pub const ABS_ZERO_TOL: f64 = 1e-12;
/// Off-diagonal Frobenius mass at which Jacobi stops, relative to ‖h‖_F.
pub const JACOBI_OFF_TOL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Relative grouping radius for Re-eigenvalues in [`normal_eigen`].
pub const NORMAL_GROUP_TOL: f64 = 1e-8;

const HERMITIAN_TOL: f64 = 1e-10;
const NORMAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    /// Unitary matrix whose columns are eigenvectors, in the order of `values`.
    pub vectors: DenseOperator,
    /// Frobenius norm of `A V - V diag(values)`.
    pub residual: f64,
}

impl EigenDecomposition {
    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }
}

#[derive(Debug, Clone)]
pub struct Svd {
    /// Non-increasing, non-negative.
    pub values: Vec<f64>,
    pub left: DenseOperator,
    pub right: DenseOperator,
}

impl Svd {
    pub fn reconstruct(&self) -> DenseOperator {
        let n = self.values.len();
        let mut ls = self.left.clone();
        for i in 0..n {
            for j in 0..n {
                ls[(i, j)] *= self.values[j];
            }
        }
        ls.mul_unchecked(&self.right.adjoint())
    }
}

#[derive(Debug, Clone)]
pub struct PolarFactors {
    pub isometric_factor: DenseOperator,
    pub positive_factor: DenseOperator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsometryReport {
    pub is_partial_isometry: bool,
    /// ‖v*v − p‖ in operator norm.
    pub initial_defect: f64,
    /// ‖vv* − (vv*)²‖ in operator norm.
    pub final_projection_defect: f64,
}

fn rel_tol(scale: f64, tol: f64) -> f64 {
    if scale > 0.0 {
        tol * scale
    } else {
        ABS_ZERO_TOL
    }
}

/// Eigen-decomposition of a hermitian matrix; eigenvalues non-increasing.
pub fn hermitian_eigen(h: &DenseOperator) -> Result<EigenDecomposition> {
    let scale = h.frobenius_norm();
    let defect = (h - &h.adjoint()).frobenius_norm();
    if defect > rel_tol(scale, HERMITIAN_TOL) {
        return Err(OrbitError::NotHermitian { defect });
    }
    jacobi_hermitian(&h.real_part())
}

/// Cyclic Jacobi on an (exactly) hermitian matrix.
pub(crate) fn jacobi_hermitian(h: &DenseOperator) -> Result<EigenDecomposition> {
    let n = h.dim();
    let mut a = h.clone();
    let mut v = DenseOperator::identity(n);
    let target = JACOBI_OFF_TOL * h.frobenius_norm();

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(OrbitError::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values: Vec<Complex64> = order
        .iter()
        .map(|&i| Complex64::new(a[(i, i)].re, 0.0))
        .collect();
    let vectors = permute_columns(&v, &order);
    let residual = eigen_residual(h, &vectors, &values);
    Ok(EigenDecomposition {
        values,
        vectors,
        residual,
    })
}

fn off_diagonal_norm(a: &DenseOperator) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
///
/// The phase of `a[p][q]` is removed by `diag(1, e^{-iφ})`, then the real
/// symmetric 2×2 problem is solved with the usual stable tangent formula.
fn rotate(a: &mut DenseOperator, v: &mut DenseOperator, p: usize, q: usize) {
    let beta = a[(p, q)];
    let mag = beta.norm();
    if mag == 0.0 {
        return;
    }
    let alpha = a[(p, p)].re;
    let gamma = a[(q, q)].re;
    let theta = (gamma - alpha) / (2.0 * mag);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let phase = (beta / mag).conj();

    // G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = phase * (-s);
    let g_qq = phase * c;

    let n = a.dim();
    // A <- A G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    // A <- G^* A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    // V <- V G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

fn permute_columns(m: &DenseOperator, order: &[usize]) -> DenseOperator {
    let n = m.dim();
    let mut out = DenseOperator::zeros(n);
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            out[(i, new_j)] = m[(i, old_j)];
        }
    }
    out
}

fn eigen_residual(a: &DenseOperator, vectors: &DenseOperator, values: &[Complex64]) -> f64 {
    let av = a.mul_unchecked(vectors);
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += (av[(i, j)] - vectors[(i, j)] * values[j]).norm_sqr();
        }
    }
    s.sqrt()
}

/// Canonical ordering of complex eigenvalues: by decreasing modulus, then by
/// argument in `[0, 2π)`, then by real part.
pub fn canonical_cmp(a: &Complex64, b: &Complex64) -> Ordering {
    b.norm()
        .total_cmp(&a.norm())
        .then_with(|| positive_arg(a).total_cmp(&positive_arg(b)))
        .then_with(|| a.re.total_cmp(&b.re))
}

pub(crate) fn positive_arg(z: &Complex64) -> f64 {
    let t = z.arg();
    if t < 0.0 {
        t + std::f64::consts::TAU
    } else {
        t
    }
}

/// Simultaneous diagonalisation of a normal matrix through its commuting
/// real and imaginary parts. Eigenvalues come back in canonical order.
pub fn normal_eigen(x: &DenseOperator) -> Result<EigenDecomposition> {
    let n = x.dim();
    let scale = x.frobenius_norm();
    let defect = x.self_commutator().frobenius_norm();
    if defect > rel_tol(scale * scale, NORMAL_TOL) {
        return Err(OrbitError::NotNormal { defect });
    }

    let re = jacobi_hermitian(&x.real_part())?;
    let im_part = x.imag_part();
    let group_tol = rel_tol(scale, NORMAL_GROUP_TOL);

    let mut vectors = re.vectors.clone();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (re.values[end - 1].re - re.values[end].re) <= group_tol {
            end += 1;
        }
        if end - start > 1 {
            refine_block(&mut vectors, &im_part, start, end)?;
        }
        start = end;
    }

    let mut pairs: Vec<(Complex64, Vec<Complex64>)> = (0..n)
        .map(|j| {
            let col = vectors.column(j);
            let xc = x.apply(&col);
            let lambda: Complex64 = col.iter().zip(&xc).map(|(u, w)| u.conj() * w).sum();
            (lambda, col)
        })
        .collect();
    pairs.sort_by(|a, b| canonical_cmp(&a.0, &b.0));
    let values: Vec<Complex64> = pairs.iter().map(|p| p.0).collect();
    let cols: Vec<Vec<Complex64>> = pairs.into_iter().map(|p| p.1).collect();
    let vectors = DenseOperator::from_columns(n, &cols);
    let residual = eigen_residual(x, &vectors, &values);
    Ok(EigenDecomposition {
        values,
        vectors,
        residual,
    })
}

/// Diagonalises `im` restricted to columns `start..end` of `vectors`.
fn refine_block(
    vectors: &mut DenseOperator,
    im: &DenseOperator,
    start: usize,
    end: usize,
) -> Result<()> {
    let n = vectors.dim();
    let g = end - start;
    let mut block = DenseOperator::zeros(g);
    let im_cols: Vec<Vec<Complex64>> = (start..end).map(|j| im.apply(&vectors.column(j))).collect();
    for a in 0..g {
        for b in 0..g {
            let va = start + a;
            block[(a, b)] = (0..n)
                .map(|i| vectors[(i, va)].conj() * im_cols[b][i])
                .sum();
        }
    }
    let block = block.real_part();
    let eig = jacobi_hermitian(&block)?;
    let old: Vec<Vec<Complex64>> = (start..end).map(|j| vectors.column(j)).collect();
    for b in 0..g {
        for i in 0..n {
            let mut acc = ZERO;
            for (a, col) in old.iter().enumerate() {
                acc += col[i] * eig.vectors[(a, b)];
            }
            vectors[(i, start + b)] = acc;
        }
    }
    Ok(())
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn inner(u: &[Complex64], w: &[Complex64]) -> Complex64 {
    u.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

/// Orthogonalises `w` against `basis` (two passes of modified Gram–Schmidt).
fn orthogonalize(w: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = inner(b, w);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
        }
    }
}

/// Singular value decomposition `x = L diag(s) R^*` via the eigenvectors of
/// `x^* x`. Singular values are measured as `‖x r_i‖`.
pub fn svd(x: &DenseOperator) -> Svd {
    let n = x.dim();
    let gram = x.adjoint().mul_unchecked(x);
    let eig = jacobi_hermitian(&gram.real_part())
        .expect("Jacobi on a Gram matrix converges within the sweep limit");

    let mut triples: Vec<(f64, Vec<Complex64>, Vec<Complex64>)> = (0..n)
        .map(|j| {
            let r = eig.vectors.column(j);
            let w = x.apply(&r);
            (vec_norm(&w), w, r)
        })
        .collect();
    triples.sort_by(|a, b| b.0.total_cmp(&a.0));

    let s_max = triples.first().map(|t| t.0).unwrap_or(0.0);
    let zero_cut = 1e-13 * s_max;
    let mut left: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut pending = Vec::new();
    for (k, (s, w, _)) in triples.iter().enumerate() {
        if *s > zero_cut && *s > 0.0 {
            let mut u: Vec<Complex64> = w.iter().map(|z| z / *s).collect();
            orthogonalize(&mut u, &left);
            let nu = vec_norm(&u);
            for z in u.iter_mut() {
                *z /= nu;
            }
            left.push(u);
        } else {
            pending.push(k);
            left.push(Vec::new());
        }
    }
    // complete the zero-singular-value columns to an orthonormal basis
    for k in pending {
        let known: Vec<Vec<Complex64>> = left.iter().filter(|c| !c.is_empty()).cloned().collect();
        let mut best: Option<Vec<Complex64>> = None;
        let mut best_norm = 0.0;
        for e in 0..n {
            let mut cand = vec![ZERO; n];
            cand[e] = ONE;
            orthogonalize(&mut cand, &known);
            let nc = vec_norm(&cand);
            if nc > best_norm {
                best_norm = nc;
                best = Some(cand);
            }
            if nc > 0.7 {
                break;
            }
        }
        let mut u = best.expect("a completion vector exists while the basis is incomplete");
        for z in u.iter_mut() {
            *z /= best_norm;
        }
        left[k] = u;
    }

    let values: Vec<f64> = triples.iter().map(|t| t.0).collect();
    let rights: Vec<Vec<Complex64>> = triples.into_iter().map(|t| t.2).collect();
    Svd {
        values,
        left: DenseOperator::from_columns(n, &left),
        right: DenseOperator::from_columns(n, &rights),
    }
}

/// Singular values only, non-increasing.
pub fn singular_values(x: &DenseOperator) -> Vec<f64> {
    let gram = x.adjoint().mul_unchecked(x);
    let eig = jacobi_hermitian(&gram.real_part())
        .expect("Jacobi on a Gram matrix converges within the sweep limit");
    let mut s: Vec<f64> = (0..x.dim())
        .map(|j| vec_norm(&x.apply(&eig.vectors.column(j))))
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn operator_norm(x: &DenseOperator) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    singular_values(x).first().copied().unwrap_or(0.0)
}

/// Polar factors `t = w |t|`; `w` is unitary whenever `t` is invertible.
pub fn polar(t: &DenseOperator) -> PolarFactors {
    let d = svd(t);
    let n = t.dim();
    let w = d.left.mul_unchecked(&d.right.adjoint());
    let mut vs = d.right.clone();
    for i in 0..n {
        for j in 0..n {
            vs[(i, j)] *= d.values[j];
        }
    }
    let positive = vs.mul_unchecked(&d.right.adjoint()).real_part();
    PolarFactors {
        isometric_factor: w,
        positive_factor: positive,
    }
}

/// Unitary part `t |t|^{-1}` of an invertible operator.
pub fn polar_unitary(t: &DenseOperator) -> Result<DenseOperator> {
    let d = svd(t);
    let s_max = d.values.first().copied().unwrap_or(0.0);
    let s_min = d.values.last().copied().unwrap_or(0.0);
    if s_max == 0.0 || s_min < 1e-10 * s_max {
        return Err(OrbitError::SingularInput { smallest: s_min });
    }
    Ok(d.left.mul_unchecked(&d.right.adjoint()))
}

/// Number of singular values above `tol · s_1`.
pub fn numeric_rank(x: &DenseOperator, tol: f64) -> usize {
    let s = singular_values(x);
    let s1 = s.first().copied().unwrap_or(0.0);
    if s1 == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > tol * s1).count()
}

/// Checks `v^* v = p` for an orthogonal projection `p`.
pub fn isometry_check(v: &DenseOperator, p: &DenseOperator) -> Result<IsometryReport> {
    crate::operator::check_dims(v.dim(), p.dim())?;
    let proj_defect = projection_defect(p);
    if proj_defect > 1e-10 {
        return Err(OrbitError::NotAProjection {
            defect: proj_defect,
        });
    }
    let vv = v.adjoint().mul_unchecked(v);
    let initial_defect = operator_norm(&(&vv - p));
    let fin = v.mul_unchecked(&v.adjoint());
    let final_projection_defect = operator_norm(&(&fin - &fin.mul_unchecked(&fin)));
    Ok(IsometryReport {
        is_partial_isometry: initial_defect <= 1e-9,
        initial_defect,
        final_projection_defect,
    })
}

/// `max(‖p − p*‖, ‖p² − p‖)` in operator norm.
pub fn projection_defect(p: &DenseOperator) -> f64 {
    let herm = operator_norm(&(p - &p.adjoint()));
    let idem = operator_norm(&(&p.mul_unchecked(p) - p));
    herm.max(idem)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_by_two_symmetric() {
        let h = DenseOperator::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let e = hermitian_eigen(&h).unwrap();
        assert!((e.values[0].re - 3.0).abs() < 1e-14);
        assert!((e.values[1].re - 1.0).abs() < 1e-14);
        assert!(e.residual < 1e-13);
    }

    #[test]
    fn one_by_one() {
        let h = DenseOperator::from_real_rows(&[&[5.0]]).unwrap();
        let e = hermitian_eigen(&h).unwrap();
        assert_eq!(e.values[0], c(5.0, 0.0));
        assert_eq!(e.vectors, DenseOperator::identity(1));
    }

    #[test]
    fn complex_hermitian_phase() {
        // [[1, i], [-i, 1]] has eigenvalues 2 and 0
        let h = DenseOperator::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let e = hermitian_eigen(&h).unwrap();
        assert!((e.values[0].re - 2.0).abs() < 1e-14);
        assert!(e.values[1].re.abs() < 1e-14);
        assert!(e.residual < 1e-13);
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = DenseOperator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(
            hermitian_eigen(&h),
            Err(OrbitError::NotHermitian { .. })
        ));
    }

    #[test]
    fn normal_eigen_of_diag_i() {
        let x = DenseOperator::from_diagonal(&[c(0.0, 1.0), c(0.0, -1.0)]);
        let e = normal_eigen(&x).unwrap();
        // canonical order: arg(i) = π/2 before arg(-i) = 3π/2
        assert!((e.values[0] - c(0.0, 1.0)).norm() < 1e-14);
        assert!((e.values[1] - c(0.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn normal_eigen_rotated() {
        let (cs, sn) = (0.6_f64, 0.8_f64);
        let u = DenseOperator::from_real_rows(&[&[cs, -sn], &[sn, cs]]).unwrap();
        let d = DenseOperator::from_diagonal(&[c(1.0, 2.0), c(3.0, 0.0)]);
        let x = d.conjugate_by(&u).unwrap();
        let e = normal_eigen(&x).unwrap();
        let mut got = e.values.clone();
        got.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((got[0] - c(1.0, 2.0)).norm() < 1e-9);
        assert!((got[1] - c(3.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn normal_eigen_rejects_shift() {
        let x = DenseOperator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(
            normal_eigen(&x),
            Err(OrbitError::NotNormal { .. })
        ));
    }

    #[test]
    fn svd_of_nilpotent() {
        let x = DenseOperator::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        let d = svd(&x);
        assert_eq!(d.values, vec![2.0, 0.0]);
        assert!((d.reconstruct() - x).max_abs() < 1e-14);
        let lu = d.left.adjoint().mul_unchecked(&d.left);
        assert!((lu - DenseOperator::identity(2)).max_abs() < 1e-14);
    }

    #[test]
    fn svd_of_zero_matrix() {
        let d = svd(&DenseOperator::zeros(3));
        assert_eq!(d.values, vec![0.0; 3]);
        let lu = d.left.adjoint().mul_unchecked(&d.left);
        assert!((lu - DenseOperator::identity(3)).max_abs() < 1e-14);
    }

    #[test]
    fn polar_examples() {
        let t = DenseOperator::identity(3).scale_real(2.0);
        assert!((polar_unitary(&t).unwrap() - DenseOperator::identity(3)).max_abs() < 1e-14);
        let t = DenseOperator::from_real_diagonal(&[3.0, -2.0]);
        let w = polar_unitary(&t).unwrap();
        assert!((w - DenseOperator::from_real_diagonal(&[1.0, -1.0])).max_abs() < 1e-14);
        let f = polar(&t);
        let back = f.isometric_factor.mul_unchecked(&f.positive_factor);
        assert!((back - t).max_abs() < 1e-13);
    }

    #[test]
    fn polar_rejects_singular() {
        let t = DenseOperator::from_real_diagonal(&[1.0, 0.0]);
        assert!(matches!(
            polar_unitary(&t),
            Err(OrbitError::SingularInput { .. })
        ));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(
            numeric_rank(&DenseOperator::from_real_diagonal(&[1.0, 1e-14]), 1e-9),
            1
        );
        assert_eq!(numeric_rank(&DenseOperator::zeros(4), 1e-9), 0);
    }

    #[test]
    fn isometry_examples() {
        let i2 = DenseOperator::identity(2);
        assert!(isometry_check(&i2, &i2).unwrap().is_partial_isometry);

        let v = DenseOperator::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap();
        let p = DenseOperator::from_real_diagonal(&[1.0, 0.0]);
        let r = isometry_check(&v, &p).unwrap();
        assert!(r.is_partial_isometry);
        assert!(r.final_projection_defect < 1e-15);

        let r = isometry_check(&i2.scale_real(0.5), &i2).unwrap();
        assert!(!r.is_partial_isometry);
        assert!((r.initial_defect - 0.75).abs() < 1e-14);
        assert!((r.final_projection_defect - 0.1875).abs() < 1e-14);

        let not_proj = DenseOperator::from_real_diagonal(&[0.5, 1.0]);
        assert!(matches!(
            isometry_check(&i2, &not_proj),
            Err(OrbitError::NotAProjection { .. })
        ));
    }

    #[test]
    fn canonical_order() {
        let mut v = vec![c(1.0, 0.0), c(-4.0, 0.0), c(0.0, 4.0), c(4.0, 0.0)];
        v.sort_by(canonical_cmp);
        assert_eq!(v, vec![c(4.0, 0.0), c(0.0, 4.0), c(-4.0, 0.0), c(1.0, 0.0)]);
    }
}
