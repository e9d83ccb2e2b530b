//! Spectral data of normal operators and the conversions to and from dense
//! matrices.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{OrbitError, Result};
use crate::linalg::{self, canonical_cmp};
use crate::operator::DenseOperator;

/// Default relative clustering tolerance for [`profile_of`].
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-9;

/// Dimension of the kernel: a count or the symbol INFINITE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelDim {
    Finite(usize),
    Infinite,
}

impl KernelDim {
    pub fn is_zero(&self) -> bool {
        matches!(self, KernelDim::Finite(0))
    }

    pub fn finite(&self) -> Option<usize> {
        match self {
            KernelDim::Finite(n) => Some(*n),
            KernelDim::Infinite => None,
        }
    }
}

impl fmt::Display for KernelDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelDim::Finite(n) => write!(f, "{n}"),
            KernelDim::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for KernelDim {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            KernelDim::Finite(n) => s.serialize_u64(*n as u64),
            KernelDim::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for KernelDim {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u64),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(n) => Ok(KernelDim::Finite(n as usize)),
            Raw::Word(w) if w.eq_ignore_ascii_case("inf") || w.eq_ignore_ascii_case("infinite") => {
                Ok(KernelDim::Infinite)
            }
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "kernel_dim must be a non-negative integer or \"inf\", got {w:?}"
            ))),
        }
    }
}

/// One nonzero eigenvalue with the dimension of its eigenspace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "EigenWire", into = "EigenWire")]
pub struct Eigenpair {
    pub value: Complex64,
    pub multiplicity: usize,
}

impl Eigenpair {
    pub fn new(value: Complex64, multiplicity: usize) -> Self {
        Self {
            value,
            multiplicity,
        }
    }

    pub fn real(value: f64, multiplicity: usize) -> Self {
        Self::new(Complex64::new(value, 0.0), multiplicity)
    }
}

#[derive(Serialize, Deserialize)]
struct EigenWire {
    re: f64,
    #[serde(default)]
    im: f64,
    mult: usize,
}

impl From<EigenWire> for Eigenpair {
    fn from(w: EigenWire) -> Self {
        Eigenpair::new(Complex64::new(w.re, w.im), w.mult)
    }
}

impl From<Eigenpair> for EigenWire {
    fn from(e: Eigenpair) -> Self {
        EigenWire {
            re: e.value.re,
            im: e.value.im,
            mult: e.multiplicity,
        }
    }
}

/// Complex point serialized as `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<Complex64> for Point {
    fn from(z: Complex64) -> Self {
        Point { re: z.re, im: z.im }
    }
}

impl From<Point> for Complex64 {
    fn from(p: Point) -> Self {
        Complex64::new(p.re, p.im)
    }
}

/// A normal operator described by its point spectrum.
///
/// Eigenvalues are kept in the order they were listed; [`SpectralProfile::canonical`]
/// returns the canonically ordered copy used for comparison and output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    pub eigenvalues: Vec<Eigenpair>,
    pub kernel_dim: KernelDim,
    #[serde(default, with = "points")]
    pub essential_points: Vec<Complex64>,
    #[serde(default)]
    pub tail_bound: f64,
    /// When set, every essential point must be 0.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub compact: bool,
}

mod points {
    use super::Point;
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        let pts: Vec<Point> = v.iter().map(|&z| z.into()).collect();
        pts.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pts = Vec::<Point>::deserialize(d)?;
        Ok(pts.into_iter().map(Into::into).collect())
    }
}

impl SpectralProfile {
    /// Exact profile with finitely many eigenvalues and a finite kernel.
    pub fn finite(eigenvalues: Vec<Eigenpair>, kernel_dim: usize) -> Self {
        Self {
            eigenvalues,
            kernel_dim: KernelDim::Finite(kernel_dim),
            essential_points: Vec::new(),
            tail_bound: 0.0,
            compact: false,
        }
    }

    /// Multiplicity-one real eigenvalues, finite kernel.
    pub fn from_reals(values: &[f64], kernel_dim: usize) -> Self {
        Self::finite(
            values.iter().map(|&v| Eigenpair::real(v, 1)).collect(),
            kernel_dim,
        )
    }

    pub fn with_kernel(mut self, kernel_dim: KernelDim) -> Self {
        self.kernel_dim = kernel_dim;
        self
    }

    pub fn with_essential_points(mut self, points: Vec<Complex64>) -> Self {
        self.essential_points = points;
        self
    }

    pub fn is_exact(&self) -> bool {
        self.tail_bound == 0.0
    }

    pub fn total_multiplicity(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.multiplicity).sum()
    }

    /// Smallest dimension that holds the nonzero eigenspaces and a finite kernel.
    pub fn minimal_dim(&self) -> usize {
        self.total_multiplicity() + self.kernel_dim.finite().unwrap_or(0)
    }

    /// Copy with eigenvalues sorted canonically (decreasing modulus, then argument).
    pub fn canonical(&self) -> Self {
        let mut out = self.clone();
        out.eigenvalues
            .sort_by(|a, b| canonical_cmp(&a.value, &b.value));
        out.essential_points.sort_by(canonical_cmp);
        out
    }

    /// Indices into `eigenvalues` in canonical order.
    pub fn canonical_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.eigenvalues.len()).collect();
        idx.sort_by(|&i, &j| canonical_cmp(&self.eigenvalues[i].value, &self.eigenvalues[j].value));
        idx
    }

    pub fn validate(&self) -> Result<()> {
        validate_profile(self)
    }
}

/// Checks the profile invariants.
pub fn validate_profile(p: &SpectralProfile) -> Result<()> {
    for (i, e) in p.eigenvalues.iter().enumerate() {
        if !e.value.re.is_finite() || !e.value.im.is_finite() {
            return Err(OrbitError::NonFinite);
        }
        if e.value == Complex64::new(0.0, 0.0) {
            return Err(OrbitError::ZeroListedAsEigenvalue);
        }
        if e.multiplicity == 0 {
            return Err(OrbitError::BadMultiplicity(format_complex(e.value)));
        }
        if p.eigenvalues[..i].iter().any(|f| f.value == e.value) {
            return Err(OrbitError::DuplicateEigenvalue(format_complex(e.value)));
        }
    }
    if !(p.tail_bound >= 0.0 && p.tail_bound.is_finite()) {
        return Err(OrbitError::NegativeTailBound(p.tail_bound));
    }
    for z in &p.essential_points {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(OrbitError::NonFinite);
        }
        if p.compact && *z != Complex64::new(0.0, 0.0) {
            return Err(OrbitError::NonCompactEssentialPoint(format_complex(*z)));
        }
    }
    Ok(())
}

pub(crate) fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

/// `|λ|` repeated with multiplicity, non-increasing, followed by `kernel_dim`
/// zeros when the kernel is finite. An infinite kernel contributes no
/// padding (zeros never change a symmetric norm).
pub fn singular_values(p: &SpectralProfile) -> Vec<f64> {
    let mut s: Vec<f64> = p
        .eigenvalues
        .iter()
        .flat_map(|e| std::iter::repeat_n(e.value.norm(), e.multiplicity))
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    if let KernelDim::Finite(k) = p.kernel_dim {
        s.extend(std::iter::repeat_n(0.0, k));
    }
    s
}

/// Partition of `{0, …, dim−1}` into nonempty blocks: mutually orthogonal
/// coordinate projections summing to the identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionFamily {
    dim: usize,
    blocks: Vec<Vec<usize>>,
}

impl ProjectionFamily {
    pub fn new(dim: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if dim == 0 {
            return Err(OrbitError::InvalidPartition(
                "dimension must be positive".into(),
            ));
        }
        let mut seen = vec![false; dim];
        for block in &blocks {
            if block.is_empty() {
                return Err(OrbitError::InvalidPartition("empty block".into()));
            }
            for &i in block {
                if i >= dim {
                    return Err(OrbitError::InvalidPartition(format!(
                        "index {i} ≥ dim {dim}"
                    )));
                }
                if seen[i] {
                    return Err(OrbitError::InvalidPartition(format!("index {i} repeated")));
                }
                seen[i] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(OrbitError::InvalidPartition(format!(
                "index {missing} not covered"
            )));
        }
        Ok(Self { dim, blocks })
    }

    /// Every index in its own block.
    pub fn singletons(dim: usize) -> Self {
        Self {
            dim,
            blocks: (0..dim).map(|i| vec![i]).collect(),
        }
    }

    pub fn trivial(dim: usize) -> Self {
        Self {
            dim,
            blocks: vec![(0..dim).collect()],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// `labels[i]` is the block containing index `i`.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.dim];
        for (b, block) in self.blocks.iter().enumerate() {
            for &i in block {
                labels[i] = b;
            }
        }
        labels
    }

    /// Orthogonal projection onto block `b`.
    pub fn projection(&self, b: usize) -> DenseOperator {
        let mut d = vec![0.0; self.dim];
        for &i in &self.blocks[b] {
            d[i] = 1.0;
        }
        DenseOperator::from_real_diagonal(&d)
    }
}

/// Diagonal realisation of a profile on `total_dim` coordinates.
///
/// Each eigenvalue occupies `multiplicity` consecutive indices in listed
/// order; the remaining indices form the kernel block, which comes last.
pub fn materialize(
    p: &SpectralProfile,
    total_dim: usize,
) -> Result<(DenseOperator, ProjectionFamily)> {
    let required = p.minimal_dim().max(1);
    if total_dim < required {
        return Err(OrbitError::DimensionTooSmall {
            requested: total_dim,
            required,
        });
    }
    let mut diag = Vec::with_capacity(total_dim);
    let mut blocks = Vec::with_capacity(p.eigenvalues.len() + 1);
    for e in &p.eigenvalues {
        let start = diag.len();
        diag.extend(std::iter::repeat_n(e.value, e.multiplicity));
        blocks.push((start..diag.len()).collect());
    }
    if diag.len() < total_dim {
        let start = diag.len();
        diag.resize(total_dim, Complex64::new(0.0, 0.0));
        blocks.push((start..total_dim).collect());
    }
    Ok((
        DenseOperator::from_diagonal(&diag),
        ProjectionFamily {
            dim: total_dim,
            blocks,
        },
    ))
}

/// Groups eigenvalues of a normal matrix into a profile.
///
/// Eigenvalues closer than `cluster_tol · ‖x‖` merge; those within
/// `cluster_tol · ‖x‖` of zero count toward the kernel.
pub fn profile_of(x: &DenseOperator, cluster_tol: f64) -> Result<SpectralProfile> {
    let (profile, _) = clustered_eigenspaces(x, cluster_tol)?;
    Ok(profile)
}

/// Orthonormal eigenvectors for each eigenvalue of a profile (listed order)
/// and for the kernel.
#[derive(Debug, Clone)]
pub struct Eigenspaces {
    pub blocks: Vec<Vec<Vec<Complex64>>>,
    pub kernel: Vec<Vec<Complex64>>,
}

/// Like [`profile_of`] but also returns the eigenvectors of every cluster.
pub fn clustered_eigenspaces(
    x: &DenseOperator,
    cluster_tol: f64,
) -> Result<(SpectralProfile, Eigenspaces)> {
    let scale = x.frobenius_norm();
    let defect = x.self_commutator().frobenius_norm();
    if defect > cluster_tol * scale * scale {
        return Err(OrbitError::NotNormal { defect });
    }
    if scale == 0.0 {
        let n = x.dim();
        let kernel = (0..n)
            .map(|j| DenseOperator::identity(n).column(j))
            .collect();
        return Ok((
            SpectralProfile::finite(Vec::new(), n),
            Eigenspaces {
                blocks: Vec::new(),
                kernel,
            },
        ));
    }
    let eig = linalg::normal_eigen(x)?;
    let norm = eig.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let radius = cluster_tol * norm;

    let mut clusters: Vec<(Vec<Complex64>, Vec<Vec<Complex64>>)> = Vec::new();
    let mut kernel = Vec::new();
    for (j, &lambda) in eig.values.iter().enumerate() {
        let col = eig.vectors.column(j);
        if lambda.norm() <= radius {
            kernel.push(col);
            continue;
        }
        match clusters
            .iter_mut()
            .find(|(members, _)| members.iter().any(|m| (m - lambda).norm() <= radius))
        {
            Some((members, vecs)) => {
                members.push(lambda);
                vecs.push(col);
            }
            None => clusters.push((vec![lambda], vec![col])),
        }
    }
    let mut with_values: Vec<(Complex64, Vec<Vec<Complex64>>)> = clusters
        .into_iter()
        .map(|(members, vecs)| {
            let mean = members.iter().sum::<Complex64>() / members.len() as f64;
            (mean, vecs)
        })
        .collect();
    with_values.sort_by(|a, b| canonical_cmp(&a.0, &b.0));
    let eigenvalues = with_values
        .iter()
        .map(|(v, vecs)| Eigenpair::new(*v, vecs.len()))
        .collect();
    let profile = SpectralProfile::finite(eigenvalues, kernel.len());
    let spaces = Eigenspaces {
        blocks: with_values.into_iter().map(|(_, v)| v).collect(),
        kernel,
    };
    Ok((profile, spaces))
}
