use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Every variant maps to a stable upper-camel-case code (see [`OrbitError::code`])
/// that the CLI writes into its reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrbitError {
    #[error("eigenvalue {0} is listed more than once")]
    DuplicateEigenvalue(String),
    #[error("zero is listed as an eigenvalue; it belongs in kernel_dim")]
    ZeroListedAsEigenvalue,
    #[error("multiplicity must be at least 1 (eigenvalue {0})")]
    BadMultiplicity(String),
    #[error("tail bound must be a finite non-negative number, got {0}")]
    NegativeTailBound(f64),
    #[error("compact profile has non-zero essential point {0}")]
    NonCompactEssentialPoint(String),
    #[error("non-finite value in input")]
    NonFinite,
    #[error("dimension {requested} is too small, at least {required} needed")]
    DimensionTooSmall { requested: usize, required: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix data is malformed: {0}")]
    MalformedMatrix(String),
    #[error("projection family is not a partition: {0}")]
    InvalidPartition(String),
    #[error("operator is not normal (commutator defect {defect:.3e})")]
    NotNormal { defect: f64 },
    #[error("operator is not hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("operator is singular (smallest singular value {smallest:.3e})")]
    SingularInput { smallest: f64 },
    #[error("operator is not an orthogonal projection (defect {defect:.3e})")]
    NotAProjection { defect: f64 },
    #[error("sequence is not sorted non-increasing at index {0}")]
    UnsortedInput(usize),
    #[error("negative entry at index {0}")]
    NegativeEntry(usize),
    #[error("invalid norm: {0}")]
    InvalidNormSpec(String),
    #[error("ratio reference has {available} entries, {needed} needed")]
    ReferenceTooShort { needed: usize, available: usize },
    #[error("operator is not constant on the blocks of the family: {0}")]
    InconsistentFamily(String),
    #[error("the commutator test and the expectation test disagree")]
    CommutantTestsDisagree,
    #[error("right-hand side is not in the kernel of the expectation (norm {norm:.3e})")]
    ExpectationNonzero { norm: f64 },
    #[error("two blocks carry the same spectral value")]
    RepeatedBlockValue,
    #[error("no divisor convention reproduces the right-hand side (residual {residual:.3e})")]
    ResidualCheckFailed { residual: f64 },
    #[error("at least two eigenvalues are needed")]
    TooFewEigenvalues,
    #[error(
        "operator is not a partial isometry onto the required initial space (defect {defect:.3e})"
    )]
    NotPartialIsometry { defect: f64 },
    #[error(
        "initial space of the partial isometry differs from the range of a (defect {defect:.3e})"
    )]
    InitialSpaceMismatch { defect: f64 },
    #[error("profile has a non-zero tail bound; an exact profile is required")]
    InexactProfile,
    #[error("b is not in the required orbit closure of a: {0}")]
    NotInClosure(String),
    #[error("cell centred at {center} carries multiplicity {mass_a} in a but {mass_b} in b")]
    CellMassMismatch {
        center: String,
        mass_a: String,
        mass_b: String,
    },
    #[error("spectrum points are too close (minimum gap {gap:.3e})")]
    SpectrumTooClose { gap: f64 },
    #[error("spectrum of the argument is not within tolerance of the profile: {0}")]
    SpectrumOutOfRange(String),
    #[error("index {index} out of range: {reason}")]
    BadIndex { index: usize, reason: String },
    #[error("sequence is not strictly decreasing and positive at index {0}")]
    NotDecreasing(usize),
    #[error("reference sequence is not bi-normalizing")]
    NotBiNormalizing,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl OrbitError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        use OrbitError::*;
        match self {
            DuplicateEigenvalue(_) => "DuplicateEigenvalue",
            ZeroListedAsEigenvalue => "ZeroListedAsEigenvalue",
            BadMultiplicity(_) => "BadMultiplicity",
            NegativeTailBound(_) => "NegativeTailBound",
            NonCompactEssentialPoint(_) => "NonCompactEssentialPoint",
            NonFinite => "NonFinite",
            DimensionTooSmall { .. } => "DimensionTooSmall",
            DimensionMismatch { .. } => "DimensionMismatch",
            MalformedMatrix(_) => "MalformedMatrix",
            InvalidPartition(_) => "InvalidPartition",
            NotNormal { .. } => "NotNormal",
            NotHermitian { .. } => "NotHermitian",
            NoConvergence { .. } => "NoConvergence",
            SingularInput { .. } => "SingularInput",
            NotAProjection { .. } => "NotAProjection",
            UnsortedInput(_) => "UnsortedInput",
            NegativeEntry(_) => "NegativeEntry",
            InvalidNormSpec(_) => "InvalidNormSpec",
            ReferenceTooShort { .. } => "ReferenceTooShort",
            InconsistentFamily(_) => "InconsistentFamily",
            CommutantTestsDisagree => "CommutantTestsDisagree",
            ExpectationNonzero { .. } => "ExpectationNonzero",
            RepeatedBlockValue => "RepeatedBlockValue",
            ResidualCheckFailed { .. } => "ResidualCheckFailed",
            TooFewEigenvalues => "TooFewEigenvalues",
            NotPartialIsometry { .. } => "NotPartialIsometry",
            InitialSpaceMismatch { .. } => "InitialSpaceMismatch",
            InexactProfile => "InexactProfile",
            NotInClosure(_) => "NotInClosure",
            CellMassMismatch { .. } => "CellMassMismatch",
            SpectrumTooClose { .. } => "SpectrumTooClose",
            SpectrumOutOfRange(_) => "SpectrumOutOfRange",
            BadIndex { .. } => "BadIndex",
            NotDecreasing(_) => "NotDecreasing",
            NotBiNormalizing => "NotBiNormalizing",
            InvalidParameter(_) => "InvalidParameter",
        }
    }
}

pub type Result<T> = std::result::Result<T, OrbitError>;
