//! Symmetric norming functions on singular-value sequences.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{OrbitError, Result};
use crate::linalg;
use crate::operator::DenseOperator;

/// Reference sequence of a ratio norm
/// `‖x‖ = sup_n Σ_{k≤n} s_k(x) / Σ_{k≤n} r_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReference {
    pub values: Vec<f64>,
    /// Whether `r_k → 0` and `Σ r_k = ∞`. Declared by the caller, or inferred
    /// by [`RatioReference::infer_bi_normalizing`].
    pub bi_normalizing: bool,
}

impl RatioReference {
    /// Validates the values and infers the bi-normalizing flag.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let flag = Self::infer_bi_normalizing(&values);
        Self::declared(values, flag)
    }

    pub fn declared(values: Vec<f64>, bi_normalizing: bool) -> Result<Self> {
        if values.is_empty() {
            return Err(OrbitError::InvalidNormSpec(
                "ratio reference is empty".into(),
            ));
        }
        for (i, w) in values.windows(2).enumerate() {
            if w[1] > w[0] {
                return Err(OrbitError::UnsortedInput(i + 1));
            }
        }
        if let Some(i) = values.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(OrbitError::InvalidNormSpec(format!(
                "ratio reference entry {i} is not strictly positive"
            )));
        }
        Ok(Self {
            values,
            bi_normalizing,
        })
    }

    /// `r_k = 1/k`, k = 1..=len.
    pub fn harmonic(len: usize) -> Self {
        Self {
            values: (1..=len).map(|k| 1.0 / k as f64).collect(),
            bi_normalizing: true,
        }
    }

    /// `r_k = 2^{-(k-1)}`, k = 1..=len (summable, so not bi-normalizing).
    pub fn geometric(len: usize) -> Self {
        Self {
            values: (0..len).map(|k| 0.5f64.powi(k as i32)).collect(),
            bi_normalizing: false,
        }
    }

    /// Finite-data heuristic for "tends to 0 with divergent sum".
    ///
    /// Uses Cauchy condensation: for a non-increasing sequence `Σ r_k`
    /// diverges iff `Σ 2^j r_{2^j}` does. The sequence is declared
    /// bi-normalizing when it decays (`r_last < r_first / 2`) while the
    /// condensed terms `2^j r_{2^j}` stay above a quarter of `r_1` on every
    /// available dyadic level. Needs at least 8 entries.
    pub fn infer_bi_normalizing(values: &[f64]) -> bool {
        if values.len() < 8 {
            return false;
        }
        let first = values[0];
        let last = values[values.len() - 1];
        if last.is_nan() || last >= 0.5 * first {
            return false;
        }
        let mut idx = 1usize;
        while idx <= values.len() {
            if (idx as f64) * values[idx - 1] < 0.25 * first {
                return false;
            }
            idx *= 2;
        }
        true
    }
}

/// A symmetric norming function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NormSpec {
    Operator,
    #[serde(rename = "schatten")]
    Schatten {
        p: f64,
    },
    #[serde(rename = "kyfan")]
    KyFan {
        k: usize,
    },
    Trace,
    Ratio {
        reference: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bi_normalizing: Option<bool>,
    },
}

impl NormSpec {
    pub fn schatten(p: f64) -> Result<Self> {
        let spec = NormSpec::Schatten { p };
        spec.validate()?;
        Ok(spec)
    }

    pub fn ratio(reference: &RatioReference) -> Self {
        NormSpec::Ratio {
            reference: reference.values.clone(),
            bi_normalizing: Some(reference.bi_normalizing),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            NormSpec::Schatten { p } if p.is_nan() || *p < 1.0 => Err(OrbitError::InvalidNormSpec(
                format!("Schatten exponent must be ≥ 1, got {p}"),
            )),
            NormSpec::KyFan { k: 0 } => Err(OrbitError::InvalidNormSpec(
                "Ky Fan index must be ≥ 1".into(),
            )),
            NormSpec::Ratio { .. } => self.ratio_reference().map(|_| ()),
            _ => Ok(()),
        }
    }

    /// The reference of a ratio spec, with the flag resolved.
    pub fn ratio_reference(&self) -> Result<RatioReference> {
        match self {
            NormSpec::Ratio {
                reference,
                bi_normalizing: Some(flag),
            } => RatioReference::declared(reference.clone(), *flag),
            NormSpec::Ratio {
                reference,
                bi_normalizing: None,
            } => RatioReference::new(reference.clone()),
            _ => Err(OrbitError::InvalidNormSpec("not a ratio norm".into())),
        }
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormSpec::Operator => f.write_str("operator"),
            NormSpec::Schatten { p } => write!(f, "schatten:{p}"),
            NormSpec::KyFan { k } => write!(f, "kyfan:{k}"),
            NormSpec::Trace => f.write_str("trace"),
            NormSpec::Ratio { reference, .. } => write!(f, "ratio[{}]", reference.len()),
        }
    }
}

/// Parses the command-line form `kind[:params]`:
/// `operator`, `trace`, `schatten:2`, `kyfan:3`, `ratio:harmonic[:len]`,
/// `ratio:geometric[:len]` or `ratio:1,0.5,0.25`.
impl FromStr for NormSpec {
    type Err = OrbitError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| OrbitError::InvalidNormSpec(format!("{msg}: {s:?}"));
        let (kind, params) = match s.split_once(':') {
            Some((k, p)) => (k, Some(p)),
            None => (s, None),
        };
        let spec = match (kind.to_ascii_lowercase().as_str(), params) {
            ("operator" | "op", None) => NormSpec::Operator,
            ("trace", None) => NormSpec::Trace,
            ("schatten", Some(p)) => NormSpec::Schatten {
                p: p.parse().map_err(|_| bad("bad Schatten exponent"))?,
            },
            ("kyfan", Some(k)) => NormSpec::KyFan {
                k: k.parse().map_err(|_| bad("bad Ky Fan index"))?,
            },
            ("ratio", Some(rest)) => {
                let (family, len) = match rest.split_once(':') {
                    Some((f, l)) => (f, Some(l.parse::<usize>().map_err(|_| bad("bad length"))?)),
                    None => (rest, None),
                };
                let reference = match family {
                    "harmonic" => RatioReference::harmonic(len.unwrap_or(4096)),
                    "geometric" => RatioReference::geometric(len.unwrap_or(64)),
                    list => {
                        let values = list
                            .split(',')
                            .map(|v| v.trim().parse::<f64>())
                            .collect::<std::result::Result<Vec<_>, _>>()
                            .map_err(|_| bad("bad ratio reference list"))?;
                        RatioReference::new(values)?
                    }
                };
                NormSpec::ratio(&reference)
            }
            _ => return Err(bad("unknown norm")),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn check_sorted(s: &[f64]) -> Result<()> {
    for (i, &v) in s.iter().enumerate() {
        if v < 0.0 {
            return Err(OrbitError::NegativeEntry(i));
        }
        if !v.is_finite() {
            return Err(OrbitError::NonFinite);
        }
        if i > 0 && v > s[i - 1] {
            return Err(OrbitError::UnsortedInput(i));
        }
    }
    Ok(())
}

/// Symmetric norm of a non-increasing, non-negative sequence.
pub fn ideal_norm(s: &[f64], spec: &NormSpec) -> Result<f64> {
    check_sorted(s)?;
    spec.validate()?;
    Ok(match spec {
        NormSpec::Operator => s.first().copied().unwrap_or(0.0),
        NormSpec::Trace => s.iter().sum(),
        NormSpec::KyFan { k } => s.iter().take(*k).sum(),
        NormSpec::Schatten { p } => {
            let top = s.first().copied().unwrap_or(0.0);
            if top == 0.0 {
                0.0
            } else if p.is_infinite() {
                top
            } else {
                top * s
                    .iter()
                    .map(|v| (v / top).powf(*p))
                    .sum::<f64>()
                    .powf(1.0 / p)
            }
        }
        NormSpec::Ratio { reference, .. } => {
            let support = s.iter().take_while(|&&v| v > 0.0).count();
            if support > reference.len() {
                return Err(OrbitError::ReferenceTooShort {
                    needed: support,
                    available: reference.len(),
                });
            }
            ratio_partials(&s[..support], reference)
                .into_iter()
                .fold(0.0, f64::max)
        }
    })
}

/// `Σ_{k≤n} s_k / Σ_{k≤n} r_k` for n = 1..=len(s) (requires `len(r) ≥ len(s)`).
pub fn ratio_partials(s: &[f64], reference: &[f64]) -> Vec<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    s.iter()
        .zip(reference)
        .map(|(&sk, &rk)| {
            num += sk;
            den += rk;
            num / den
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorizationReport {
    pub dominated: bool,
    /// 1-based partial-sum length of the first violation.
    pub first_violation: Option<usize>,
    pub partial_sums_x: Vec<f64>,
    pub partial_sums_y: Vec<f64>,
}

/// Ky Fan dominance `Σ_{k≤n} s_k(x) ≤ Σ_{k≤n} s_k(y)` for every n (exact comparison).
pub fn ky_fan_majorizes(sx: &[f64], sy: &[f64]) -> Result<MajorizationReport> {
    ky_fan_majorizes_within(sx, sy, 0.0)
}

/// As [`ky_fan_majorizes`] but allowing each partial sum to exceed by `slack`.
pub fn ky_fan_majorizes_within(sx: &[f64], sy: &[f64], slack: f64) -> Result<MajorizationReport> {
    check_sorted(sx)?;
    check_sorted(sy)?;
    let len = sx.len().max(sy.len());
    let partial = |s: &[f64]| {
        let mut acc = 0.0;
        (0..len)
            .map(|i| {
                acc += s.get(i).copied().unwrap_or(0.0);
                acc
            })
            .collect::<Vec<f64>>()
    };
    let px = partial(sx);
    let py = partial(sy);
    let first_violation = px
        .iter()
        .zip(&py)
        .position(|(a, b)| *a > *b + slack)
        .map(|i| i + 1);
    Ok(MajorizationReport {
        dominated: first_violation.is_none(),
        first_violation,
        partial_sums_x: px,
        partial_sums_y: py,
    })
}

/// Norms of the Schmidt truncations `x_n` (n leading singular values).
///
/// `partials[n-1]` is the norm of `x_n`; `value` is the last partial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalNorm {
    pub value: f64,
    pub partials: Vec<f64>,
}

pub fn maximal_norm(x: &DenseOperator, spec: &NormSpec) -> Result<MaximalNorm> {
    spec.validate()?;
    let s = linalg::singular_values(x);
    let partials = (1..=s.len())
        .map(|n| ideal_norm(&s[..n], spec))
        .collect::<Result<Vec<f64>>>()?;
    Ok(MaximalNorm {
        value: partials.last().copied().unwrap_or(0.0),
        partials,
    })
}

/// Norm of a dense operator through its singular values.
pub fn operator_ideal_norm(x: &DenseOperator, spec: &NormSpec) -> Result<f64> {
    ideal_norm(&linalg::singular_values(x), spec)
}
