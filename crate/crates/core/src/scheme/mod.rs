//! Bernoulli schemes and ITPFI factor data.
//!
//! A scheme is an infinite product of probability vectors `μ_n` over
//! coordinates `n = 1, 2, ...`. Coordinates `1..=P` are given explicitly
//! (the prefix); every later coordinate belongs to exactly one
//! [`IndexClass`], whose [`WeightTemplate`] produces its weight vector in
//! closed form.

mod convert;
pub mod file;
mod law;
mod normalize;
mod validate;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

pub use convert::{factor_to_scheme, scheme_to_factor, FactorClass, FactorSpec};
pub use law::{truncate_alphabet, Law, Truncation};
pub use normalize::{interleave, normalize, Normalization};
pub use validate::{validate, Alphabet, ClassSummary, ValidatedScheme};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

/// Coordinates covered by a class (1-indexed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexSet {
    /// `start, start + step, start + 2 step, ...`
    Progression { start: usize, step: usize },
    List(Vec<usize>),
}

impl IndexSet {
    pub fn all_from(start: usize) -> Self {
        IndexSet::Progression { start, step: 1 }
    }

    pub fn contains(&self, n: usize) -> bool {
        match self {
            IndexSet::Progression { start, step } => n >= *start && (n - start).is_multiple_of(*step),
            IndexSet::List(list) => list.contains(&n),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, IndexSet::Progression { .. })
    }

    /// Members in increasing order, up to and including `limit`.
    pub fn members_upto(&self, limit: usize) -> Vec<usize> {
        match self {
            IndexSet::Progression { start, step } => {
                (*start..=limit.max(*start)).step_by(*step).filter(|&n| n <= limit).collect()
            }
            IndexSet::List(list) => {
                let mut out: Vec<usize> = list.iter().copied().filter(|&n| n <= limit).collect();
                out.sort_unstable();
                out
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            IndexSet::Progression { start, step } => format!("{start} + {step}k"),
            IndexSet::List(list) => format!("{list:?}"),
        }
    }
}

/// Vanishing deviation sequence `ε_n`, indexed by coordinate.
#[derive(Debug, Clone, PartialEq)]
pub enum Deviation {
    Zero,
    /// `ε_n = ρ^n`
    Geometric { rho: BigRational },
    /// `ε_n = n^{-p}`
    Power { exponent: BigRational },
    /// `ε_n = values[n - 1]` for `n <= values.len()`, zero afterwards.
    List(Vec<BigRational>),
}

impl Deviation {
    pub fn is_zero(&self) -> bool {
        match self {
            Deviation::Zero => true,
            Deviation::List(values) => values.iter().all(Zero::is_zero),
            _ => false,
        }
    }

    /// `ε_n > 0` for every `n`.
    pub fn is_strictly_positive(&self) -> bool {
        matches!(self, Deviation::Geometric { .. } | Deviation::Power { .. })
    }

    /// Whether `ε_n` is rational for every `n`.
    pub fn is_rational(&self) -> bool {
        match self {
            Deviation::Power { exponent } => exponent.is_integer(),
            _ => true,
        }
    }

    pub fn value_is_zero(&self, n: usize) -> bool {
        match self {
            Deviation::Zero => true,
            Deviation::List(values) => values.get(n - 1).is_none_or(Zero::is_zero),
            _ => false,
        }
    }

    /// Exact `ε_n` when rational.
    pub fn exact(&self, n: usize) -> Option<BigRational> {
        match self {
            Deviation::Zero => Some(BigRational::zero()),
            Deviation::Geometric { rho } => Some(num_traits::Pow::pow(rho, n)),
            Deviation::Power { exponent } if exponent.is_integer() => {
                let p: u32 = exponent.to_integer().try_into().ok()?;
                Some(BigRational::new(1.into(), num_traits::Pow::pow(num_bigint::BigInt::from(n), p)))
            }
            Deviation::Power { .. } => None,
            Deviation::List(values) => Some(values.get(n - 1).cloned().unwrap_or_else(BigRational::zero)),
        }
    }

    pub fn value_f64(&self, n: usize) -> f64 {
        match self {
            Deviation::Zero => 0.0,
            Deviation::Geometric { rho } => rho.as_f64().powf(n as f64),
            Deviation::Power { exponent } => (n as f64).powf(-exponent.as_f64()),
            Deviation::List(values) => values.get(n - 1).map_or(0.0, Scalar::as_f64),
        }
    }

    pub fn value<S: Scalar>(&self, n: usize) -> Result<S, SchemeError> {
        match self.exact(n) {
            Some(v) => Ok(S::from_rational(&v)),
            None => S::from_f64(self.value_f64(n)).ok_or(SchemeError::InexactTemplate {
                what: "irrational deviation value",
            }),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Deviation::Zero => "zero".into(),
            Deviation::Geometric { rho } => format!("{}^n", rho.render()),
            Deviation::Power { exponent } => format!("n^-{}", exponent.render()),
            Deviation::List(values) => format!("explicit list of {}", values.len()),
        }
    }
}

/// Closed-form family of weight vectors for the coordinates of one class.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightTemplate {
    /// The same finite weight vector at every coordinate.
    ExplicitFinite(Vec<BigRational>),
    /// Infinite alphabet: `head[0], ..., head[m-1]`, then `tail * ratio^j`
    /// for `j = 0, 1, ...`.
    GeometricTail { head: Vec<BigRational>, tail: BigRational, ratio: BigRational },
    /// Two symbols with `μ_n(1)/μ_n(0) = λ_n`, where `λ_n = λ e^{-ε_n}` for
    /// `λ > 0` and `λ_n = 1 - e^{-ε_n}` for `λ = 0`. `swapped` exchanges the
    /// two symbols.
    TwoPoint { limit: BigRational, deviation: Deviation, swapped: bool },
    /// `μ_n = (1 - ε_n) v + ε_n u` with `u` uniform on the alphabet of `v`.
    PerturbedVector { limit: Vec<BigRational>, deviation: Deviation },
}

impl WeightTemplate {
    pub fn two_point(limit: BigRational) -> Self {
        WeightTemplate::TwoPoint { limit, deviation: Deviation::Zero, swapped: false }
    }

    /// `None` for an infinite alphabet.
    pub fn alphabet_size(&self) -> Option<usize> {
        match self {
            WeightTemplate::ExplicitFinite(w) => Some(w.len()),
            WeightTemplate::GeometricTail { .. } => None,
            WeightTemplate::TwoPoint { .. } => Some(2),
            WeightTemplate::PerturbedVector { limit, .. } => Some(limit.len()),
        }
    }

    /// True when evaluating the weights needs `exp` or irrational powers.
    pub fn is_transcendental(&self) -> bool {
        match self {
            WeightTemplate::TwoPoint { deviation, .. } => !deviation.is_zero(),
            WeightTemplate::PerturbedVector { deviation, .. } => !deviation.is_rational(),
            _ => false,
        }
    }

    pub fn deviation(&self) -> Option<&Deviation> {
        match self {
            WeightTemplate::TwoPoint { deviation, .. } | WeightTemplate::PerturbedVector { deviation, .. } => {
                Some(deviation)
            }
            _ => None,
        }
    }

    /// Weight vector at coordinate `n`.
    pub fn law<S: Scalar>(&self, n: usize) -> Result<Law<S>, SchemeError> {
        match self {
            WeightTemplate::ExplicitFinite(w) => Ok(Law::Finite(w.iter().map(S::from_rational).collect())),
            WeightTemplate::GeometricTail { head, tail, ratio } => Ok(Law::Geometric {
                head: head.iter().map(S::from_rational).collect(),
                tail: S::from_rational(tail),
                ratio: S::from_rational(ratio),
            }),
            WeightTemplate::TwoPoint { limit, deviation, swapped } => {
                let lambda_n: S = if deviation.value_is_zero(n) {
                    S::from_rational(limit)
                } else {
                    let eps = deviation.value_f64(n);
                    let value = if limit.is_zero() {
                        -(-eps).exp_m1()
                    } else {
                        limit.as_f64() * (-eps).exp()
                    };
                    S::from_f64(value).ok_or(SchemeError::InexactTemplate { what: "two-point deviation" })?
                };
                let one = S::one();
                let denom = one.clone() + lambda_n.clone();
                let w0 = one / denom.clone();
                let w1 = lambda_n / denom;
                Ok(Law::Finite(if *swapped { vec![w1, w0] } else { vec![w0, w1] }))
            }
            WeightTemplate::PerturbedVector { limit, deviation } => {
                let eps: S = deviation.value(n)?;
                let size = S::from_int(limit.len() as i64);
                let keep = S::one() - eps.clone();
                let spread = eps / size;
                Ok(Law::Finite(
                    limit.iter().map(|v| keep.clone() * S::from_rational(v) + spread.clone()).collect(),
                ))
            }
        }
    }

    /// Pointwise limit of the weight vectors along the class (exact).
    pub fn limit_law(&self) -> Law<BigRational> {
        match self {
            WeightTemplate::TwoPoint { limit, swapped, .. } => {
                let one = BigRational::one();
                let w0 = &one / (&one + limit);
                let w1 = limit / (&one + limit);
                Law::Finite(if *swapped { vec![w1, w0] } else { vec![w0, w1] })
            }
            WeightTemplate::PerturbedVector { limit, .. } => Law::Finite(limit.clone()),
            other => other.law::<BigRational>(1).expect("constant templates evaluate exactly"),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            WeightTemplate::ExplicitFinite(_) => "explicit",
            WeightTemplate::GeometricTail { .. } => "geometric_tail",
            WeightTemplate::TwoPoint { .. } => "two_point",
            WeightTemplate::PerturbedVector { .. } => "perturbed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexClass {
    pub indices: IndexSet,
    pub template: WeightTemplate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSpec {
    pub mode: Mode,
    /// Explicit weight vectors for coordinates `1..=prefix.len()`.
    pub prefix: Vec<Vec<BigRational>>,
    pub classes: Vec<IndexClass>,
}

impl SchemeSpec {
    /// Which template (or prefix entry) governs coordinate `n`.
    pub fn source(&self, n: usize) -> Option<CoordinateSource<'_>> {
        if n == 0 {
            return None;
        }
        if let Some(weights) = self.prefix.get(n - 1) {
            return Some(CoordinateSource::Prefix(weights));
        }
        self.classes
            .iter()
            .enumerate()
            .find(|(_, c)| c.indices.contains(n))
            .map(|(i, c)| CoordinateSource::Class(i, &c.template))
    }

    /// Weight vector at coordinate `n` (1-indexed).
    pub fn law<S: Scalar>(&self, n: usize) -> Result<Law<S>, SchemeError> {
        match self.source(n).ok_or(SchemeError::CoverageGap { coordinate: n })? {
            CoordinateSource::Prefix(w) => Ok(Law::Finite(w.iter().map(S::from_rational).collect())),
            CoordinateSource::Class(_, template) => template.law(n),
        }
    }

    /// Same scheme with coordinates `1..=P` replaced by `prefix`.
    pub fn with_prefix(&self, prefix: Vec<Vec<BigRational>>) -> Self {
        SchemeSpec { prefix, ..self.clone() }
    }

    pub fn any_transcendental(&self) -> bool {
        self.classes.iter().any(|c| c.template.is_transcendental())
    }
}

#[derive(Debug, Clone, Copy)]
pub enum CoordinateSource<'a> {
    Prefix(&'a [BigRational]),
    Class(usize, &'a WeightTemplate),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchemeError {
    #[error("coordinate {coordinate} is not covered by the prefix or any class")]
    CoverageGap { coordinate: usize },
    #[error("coordinate {coordinate} is covered by both {first} and {second}")]
    Overlap { coordinate: usize, first: String, second: String },
    #[error("{location}: weight of symbol {symbol} is not strictly positive")]
    NonPositiveWeight { location: String, symbol: usize },
    #[error("{location}: weights sum to {sum}, not 1")]
    NotNormalized { location: String, sum: String },
    #[error("{location}: alphabet must have at least 2 symbols")]
    AlphabetTooSmall { location: String },
    #[error("{location}: {message}")]
    InvalidParameter { location: String, message: String },
    #[error("exact mode cannot evaluate {what}; use mode = \"float\"")]
    InexactTemplate { what: &'static str },
    #[error("mass budget must lie in (0, 1/2], got {0}")]
    InvalidBudget(String),
    #[error("alphabet cannot be enumerated to the requested mass")]
    BudgetUnreachable,
    #[error("{location}: eigenvalue list must be non-negative with a positive entry")]
    InvalidSpectrum { location: String },
}

pub(crate) fn class_location(index: usize) -> String {
    format!("classes[{index}]")
}

pub(crate) fn prefix_location(coordinate: usize) -> String {
    format!("prefix coordinate {coordinate}")
}
