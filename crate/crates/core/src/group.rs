//! Closed multiplicative subgroups of `(0, ∞)` generated by finitely many
//! points of `(0, 1]`.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::scalar::Scalar;

/// Largest exponent accepted when matching `a^q = b^p`.
pub const DEFAULT_EXPONENT_BOUND: u64 = 1_000_000;

const FLOAT_ONE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("{0} is outside the open interval (0, 1)")]
    DomainError(String),
    #[error("0 must be removed from the point set before computing the group")]
    ZeroInSet,
    #[error("point set is empty")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    /// Decided by exact arithmetic.
    Exact,
    /// Incommensurability holds only for exponents up to the bound.
    BoundedDenominator(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum GroupKind<S> {
    Trivial,
    /// `{λ^k : k ∈ ℤ}` with `λ ∈ (0, 1)`.
    Cyclic(S),
    Dense,
}

impl<S: Scalar> GroupKind<S> {
    pub fn name(&self) -> &'static str {
        match self {
            GroupKind::Trivial => "trivial",
            GroupKind::Cyclic(_) => "cyclic",
            GroupKind::Dense => "dense",
        }
    }
}

/// One commensurability test performed during the reduction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairEvidence {
    pub a: String,
    pub b: String,
    /// `(p, q)` with `a^q = b^p`, or `None` when incommensurable up to the bound.
    pub exponents: Option<(u64, u64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupStructure<S> {
    pub kind: GroupKind<S>,
    pub evidence: Vec<PairEvidence>,
    pub confidence: Confidence,
}

fn check_domain<S: Scalar>(x: &S) -> Result<(), GroupError> {
    if x.is_positive() && *x < S::one() {
        Ok(())
    } else {
        Err(GroupError::DomainError(x.render()))
    }
}

/// Coprime `(p, q)` with `log a / log b = p / q`, i.e. `a^q = b^p`, when
/// such a pair exists with `max(p, q) <= bound`.
pub fn commensurable<S: Scalar>(a: &S, b: &S, bound: u64) -> Result<Option<(u64, u64)>, GroupError> {
    check_domain(a)?;
    check_domain(b)?;
    if S::EXACT {
        if let (Some(a), Some(b)) = (a.to_rational(), b.to_rational()) {
            return Ok(commensurable_exact(&a, &b, bound));
        }
    }
    Ok(commensurable_float(a.ln(), b.ln(), bound))
}

/// Writes a positive rational as `base^exponent` with the largest possible
/// exponent. Two rationals are log-commensurable iff their bases agree.
pub fn perfect_power(x: &BigRational) -> (BigRational, u64) {
    let mut base = x.clone();
    let mut exponent = 1u64;
    let limit = x.numer().bits().max(x.denom().bits());
    let mut p = 2u32;
    while u64::from(p) <= limit {
        match base.nth_root(p) {
            Some(root) if root != base => {
                base = root;
                exponent *= u64::from(p);
            }
            _ => p = next_prime(p),
        }
    }
    (base, exponent)
}

fn next_prime(p: u32) -> u32 {
    (p + 1..).find(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)).expect("primes are unbounded")
}

fn commensurable_exact(a: &BigRational, b: &BigRational, bound: u64) -> Option<(u64, u64)> {
    let (base_a, ea) = perfect_power(a);
    let (base_b, eb) = perfect_power(b);
    if base_a != base_b {
        return None;
    }
    let g = num_integer::gcd(ea, eb);
    let (p, q) = (ea / g, eb / g);
    (p.max(q) <= bound).then_some((p, q))
}

/// Continued-fraction convergents of `ln a / ln b`.
fn commensurable_float(ln_a: f64, ln_b: f64, bound: u64) -> Option<(u64, u64)> {
    let x = ln_a / ln_b;
    if !x.is_finite() || x <= 0.0 {
        return None;
    }
    let (mut h0, mut h1) = (1u64, x.floor() as u64);
    let (mut k0, mut k1) = (0u64, 1u64);
    let mut frac = x - x.floor();
    loop {
        if h1.max(k1) > bound {
            return None;
        }
        let residual = (k1 as f64 * ln_a - h1 as f64 * ln_b).abs();
        let scale = k1 as f64 * ln_a.abs() + h1 as f64 * ln_b.abs();
        if h1 > 0 && residual <= FLOAT_ONE_TOLERANCE.max(8.0 * f64::EPSILON * scale) {
            return Some((h1, k1));
        }
        if frac < 1e-15 {
            return None;
        }
        let inv = 1.0 / frac;
        let digit = inv.floor();
        frac = inv - digit;
        let digit = digit as u64;
        (h0, h1) = (h1, digit.checked_mul(h1)?.checked_add(h0)?);
        (k0, k1) = (k1, digit.checked_mul(k1)?.checked_add(k0)?);
    }
}

fn is_one<S: Scalar>(x: &S) -> bool {
    x.near(&S::one(), FLOAT_ONE_TOLERANCE)
}

/// Closed group generated by `points ⊂ (0, 1]`, reduced pairwise by Euclid
/// on exponents.
pub fn mult_group<S: Scalar>(points: &[S], bound: u64) -> Result<GroupStructure<S>, GroupError> {
    if points.is_empty() {
        return Err(GroupError::Empty);
    }
    if points.iter().any(Zero::is_zero) {
        return Err(GroupError::ZeroInSet);
    }
    let mut proper: Vec<S> = Vec::new();
    for x in points {
        if is_one(x) {
            continue;
        }
        check_domain(x)?;
        if !proper.iter().any(|y| y.near(x, FLOAT_ONE_TOLERANCE)) {
            proper.push(x.clone());
        }
    }
    let confidence = |cut: bool| {
        if S::EXACT && !cut {
            Confidence::Exact
        } else {
            Confidence::BoundedDenominator(bound)
        }
    };
    let mut evidence = Vec::new();
    let mut iter = proper.into_iter();
    let Some(mut generator) = iter.next() else {
        return Ok(GroupStructure { kind: GroupKind::Trivial, evidence, confidence: confidence(false) });
    };
    let mut bounded = false;
    for x in iter {
        let found = commensurable(&generator, &x, bound)?;
        evidence.push(PairEvidence { a: generator.render(), b: x.render(), exponents: found });
        match found {
            // generator = c^p and x = c^q with gcd(p, q) = 1, so c generates both
            Some((p, _)) => generator = root(&generator, p),
            None => {
                bounded |= !S::EXACT || cut_by_bound(&generator, &x);
                return Ok(GroupStructure { kind: GroupKind::Dense, evidence, confidence: confidence(bounded) });
            }
        }
    }
    Ok(GroupStructure { kind: GroupKind::Cyclic(generator), evidence, confidence: confidence(false) })
}

/// Whether an exact `None` came from the exponent bound rather than from
/// distinct perfect-power bases.
fn cut_by_bound<S: Scalar>(a: &S, b: &S) -> bool {
    match (a.to_rational(), b.to_rational()) {
        (Some(a), Some(b)) => perfect_power(&a).0 == perfect_power(&b).0,
        _ => true,
    }
}

fn root<S: Scalar>(x: &S, n: u64) -> S {
    let n = u32::try_from(n).expect("exponent bound fits in u32");
    x.nth_root(n)
        .or_else(|| S::from_f64((x.ln() / f64::from(n)).exp()))
        .expect("commensurable exponents divide the perfect-power exponent")
}

/// Integer `k` with `x ≈ λ^k`.
pub fn log_index<S: Scalar>(x: &S, lambda: &S) -> i64 {
    (x.ln() / lambda.ln()).round() as i64
}

/// Exact `λ^k` for integer `k` of either sign.
pub fn rational_power(lambda: &BigRational, k: i64) -> BigRational {
    let magnitude = num_traits::Pow::pow(lambda, k.unsigned_abs());
    if k < 0 {
        magnitude.recip()
    } else {
        magnitude
    }
}
