use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::scalar::Scalar;
use crate::scheme::{Alphabet, Deviation, IndexSet, Law, Mode, ValidatedScheme, WeightTemplate};

/// Values at most this far apart are merged when clustering finitely many
/// float-mode ratios; exact mode merges only equal values.
pub const FINITE_CLUSTER_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClusterError {
    #[error("symbol {0} occurs at only finitely many coordinates")]
    SymbolFinite(usize),
    #[error("class {0} does not have a two-symbol alphabet")]
    NotTwoPoint(usize),
}

/// A cluster point and the infinite classes converging to it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterPoint {
    #[serde(serialize_with = "crate::report::rational")]
    pub value: BigRational,
    pub classes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterReport {
    /// Cluster points, ascending. Only infinite classes contribute.
    pub points: Vec<ClusterPoint>,
    /// Distinct values taken at finitely many coordinates (prefix and list
    /// classes), merged within [`FINITE_CLUSTER_EPSILON`]. These are not
    /// cluster points and never influence a verdict.
    #[serde(serialize_with = "crate::report::rationals")]
    pub finite_values: Vec<BigRational>,
    /// `liminf` of the set read as a sequence; `None` when empty.
    #[serde(serialize_with = "crate::report::opt_rational")]
    pub liminf: Option<BigRational>,
    /// 0 is a cluster point, or some finite value is within
    /// [`FINITE_CLUSTER_EPSILON`] of 0.
    pub contains_zero: bool,
}

impl ClusterReport {
    fn build(mut raw: Vec<(BigRational, usize)>, finite: Vec<BigRational>, mode: Mode) -> Self {
        raw.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut points: Vec<ClusterPoint> = Vec::new();
        for (value, class) in raw {
            match points.last_mut() {
                Some(last) if last.value == value => {
                    if !last.classes.contains(&class) {
                        last.classes.push(class);
                    }
                }
                _ => points.push(ClusterPoint { value, classes: vec![class] }),
            }
        }
        let finite_values = merge_finite(finite, mode);
        let contains_zero = points.first().is_some_and(|p| p.value.is_zero())
            || finite_values.first().is_some_and(|v| v.as_f64() <= FINITE_CLUSTER_EPSILON);
        let liminf = points.first().map(|p| p.value.clone());
        ClusterReport { points, finite_values, liminf, contains_zero }
    }

    pub fn values(&self) -> Vec<BigRational> {
        self.points.iter().map(|p| p.value.clone()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn merge_finite(mut values: Vec<BigRational>, mode: Mode) -> Vec<BigRational> {
    values.sort();
    let mut out: Vec<BigRational> = Vec::new();
    for v in values {
        let merge = match (out.last(), mode) {
            (Some(last), Mode::Exact) => *last == v,
            (Some(last), Mode::Float) => (v.as_f64() - last.as_f64()).abs() <= FINITE_CLUSTER_EPSILON,
            (None, _) => false,
        };
        if !merge {
            out.push(v);
        }
    }
    out
}

/// Limit of `μ_m(i) / μ_m(0)` along a class.
fn limit_ratio(law: &Law<BigRational>, symbol: usize) -> Option<BigRational> {
    let top = law.weight(0)?;
    Some(law.weight(symbol)? / top)
}

/// Ratios `μ_n(i) / μ_n(0)` at every finitely covered coordinate, for the
/// symbols selected by `keep`. Float-mode templates are evaluated in f64 and
/// read back as decimals.
fn finite_ratios(spec: &ValidatedScheme, keep: impl Fn(usize) -> bool) -> Vec<BigRational> {
    let mut out = Vec::new();
    for n in spec.finite_coordinates() {
        let weights: Vec<BigRational> = match spec.law::<BigRational>(n) {
            Ok(law) => law.weights_upto(0),
            Err(_) => match spec.law::<f64>(n) {
                Ok(law) => law.weights_upto(0).iter().filter_map(|w| w.to_rational()).collect(),
                Err(_) => continue,
            },
        };
        if let Some(top) = weights.first() {
            out.extend(weights.iter().enumerate().filter(|(i, _)| *i > 0 && keep(*i)).map(|(_, w)| w / top));
        }
    }
    out
}

/// Cluster points of `{μ_m(i) / μ_m(0) : i ∈ X_m}` for a recurring symbol.
pub fn cluster_set_m_i(spec: &ValidatedScheme, symbol: usize) -> Result<ClusterReport, ClusterError> {
    if !spec.recurs(symbol) {
        return Err(ClusterError::SymbolFinite(symbol));
    }
    let raw = spec
        .infinite_classes()
        .filter_map(|(i, _, summary)| limit_ratio(&summary.limit, symbol).map(|r| (r, i)))
        .collect();
    Ok(ClusterReport::build(raw, finite_ratios(spec, |s| s == symbol), spec.mode()))
}

/// Ratios of symbols that occur at only finitely many coordinates.
pub fn cluster_set_m_f(spec: &ValidatedScheme) -> ClusterReport {
    ClusterReport::build(Vec::new(), finite_ratios(spec, |s| !spec.recurs(s)), spec.mode())
}

/// Union of the cluster sets of `𝓜_i` over recurring symbols `i >= 1`,
/// together with `𝓜_F`. Infinite alphabets contribute the ratios of every
/// head symbol and of the first tail symbols; the remaining tail ratios
/// accumulate only at 0, which is flagged.
pub fn combined_clusters(spec: &ValidatedScheme) -> ClusterReport {
    let mut raw = Vec::new();
    let mut zero_limit = Vec::new();
    for (i, template, summary) in spec.infinite_classes() {
        let shown = match (template, summary.alphabet) {
            (WeightTemplate::GeometricTail { head, .. }, _) => head.len() + 2,
            (_, Alphabet::Finite(size)) => size,
            (_, Alphabet::Infinite) => 0,
        };
        for symbol in 1..shown {
            if let Some(r) = limit_ratio(&summary.limit, symbol) {
                raw.push((r, i));
            }
        }
        if summary.alphabet.is_infinite() {
            zero_limit.push(i);
        }
    }
    let finite = finite_ratios(spec, |_| true);
    let mut report = ClusterReport::build(raw, finite, spec.mode());
    if !zero_limit.is_empty() {
        if report.points.first().is_some_and(|p| p.value.is_zero()) {
            report.points[0].classes.extend(zero_limit);
        } else {
            report.points.insert(0, ClusterPoint { value: BigRational::zero(), classes: zero_limit });
        }
        report.liminf = Some(BigRational::zero());
        report.contains_zero = true;
    }
    report
}

/// `inf_{i ∈ 𝓝, i >= 1} liminf 𝓜_i`. Any infinite alphabet gives 0 because
/// its ratios `q^j` tend to 0 as `j` grows.
pub fn inf_liminf(spec: &ValidatedScheme) -> BigRational {
    let mut best: Option<BigRational> = None;
    for (_, _, summary) in spec.infinite_classes() {
        if summary.alphabet.is_infinite() {
            return BigRational::zero();
        }
        let size = summary.limit.alphabet_size().unwrap_or(0);
        for symbol in 1..size {
            if let Some(r) = limit_ratio(&summary.limit, symbol) {
                if best.as_ref().is_none_or(|b| r < *b) {
                    best = Some(r);
                }
            }
        }
    }
    best.unwrap_or_else(BigRational::one)
}

/// How the `ε_n` of one class relate to its template deviation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonRelation {
    /// `ε_n` is exactly the template deviation.
    Exact,
    /// `ε_n / deviation_n` tends to a positive constant.
    Comparable,
}

/// The `ε_n` family of one two-point class.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonFamily {
    pub class: usize,
    pub indices: IndexSet,
    pub deviation: Deviation,
    pub relation: EpsilonRelation,
}

/// Classes sharing one limit `λ = lim λ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaPart {
    pub lambda: BigRational,
    pub families: Vec<EpsilonFamily>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaClusters {
    pub report: ClusterReport,
    /// Ascending in `λ`.
    pub parts: Vec<LambdaPart>,
}

impl LambdaClusters {
    pub fn lambdas(&self) -> Vec<BigRational> {
        self.parts.iter().map(|p| p.lambda.clone()).collect()
    }

    pub fn part(&self, lambda: &BigRational) -> Option<&LambdaPart> {
        self.parts.iter().find(|p| p.lambda == *lambda)
    }
}

/// `λ_n = μ_n(1) / μ_n(0)` on a scheme whose infinite classes all have two
/// symbols, written as `λ e^{-ε_n}` (or `1 - e^{-ε_n}` when `λ = 0`).
pub fn lambda_clusters(spec: &ValidatedScheme) -> Result<LambdaClusters, ClusterError> {
    let mut parts: Vec<LambdaPart> = Vec::new();
    let mut raw = Vec::new();
    for (i, template, summary) in spec.infinite_classes() {
        if summary.alphabet != Alphabet::Finite(2) {
            return Err(ClusterError::NotTwoPoint(i));
        }
        let indices = spec.spec().classes[i].indices.clone();
        let (lambda, deviation, relation) = match template {
            WeightTemplate::TwoPoint { limit, deviation, .. } => {
                (limit.clone(), deviation.clone(), EpsilonRelation::Exact)
            }
            WeightTemplate::PerturbedVector { deviation, .. } => {
                // λ_n - λ is a nonzero multiple of ε_n up to higher order
                let lambda = limit_ratio(&summary.limit, 1).expect("two symbols");
                let relation = if deviation.is_zero() { EpsilonRelation::Exact } else { EpsilonRelation::Comparable };
                (lambda, deviation.clone(), relation)
            }
            other => {
                let ratio = limit_ratio(&other.limit_law(), 1).expect("two symbols");
                (ratio, Deviation::Zero, EpsilonRelation::Exact)
            }
        };
        let lambda = if lambda > BigRational::one() { lambda.recip() } else { lambda };
        raw.push((lambda.clone(), i));
        let family = EpsilonFamily { class: i, indices, deviation, relation };
        match parts.iter_mut().find(|p| p.lambda == lambda) {
            Some(part) => part.families.push(family),
            None => parts.push(LambdaPart { lambda, families: vec![family] }),
        }
    }
    parts.sort_by(|a, b| a.lambda.cmp(&b.lambda));
    let finite = finite_ratios(spec, |s| s == 1);
    Ok(LambdaClusters { report: ClusterReport::build(raw, finite, spec.mode()), parts })
}
