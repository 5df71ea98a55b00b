//! Convergence of non-negative series built from closed-form templates.
//!
//! A series is a sum of parts, one per index class. Each part carries the
//! asymptotic shape of its terms, which the rule table turns into a verdict.
//! Numeric partial sums are only ever evidence; they never certify
//! convergence or divergence on their own.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::scalar::Scalar;
use crate::scheme::IndexSet;

/// Partial-sum horizon for parts without a closed form.
pub const N_MAX: usize = 1_000_000;

/// Asymptotic form of the terms of one part.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Every term is 0.
    Zero,
    /// Only finitely many terms are nonzero.
    Finite,
    /// Terms tend to a positive limit.
    Positive { limit: f64 },
    /// Terms are comparable to `(ρ^n)^order`.
    Geometric { rho: BigRational, order: u32 },
    /// Terms are comparable to `(n^{-p})^order`.
    Power { exponent: BigRational, order: u32 },
    /// No closed form.
    Opaque,
}

impl Shape {
    fn describe(&self) -> String {
        match self {
            Shape::Zero => "identically zero".into(),
            Shape::Finite => "finitely many nonzero terms".into(),
            Shape::Positive { limit } => format!("terms tend to {limit:.6e} > 0"),
            Shape::Geometric { rho, order } => format!("terms ~ ({})^({order}n), geometric", rho.render()),
            Shape::Power { exponent, order } => format!("terms ~ n^-({}*{order})", exponent.render()),
            Shape::Opaque => "no closed form".into(),
        }
    }
}

pub type TermFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;
pub type ExactTermFn = Arc<dyn Fn(usize) -> Option<BigRational> + Send + Sync>;

/// Terms of a series over one index class.
#[derive(Clone)]
pub struct SeriesPart {
    pub label: String,
    pub indices: IndexSet,
    pub shape: Shape,
    /// Term value at coordinate `n`, for partial sums and oracles.
    pub term: TermFn,
    /// Exact term at `n`, when rational.
    pub exact_term: Option<ExactTermFn>,
    /// `term_n = c ρ^n` exactly on the class; enables a closed-form sum.
    pub exact_geometric: Option<(BigRational, BigRational)>,
    /// Last coordinate with a possibly nonzero term, for `Finite` shapes.
    pub support_end: Option<usize>,
}

impl fmt::Debug for SeriesPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeriesPart")
            .field("label", &self.label)
            .field("indices", &self.indices)
            .field("shape", &self.shape)
            .field("exact_geometric", &self.exact_geometric)
            .field("support_end", &self.support_end)
            .finish()
    }
}

impl SeriesPart {
    pub fn new(label: impl Into<String>, indices: IndexSet, shape: Shape, term: TermFn) -> Self {
        SeriesPart {
            label: label.into(),
            indices,
            shape,
            term,
            exact_term: None,
            exact_geometric: None,
            support_end: None,
        }
    }

    pub fn with_exact_term(mut self, exact: ExactTermFn) -> Self {
        self.exact_term = Some(exact);
        self
    }

    pub fn with_exact_geometric(mut self, coefficient: BigRational, rho: BigRational) -> Self {
        self.exact_geometric = Some((coefficient, rho));
        self
    }

    pub fn with_support_end(mut self, end: usize) -> Self {
        self.support_end = Some(end);
        self
    }

    /// Coordinates of the part that can carry a nonzero term, if finitely many.
    fn finite_support(&self) -> Option<Vec<usize>> {
        match (&self.indices, &self.shape, self.support_end) {
            (IndexSet::List(list), _, _) => {
                let mut list = list.clone();
                list.sort_unstable();
                Some(list)
            }
            (_, Shape::Zero, _) => Some(Vec::new()),
            (indices, Shape::Finite, Some(end)) => Some(indices.members_upto(end)),
            _ => None,
        }
    }

    fn verdict(&self) -> PartVerdict {
        if !self.indices.is_infinite() {
            return PartVerdict::Summable("finitely many coordinates".into());
        }
        let why = self.shape.describe();
        match &self.shape {
            Shape::Zero | Shape::Finite => PartVerdict::Summable(why),
            Shape::Geometric { .. } => PartVerdict::Summable(format!("{why} series")),
            Shape::Positive { .. } => PartVerdict::Divergent(format!("{why} on infinitely many coordinates")),
            Shape::Power { exponent, order } => {
                let p = exponent * BigRational::from_integer((*order).into());
                if p > BigRational::one() {
                    PartVerdict::Summable(format!("{why}, p-series with p = {} > 1", p.render()))
                } else if p.is_one() {
                    PartVerdict::Divergent(format!("{why}, harmonic comparison"))
                } else {
                    PartVerdict::Divergent(format!("{why}, p-series with p = {} <= 1", p.render()))
                }
            }
            Shape::Opaque => PartVerdict::Unknown,
        }
    }

    /// `Σ term_n` over the part, exactly, when a closed form is known.
    fn exact_sum(&self) -> Option<BigRational> {
        if self.shape == Shape::Zero {
            return Some(BigRational::zero());
        }
        if let Some(support) = self.finite_support() {
            let exact = self.exact_term.as_ref()?;
            return support.into_iter().map(|n| exact(n)).sum();
        }
        let (c, rho) = self.exact_geometric.as_ref()?;
        match self.indices {
            IndexSet::Progression { start, step } => {
                let first = num_traits::Pow::pow(rho, start);
                let stride = num_traits::Pow::pow(rho, step);
                Some(c * first / (BigRational::one() - stride))
            }
            IndexSet::List(_) => None,
        }
    }

    /// `Σ_{n <= limit} term_n` in f64.
    pub fn partial_sum(&self, limit: usize) -> f64 {
        self.indices.members_upto(limit).into_iter().map(|n| (self.term)(n)).sum()
    }
}

enum PartVerdict {
    Summable(String),
    Divergent(String),
    Unknown,
}

/// A non-negative series `Σ_n term_n`, split by index class.
#[derive(Debug, Clone)]
pub struct SeriesDescriptor {
    pub name: String,
    pub parts: Vec<SeriesPart>,
}

impl SeriesDescriptor {
    pub fn new(name: impl Into<String>, parts: Vec<SeriesPart>) -> Self {
        SeriesDescriptor { name: name.into(), parts }
    }

    /// Term at coordinate `n`; 0 when no part covers `n`.
    pub fn term(&self, n: usize) -> f64 {
        self.parts.iter().find(|p| p.indices.contains(n)).map_or(0.0, |p| (p.term)(n))
    }

    pub fn partial_sum(&self, limit: usize) -> f64 {
        self.parts.iter().map(|p| p.partial_sum(limit)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Summable,
    Divergent,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Summable => "summable",
            Verdict::Divergent => "divergent",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummabilityVerdict {
    pub series: String,
    pub verdict: Verdict,
    /// Closed-form value of a summable series, when every part has one.
    #[serde(serialize_with = "crate::report::opt_rational")]
    pub exact_sum: Option<BigRational>,
    /// `(N, Σ_{n <= N})` for inconclusive series.
    pub partial_sum: Option<(usize, f64)>,
    /// One line per part, naming the rule applied.
    pub evidence: Vec<String>,
}

impl SummabilityVerdict {
    /// Verdict recorded without a series, e.g. when a test does not apply.
    pub fn fixed(series: impl Into<String>, verdict: Verdict, evidence: impl Into<String>) -> Self {
        SummabilityVerdict {
            series: series.into(),
            verdict,
            exact_sum: None,
            partial_sum: None,
            evidence: vec![evidence.into()],
        }
    }
}

/// Applies the rule table to every part of `series`.
pub fn summability(series: &SeriesDescriptor) -> SummabilityVerdict {
    summability_with_horizon(series, N_MAX)
}

pub fn summability_with_horizon(series: &SeriesDescriptor, horizon: usize) -> SummabilityVerdict {
    let mut evidence = Vec::new();
    let mut divergent = false;
    let mut unknown = false;
    for part in &series.parts {
        let line = match part.verdict() {
            PartVerdict::Summable(why) => format!("{}: summable ({why})", part.label),
            PartVerdict::Divergent(why) => {
                divergent = true;
                format!("{}: divergent ({why})", part.label)
            }
            PartVerdict::Unknown => {
                unknown = true;
                format!("{}: no rule applies", part.label)
            }
        };
        evidence.push(line);
    }
    let verdict = if divergent {
        Verdict::Divergent
    } else if unknown {
        Verdict::Inconclusive
    } else {
        Verdict::Summable
    };
    let exact_sum = match verdict {
        Verdict::Summable => series
            .parts
            .iter()
            .map(SeriesPart::exact_sum)
            .try_fold(BigRational::zero(), |acc, s| s.map(|s| acc + s)),
        _ => None,
    };
    let partial_sum = (verdict == Verdict::Inconclusive).then(|| (horizon, series.partial_sum(horizon)));
    SummabilityVerdict { series: series.name.clone(), verdict, exact_sum, partial_sum, evidence }
}
