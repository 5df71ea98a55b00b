//! The three series whose convergence decides I / II₁ / III.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::asymptotics::{SeriesDescriptor, SeriesPart, Shape};
use crate::scalar::Scalar;
use crate::scheme::{truncate_alphabet, Deviation, IndexSet, Law, ValidatedScheme, WeightTemplate};

/// Symbols kept when evaluating a criterion on an infinite alphabet.
const INFINITE_ALPHABET_BUDGET: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Criterion {
    /// `Σ_n (1 - max_a μ_n(a))`
    TypeI,
    /// `Σ_n Σ_a |1 - sqrt(μ_n(a) |X_n|)|² / |X_n|`
    TypeII1,
    /// `Σ_n Σ_{i,j} μ_n(i) μ_n(j) min(|μ_n(i)/μ_n(j) - 1|², C)`
    TypeIII { c: BigRational },
}

impl Criterion {
    pub fn name(&self) -> String {
        match self {
            Criterion::TypeI => "sum_n (1 - max_a mu_n(a))".into(),
            Criterion::TypeII1 => "sum_n sum_a |1 - sqrt(mu_n(a) |X_n|)|^2 / |X_n|".into(),
            Criterion::TypeIII { c } => {
                format!("sum_n sum_ij mu_n(i) mu_n(j) min(|mu_n(i)/mu_n(j) - 1|^2, {})", c.render())
            }
        }
    }

    /// Term for one coordinate. `None` when an exact value is irrational.
    pub fn term<S: Scalar>(&self, weights: &[S]) -> Option<S> {
        match self {
            Criterion::TypeI => {
                let max = weights.iter().cloned().fold(S::zero(), |m, w| if w > m { w } else { m });
                Some(S::one() - max)
            }
            Criterion::TypeII1 => {
                let size = S::from_int(weights.len() as i64);
                let mut total = S::zero();
                for w in weights {
                    let gap = S::one() - (w.clone() * size.clone()).sqrt()?;
                    total = total + gap.clone() * gap;
                }
                Some(total / size)
            }
            Criterion::TypeIII { c } => {
                let c = S::from_rational(c);
                let mut total = S::zero();
                for wi in weights {
                    for wj in weights.iter().filter(|w| !w.is_zero()) {
                        let gap = wi.clone() / wj.clone() - S::one();
                        let sq = gap.clone() * gap;
                        let capped = if sq < c { sq } else { c.clone() };
                        total = total + wi.clone() * wj.clone() * capped;
                    }
                }
                Some(total)
            }
        }
    }

    /// Whether the term vanishes at this limit law. Decided structurally so
    /// no rounding is involved.
    fn vanishes_at(&self, limit: &Law<BigRational>) -> bool {
        let Law::Finite(w) = limit else {
            // a geometric law has max < 1 and unequal positive weights
            return false;
        };
        match self {
            Criterion::TypeI => w.iter().any(One::is_one),
            Criterion::TypeII1 => w.windows(2).all(|p| p[0] == p[1]),
            Criterion::TypeIII { .. } => {
                let mut positive = w.iter().filter(|x| !x.is_zero());
                let first = positive.next();
                positive.all(|x| Some(x) == first)
            }
        }
    }
}

fn law_weights<S: Scalar>(law: &Law<S>) -> Vec<S> {
    match law {
        Law::Finite(w) => w.clone(),
        Law::Geometric { .. } => {
            let budget = S::from_f64(INFINITE_ALPHABET_BUDGET)
                .unwrap_or_else(|| S::one() / S::from_int(1_000_000_000_000));
            truncate_alphabet(law, &budget).map(|t| t.weights).unwrap_or_default()
        }
    }
}

/// The law is the same at every coordinate of the class.
fn is_constant(template: &WeightTemplate) -> bool {
    match template {
        WeightTemplate::ExplicitFinite(_) | WeightTemplate::GeometricTail { .. } => true,
        WeightTemplate::TwoPoint { deviation, .. } => deviation.is_zero(),
        WeightTemplate::PerturbedVector { limit, deviation } => {
            deviation.is_zero() || limit.windows(2).all(|p| p[0] == p[1])
        }
    }
}

fn shape_for(criterion: &Criterion, template: &WeightTemplate) -> Shape {
    let limit = template.limit_law();
    if !criterion.vanishes_at(&limit) {
        let value = criterion.term::<f64>(&law_weights(&limit.to_f64())).unwrap_or(f64::NAN);
        return Shape::Positive { limit: value };
    }
    if is_constant(template) {
        return Shape::Zero;
    }
    // near the limit the term is linear in ε_n when the limit has empty
    // symbols, quadratic otherwise
    let has_zero = limit.weights_upto(0).iter().any(Zero::is_zero)
        || matches!(template, WeightTemplate::TwoPoint { limit, .. } if limit.is_zero());
    let order = if has_zero { 1 } else { 2 };
    match template.deviation() {
        Some(Deviation::Geometric { rho }) => Shape::Geometric { rho: rho.clone(), order },
        Some(Deviation::Power { exponent }) => Shape::Power { exponent: exponent.clone(), order },
        Some(Deviation::List(_)) => Shape::Finite,
        _ => Shape::Zero,
    }
}

fn part_for(
    criterion: &Criterion,
    label: String,
    indices: IndexSet,
    source: Source,
    shape: Shape,
) -> SeriesPart {
    let (c1, c2, s1, s2) = (criterion.clone(), criterion.clone(), source.clone(), source);
    let term = Arc::new(move |n: usize| {
        s1.law::<f64>(n).ok().and_then(|law| c1.term(&law_weights(&law))).unwrap_or(f64::NAN)
    });
    let exact = Arc::new(move |n: usize| {
        let law = s2.law::<BigRational>(n).ok()?;
        law.alphabet_size()?;
        c2.term(&law_weights(&law))
    });
    SeriesPart::new(label, indices, shape, term).with_exact_term(exact)
}

#[derive(Clone)]
enum Source {
    Fixed(Vec<BigRational>),
    Template(WeightTemplate),
}

impl Source {
    fn law<S: Scalar>(&self, n: usize) -> Result<Law<S>, crate::scheme::SchemeError> {
        match self {
            Source::Fixed(w) => Ok(Law::Finite(w.iter().map(S::from_rational).collect())),
            Source::Template(t) => t.law(n),
        }
    }
}

/// Series for `criterion` over the whole scheme: one part per prefix
/// coordinate and one per class.
pub fn series(spec: &ValidatedScheme, criterion: &Criterion) -> SeriesDescriptor {
    let mut parts = Vec::new();
    for (i, weights) in spec.spec().prefix.iter().enumerate() {
        let n = i + 1;
        parts.push(part_for(
            criterion,
            format!("prefix coordinate {n}"),
            IndexSet::List(vec![n]),
            Source::Fixed(weights.clone()),
            Shape::Finite,
        ));
    }
    for (i, class) in spec.spec().classes.iter().enumerate() {
        let shape = shape_for(criterion, &class.template);
        let label = format!("class {i} ({}, n in {})", class.template.kind_name(), class.indices.describe());
        let mut part = part_for(criterion, label, class.indices.clone(), Source::Template(class.template.clone()), shape);
        if let Some(Deviation::List(values)) = class.template.deviation() {
            part = part.with_support_end(values.len());
        }
        if let (Criterion::TypeI, Shape::Geometric { rho, order: 1 }) = (criterion, &part.shape) {
            if let WeightTemplate::PerturbedVector { limit, .. } = &class.template {
                // 1 - max((1 - ε) e_0 + ε/A) = ε (1 - 1/A) exactly
                let size = BigRational::from_integer((limit.len() as i64).into());
                let coefficient = BigRational::one() - size.recip();
                let rho = rho.clone();
                part = part.with_exact_geometric(coefficient, rho);
            }
        }
        parts.push(part);
    }
    SeriesDescriptor::new(criterion.name(), parts)
}

/// `Σ_{n ∈ class} ε_n` for one two-point class.
pub fn deviation_series(label: String, indices: &IndexSet, deviation: &Deviation) -> SeriesDescriptor {
    let shape = match deviation {
        Deviation::Zero => Shape::Zero,
        Deviation::Geometric { rho } => Shape::Geometric { rho: rho.clone(), order: 1 },
        Deviation::Power { exponent } => Shape::Power { exponent: exponent.clone(), order: 1 },
        Deviation::List(_) => Shape::Finite,
    };
    let (d1, d2) = (deviation.clone(), deviation.clone());
    let mut part = SeriesPart::new(label, indices.clone(), shape, Arc::new(move |n| d1.value_f64(n)))
        .with_exact_term(Arc::new(move |n| d2.exact(n)));
    match deviation {
        Deviation::List(values) => part = part.with_support_end(values.len()),
        Deviation::Geometric { rho } => part = part.with_exact_geometric(BigRational::one(), rho.clone()),
        _ => {}
    }
    SeriesDescriptor::new("sum of epsilon_n", vec![part])
}
