use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{
    class_location, prefix_location, Deviation, IndexSet, Law, Mode, SchemeError, SchemeSpec, WeightTemplate,
};
use crate::scalar::Scalar;

/// Float-mode tolerance on `Σ μ_n(a) = 1`.
pub const FLOAT_SUM_TOLERANCE: f64 = 1e-12;

/// Largest coverage period (lcm of class steps) that validation will scan.
const MAX_COVERAGE_PERIOD: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Alphabet {
    Finite(usize),
    Infinite,
}

impl Alphabet {
    pub fn is_infinite(self) -> bool {
        matches!(self, Alphabet::Infinite)
    }
}

/// Per-class data derived during validation.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSummary {
    pub alphabet: Alphabet,
    /// Limit of the weight vectors along the class.
    pub limit: Law<BigRational>,
    /// Covers infinitely many coordinates.
    pub infinite: bool,
}

/// A scheme whose invariants have been checked.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedScheme {
    spec: SchemeSpec,
    classes: Vec<ClassSummary>,
}

impl ValidatedScheme {
    pub fn spec(&self) -> &SchemeSpec {
        &self.spec
    }

    pub fn into_spec(self) -> SchemeSpec {
        self.spec
    }

    pub fn mode(&self) -> Mode {
        self.spec.mode
    }

    pub fn prefix_len(&self) -> usize {
        self.spec.prefix.len()
    }

    pub fn summaries(&self) -> &[ClassSummary] {
        &self.classes
    }

    /// `(index, template, summary)` for classes covering infinitely many
    /// coordinates. These alone decide the asymptotic behaviour.
    pub fn infinite_classes(&self) -> impl Iterator<Item = (usize, &WeightTemplate, &ClassSummary)> {
        self.spec
            .classes
            .iter()
            .zip(&self.classes)
            .enumerate()
            .filter(|(_, (_, s))| s.infinite)
            .map(|(i, (c, s))| (i, &c.template, s))
    }

    /// `limsup_n |X_n|`.
    pub fn limsup_alphabet(&self) -> Alphabet {
        self.infinite_classes().map(|(_, _, s)| s.alphabet).max().unwrap_or(Alphabet::Finite(0))
    }

    /// Whether symbol `i` occurs at infinitely many coordinates.
    pub fn recurs(&self, symbol: usize) -> bool {
        match self.limsup_alphabet() {
            Alphabet::Infinite => true,
            Alphabet::Finite(size) => symbol < size,
        }
    }

    pub fn law<S: Scalar>(&self, n: usize) -> Result<Law<S>, SchemeError> {
        self.spec.law(n)
    }

    /// Coordinates covered by finitely supported data: the prefix and every
    /// list-indexed class.
    pub fn finite_coordinates(&self) -> Vec<usize> {
        let mut out: Vec<usize> = (1..=self.spec.prefix.len()).collect();
        for class in &self.spec.classes {
            if let IndexSet::List(list) = &class.indices {
                out.extend(list.iter().copied());
            }
        }
        out.sort_unstable();
        out
    }
}

/// Checks every structural invariant of a scheme.
pub fn validate(spec: &SchemeSpec) -> Result<ValidatedScheme, SchemeError> {
    for (i, weights) in spec.prefix.iter().enumerate() {
        check_vector(weights, spec.mode, &prefix_location(i + 1), true)?;
    }
    let mut summaries = Vec::with_capacity(spec.classes.len());
    for (i, class) in spec.classes.iter().enumerate() {
        let location = class_location(i);
        check_indices(&class.indices, &location)?;
        check_template(&class.template, spec.mode, &location)?;
        summaries.push(ClassSummary {
            alphabet: match class.template.alphabet_size() {
                Some(n) => Alphabet::Finite(n),
                None => Alphabet::Infinite,
            },
            limit: class.template.limit_law(),
            infinite: class.indices.is_infinite(),
        });
    }
    check_coverage(spec)?;
    Ok(ValidatedScheme { spec: spec.clone(), classes: summaries })
}

fn check_sum(sum: &BigRational, mode: Mode, location: &str) -> Result<(), SchemeError> {
    let ok = match mode {
        Mode::Exact => sum.is_one(),
        Mode::Float => (sum.as_f64() - 1.0).abs() <= FLOAT_SUM_TOLERANCE,
    };
    if ok {
        Ok(())
    } else {
        Err(SchemeError::NotNormalized { location: location.to_string(), sum: sum.render() })
    }
}

fn check_vector(weights: &[BigRational], mode: Mode, location: &str, positive: bool) -> Result<(), SchemeError> {
    if weights.len() < 2 {
        return Err(SchemeError::AlphabetTooSmall { location: location.to_string() });
    }
    for (symbol, w) in weights.iter().enumerate() {
        if w.is_negative() || (positive && w.is_zero()) {
            return Err(SchemeError::NonPositiveWeight { location: location.to_string(), symbol });
        }
    }
    let sum = weights.iter().fold(BigRational::zero(), |a, b| a + b);
    check_sum(&sum, mode, location)
}

fn invalid(location: &str, message: impl Into<String>) -> SchemeError {
    SchemeError::InvalidParameter { location: location.to_string(), message: message.into() }
}

fn in_open_unit(x: &BigRational) -> bool {
    x.is_positive() && *x < BigRational::one()
}

fn check_deviation(deviation: &Deviation, location: &str) -> Result<(), SchemeError> {
    match deviation {
        Deviation::Zero => Ok(()),
        Deviation::Geometric { rho } if in_open_unit(rho) => Ok(()),
        Deviation::Geometric { .. } => Err(invalid(location, "geometric deviation needs rho in (0, 1)")),
        Deviation::Power { exponent } if exponent.is_positive() => Ok(()),
        Deviation::Power { .. } => Err(invalid(location, "power deviation needs a positive exponent")),
        Deviation::List(values) => {
            if values.iter().all(|v| !v.is_negative() && *v <= BigRational::one()) {
                Ok(())
            } else {
                Err(invalid(location, "deviation values must lie in [0, 1]"))
            }
        }
    }
}

fn check_template(template: &WeightTemplate, mode: Mode, location: &str) -> Result<(), SchemeError> {
    if mode == Mode::Exact && template.is_transcendental() {
        return Err(SchemeError::InexactTemplate { what: "a transcendental template" });
    }
    match template {
        WeightTemplate::ExplicitFinite(weights) => check_vector(weights, mode, location, true),
        WeightTemplate::GeometricTail { head, tail, ratio } => {
            if !in_open_unit(ratio) {
                return Err(invalid(location, "geometric ratio must lie in (0, 1)"));
            }
            if !tail.is_positive() {
                return Err(SchemeError::NonPositiveWeight { location: location.to_string(), symbol: head.len() });
            }
            if let Some(symbol) = head.iter().position(|w| !w.is_positive()) {
                return Err(SchemeError::NonPositiveWeight { location: location.to_string(), symbol });
            }
            let tail_mass = tail / (BigRational::one() - ratio);
            let sum = head.iter().fold(tail_mass, |a, b| a + b);
            check_sum(&sum, mode, location)
        }
        WeightTemplate::TwoPoint { limit, deviation, .. } => {
            check_deviation(deviation, location)?;
            if limit.is_negative() || *limit > BigRational::one() {
                return Err(invalid(location, "two-point limit must lie in [0, 1]"));
            }
            if limit.is_zero() && !deviation.is_strictly_positive() {
                return Err(SchemeError::NonPositiveWeight { location: location.to_string(), symbol: 1 });
            }
            Ok(())
        }
        WeightTemplate::PerturbedVector { limit, deviation } => {
            check_deviation(deviation, location)?;
            check_vector(limit, mode, location, false)?;
            if let Some(symbol) = limit.iter().position(Zero::is_zero) {
                if !deviation.is_strictly_positive() {
                    return Err(SchemeError::NonPositiveWeight { location: location.to_string(), symbol });
                }
            }
            Ok(())
        }
    }
}

fn check_indices(indices: &IndexSet, location: &str) -> Result<(), SchemeError> {
    match indices {
        IndexSet::Progression { start, step } => {
            if *start == 0 || *step == 0 {
                return Err(invalid(location, "progressions need start >= 1 and step >= 1"));
            }
        }
        IndexSet::List(list) => {
            if list.is_empty() || list.contains(&0) {
                return Err(invalid(location, "index lists must be non-empty and 1-indexed"));
            }
            let mut sorted = list.clone();
            sorted.sort_unstable();
            if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
                return Err(invalid(location, format!("coordinate {} listed twice", w[0])));
            }
        }
    }
    Ok(())
}

fn check_coverage(spec: &SchemeSpec) -> Result<(), SchemeError> {
    let prefix = spec.prefix.len();
    let mut period = 1usize;
    let mut horizon = prefix;
    for class in &spec.classes {
        match &class.indices {
            IndexSet::Progression { start, step } => {
                period = period.lcm(step);
                if period > MAX_COVERAGE_PERIOD {
                    return Err(invalid("classes", "combined progression period is too large to check"));
                }
                horizon = horizon.max(*start);
            }
            IndexSet::List(list) => horizon = horizon.max(list.iter().copied().max().unwrap_or(0)),
        }
    }
    // past the horizon every progression is periodic and every list exhausted
    let horizon = horizon + period;
    let name = |i: usize| class_location(i);
    for n in 1..=horizon {
        let mut owner: Option<String> = (n <= prefix).then(|| "prefix".to_string());
        for (i, class) in spec.classes.iter().enumerate() {
            if class.indices.contains(n) {
                if let Some(first) = owner {
                    return Err(SchemeError::Overlap { coordinate: n, first, second: name(i) });
                }
                owner = Some(name(i));
            }
        }
        if owner.is_none() {
            return Err(SchemeError::CoverageGap { coordinate: n });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::IndexClass;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn class(indices: IndexSet, template: WeightTemplate) -> IndexClass {
        IndexClass { indices, template }
    }

    #[test]
    fn uniform_two_point_is_valid() {
        let spec = SchemeSpec {
            mode: Mode::Exact,
            prefix: vec![],
            classes: vec![class(IndexSet::all_from(1), WeightTemplate::two_point(q(1, 1)))],
        };
        let v = validate(&spec).unwrap();
        assert_eq!(v.limsup_alphabet(), Alphabet::Finite(2));
        assert_eq!(v.law::<BigRational>(17).unwrap(), Law::Finite(vec![q(1, 2), q(1, 2)]));
    }

    #[test]
    fn evens_and_odds_cover() {
        let t = WeightTemplate::ExplicitFinite(vec![q(2, 3), q(1, 3)]);
        let spec = SchemeSpec {
            mode: Mode::Exact,
            prefix: vec![],
            classes: vec![
                class(IndexSet::Progression { start: 1, step: 2 }, t.clone()),
                class(IndexSet::Progression { start: 2, step: 2 }, t),
            ],
        };
        assert!(validate(&spec).is_ok());
    }

    #[test]
    fn zero_weight_is_rejected() {
        let spec = SchemeSpec {
            mode: Mode::Exact,
            prefix: vec![],
            classes: vec![class(
                IndexSet::all_from(1),
                WeightTemplate::ExplicitFinite(vec![q(1, 2), q(1, 2), q(0, 1)]),
            )],
        };
        assert_eq!(
            validate(&spec),
            Err(SchemeError::NonPositiveWeight { location: "classes[0]".into(), symbol: 2 })
        );
    }

    #[test]
    fn gaps_and_overlaps() {
        let t = WeightTemplate::two_point(q(1, 2));
        let gap = SchemeSpec {
            mode: Mode::Exact,
            prefix: vec![],
            classes: vec![class(IndexSet::Progression { start: 1, step: 2 }, t.clone())],
        };
        assert_eq!(validate(&gap), Err(SchemeError::CoverageGap { coordinate: 2 }));
        let overlap = SchemeSpec {
            mode: Mode::Exact,
            prefix: vec![vec![q(1, 2), q(1, 2)]],
            classes: vec![class(IndexSet::all_from(1), t)],
        };
        assert!(matches!(validate(&overlap), Err(SchemeError::Overlap { coordinate: 1, .. })));
    }

    #[test]
    fn unnormalized_and_inexact() {
        let spec = SchemeSpec {
            mode: Mode::Exact,
            prefix: vec![vec![q(1, 2), q(1, 3)]],
            classes: vec![class(IndexSet::all_from(2), WeightTemplate::two_point(q(1, 2)))],
        };
        assert!(matches!(validate(&spec), Err(SchemeError::NotNormalized { .. })));
        let spec = SchemeSpec {
            mode: Mode::Exact,
            prefix: vec![],
            classes: vec![class(
                IndexSet::all_from(1),
                WeightTemplate::TwoPoint {
                    limit: q(1, 2),
                    deviation: Deviation::Power { exponent: q(1, 1) },
                    swapped: false,
                },
            )],
        };
        assert!(matches!(validate(&spec), Err(SchemeError::InexactTemplate { .. })));
        let float = SchemeSpec { mode: Mode::Float, ..spec };
        assert!(validate(&float).is_ok());
    }

    #[test]
    fn geometric_tail_sum() {
        let good = WeightTemplate::GeometricTail { head: vec![], tail: q(1, 2), ratio: q(1, 2) };
        let bad = WeightTemplate::GeometricTail { head: vec![q(1, 2)], tail: q(1, 2), ratio: q(1, 2) };
        let spec = |t| SchemeSpec { mode: Mode::Exact, prefix: vec![], classes: vec![class(IndexSet::all_from(1), t)] };
        let v = validate(&spec(good)).unwrap();
        assert_eq!(v.limsup_alphabet(), Alphabet::Infinite);
        assert!(v.recurs(1000));
        assert!(matches!(validate(&spec(bad)), Err(SchemeError::NotNormalized { .. })));
    }

    #[test]
    fn perturbed_zero_entries_need_positive_deviation() {
        let spec = |d| SchemeSpec {
            mode: Mode::Exact,
            prefix: vec![],
            classes: vec![class(
                IndexSet::all_from(1),
                WeightTemplate::PerturbedVector { limit: vec![q(1, 1), q(0, 1)], deviation: d },
            )],
        };
        assert!(validate(&spec(Deviation::Geometric { rho: q(1, 2) })).is_ok());
        assert!(matches!(validate(&spec(Deviation::Zero)), Err(SchemeError::NonPositiveWeight { .. })));
    }
}
