use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{validate, IndexClass, IndexSet, Mode, SchemeError, SchemeSpec, ValidatedScheme, WeightTemplate};

/// Symbol permutations applied by [`normalize`]: new symbol `i` was old
/// symbol `perm[i]`. Symbols past the end of a permutation are unmoved.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Normalization {
    pub prefix: Vec<Vec<usize>>,
    pub classes: Vec<Vec<usize>>,
}

impl Normalization {
    pub fn is_identity(&self) -> bool {
        self.prefix.iter().chain(&self.classes).all(|p| p.iter().enumerate().all(|(i, &j)| i == j))
    }
}

/// Rescales every weight vector to sum 1 and reorders symbols so that
/// weights never increase, then validates the result.
pub fn normalize(spec: &SchemeSpec) -> Result<(ValidatedScheme, Normalization), SchemeError> {
    let mut record = Normalization::default();
    let mut prefix = Vec::with_capacity(spec.prefix.len());
    for weights in &spec.prefix {
        let (sorted, perm) = sort_descending(&rescale(weights));
        prefix.push(sorted);
        record.prefix.push(perm);
    }
    let mut classes = Vec::with_capacity(spec.classes.len());
    for class in &spec.classes {
        let (template, perm) = normalize_template(&class.template);
        classes.push(IndexClass { indices: class.indices.clone(), template });
        record.classes.push(perm);
    }
    let normalized = SchemeSpec { mode: spec.mode, prefix, classes };
    Ok((validate(&normalized)?, record))
}

fn rescale(weights: &[BigRational]) -> Vec<BigRational> {
    let sum = weights.iter().fold(BigRational::zero(), |a, b| a + b);
    if sum.is_positive() && !sum.is_one() {
        weights.iter().map(|w| w / &sum).collect()
    } else {
        weights.to_vec()
    }
}

/// Stable descending sort; ties keep their original order.
fn sort_descending(weights: &[BigRational]) -> (Vec<BigRational>, Vec<usize>) {
    let mut perm: Vec<usize> = (0..weights.len()).collect();
    perm.sort_by(|&a, &b| weights[b].cmp(&weights[a]));
    (perm.iter().map(|&i| weights[i].clone()).collect(), perm)
}

fn normalize_template(template: &WeightTemplate) -> (WeightTemplate, Vec<usize>) {
    match template {
        WeightTemplate::ExplicitFinite(w) => {
            let (sorted, perm) = sort_descending(&rescale(w));
            (WeightTemplate::ExplicitFinite(sorted), perm)
        }
        WeightTemplate::PerturbedVector { limit, deviation } => {
            // (1 - ε) v + ε/A preserves the order of v
            let (sorted, perm) = sort_descending(&rescale(limit));
            (WeightTemplate::PerturbedVector { limit: sorted, deviation: deviation.clone() }, perm)
        }
        WeightTemplate::TwoPoint { limit, deviation, swapped } => {
            let perm = if *swapped { vec![1, 0] } else { vec![0, 1] };
            (WeightTemplate::TwoPoint { limit: limit.clone(), deviation: deviation.clone(), swapped: false }, perm)
        }
        WeightTemplate::GeometricTail { head, tail, ratio } => normalize_geometric(head, tail, ratio),
    }
}

/// Moves tail terms heavier than the lightest head weight into the head so
/// that the list is descending, then sorts the head.
fn normalize_geometric(head: &[BigRational], tail: &BigRational, ratio: &BigRational) -> (WeightTemplate, Vec<usize>) {
    let one = BigRational::one();
    let mass = head.iter().fold(tail / (&one - ratio), |a, b| a + b);
    let scale = |w: &BigRational| if mass.is_positive() { w / &mass } else { w.clone() };
    let mut head: Vec<BigRational> = head.iter().map(scale).collect();
    let mut tail = scale(tail);
    if ratio.is_positive() && *ratio < one {
        if let Some(floor) = head.iter().min().cloned() {
            while tail > floor {
                head.push(tail.clone());
                tail *= ratio;
            }
        }
    }
    let (head, perm) = sort_descending(&head);
    (WeightTemplate::GeometricTail { head, tail, ratio: ratio.clone() }, perm)
}

/// Scheme whose odd coordinates `2n - 1` carry `a`'s coordinate `n` and
/// whose even coordinates `2n` carry `b`'s.
pub fn interleave(a: &SchemeSpec, b: &SchemeSpec) -> Result<ValidatedScheme, SchemeError> {
    let mode = if a.mode == Mode::Exact && b.mode == Mode::Exact { Mode::Exact } else { Mode::Float };
    let mut classes = Vec::new();
    for (spec, offset) in [(a, 1usize), (b, 0usize)] {
        let place = |n: usize| 2 * n - offset;
        for (i, weights) in spec.prefix.iter().enumerate() {
            classes.push(IndexClass {
                indices: IndexSet::List(vec![place(i + 1)]),
                template: WeightTemplate::ExplicitFinite(weights.clone()),
            });
        }
        for class in &spec.classes {
            let indices = match &class.indices {
                IndexSet::Progression { start, step } => IndexSet::Progression { start: place(*start), step: 2 * step },
                IndexSet::List(list) => IndexSet::List(list.iter().map(|&n| place(n)).collect()),
            };
            classes.push(IndexClass { indices, template: class.template.clone() });
        }
    }
    validate(&SchemeSpec { mode, prefix: Vec::new(), classes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{Deviation, Law};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn single(template: WeightTemplate) -> SchemeSpec {
        SchemeSpec { mode: Mode::Exact, prefix: vec![], classes: vec![IndexClass { indices: IndexSet::all_from(1), template }] }
    }

    #[test]
    fn swaps_and_records() {
        let (v, record) = normalize(&single(WeightTemplate::ExplicitFinite(vec![q(1, 3), q(2, 3)]))).unwrap();
        assert_eq!(v.spec().classes[0].template, WeightTemplate::ExplicitFinite(vec![q(2, 3), q(1, 3)]));
        assert_eq!(record.classes[0], vec![1, 0]);
        assert!(!record.is_identity());
    }

    #[test]
    fn sorted_input_is_untouched() {
        let spec = single(WeightTemplate::ExplicitFinite(vec![q(2, 3), q(1, 3)]));
        let (v, record) = normalize(&spec).unwrap();
        assert_eq!(v.spec(), &spec);
        assert!(record.is_identity());
    }

    #[test]
    fn rescales_unnormalized_vectors() {
        let (v, _) = normalize(&single(WeightTemplate::ExplicitFinite(vec![q(2, 1), q(1, 1)]))).unwrap();
        assert_eq!(v.spec().classes[0].template, WeightTemplate::ExplicitFinite(vec![q(2, 3), q(1, 3)]));
    }

    #[test]
    fn geometric_head_absorbs_heavy_tail() {
        // head 1/8, tail 1/2 * (1/2)^j: total 1/8 + 1 > 1, rescaled by 8/9
        let spec = single(WeightTemplate::GeometricTail { head: vec![q(1, 8)], tail: q(1, 2), ratio: q(1, 2) });
        let (v, record) = normalize(&spec).unwrap();
        let law: Law<BigRational> = v.law(1).unwrap();
        assert!(law.is_descending());
        assert_eq!(record.classes[0], vec![1, 2, 0]);
        let again = normalize(v.spec()).unwrap();
        assert_eq!(again.0, v);
        assert!(again.1.is_identity());
    }

    #[test]
    fn unswaps_two_point() {
        let spec = single(WeightTemplate::TwoPoint { limit: q(1, 2), deviation: Deviation::Zero, swapped: true });
        let (v, record) = normalize(&spec).unwrap();
        assert_eq!(v.law::<BigRational>(3).unwrap(), Law::Finite(vec![q(2, 3), q(1, 3)]));
        assert_eq!(record.classes[0], vec![1, 0]);
    }

    #[test]
    fn interleave_places_odd_and_even() {
        let a = single(WeightTemplate::two_point(q(1, 2))).with_prefix(vec![vec![q(3, 4), q(1, 4)]]);
        let a = SchemeSpec {
            classes: vec![IndexClass { indices: IndexSet::all_from(2), template: WeightTemplate::two_point(q(1, 2)) }],
            ..a
        };
        let b = single(WeightTemplate::two_point(q(1, 3)));
        let v = interleave(&a, &b).unwrap();
        assert_eq!(v.law::<BigRational>(1).unwrap(), Law::Finite(vec![q(3, 4), q(1, 4)]));
        assert_eq!(v.law::<BigRational>(3).unwrap(), Law::Finite(vec![q(2, 3), q(1, 3)]));
        assert_eq!(v.law::<BigRational>(4).unwrap(), Law::Finite(vec![q(3, 4), q(1, 4)]));
    }
}
