//! ITPFI factor data ↔ Bernoulli scheme.
//!
//! A factor coordinate is the eigenvalue list of its density matrix. The
//! matching scheme coordinate has one symbol per nonzero eigenvalue, with
//! weights in decreasing order.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{
    class_location, normalize, prefix_location, Deviation, IndexClass, IndexSet, Mode, Normalization, SchemeError,
    SchemeSpec, ValidatedScheme, WeightTemplate,
};

#[derive(Debug, Clone, PartialEq)]
pub struct FactorClass {
    pub indices: IndexSet,
    /// Eigenvalues at each coordinate of the class; explicit lists may be
    /// unnormalized and may contain zeros.
    pub spectrum: WeightTemplate,
}

/// Per-coordinate eigenvalue lists of an ITPFI factor.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorSpec {
    pub mode: Mode,
    pub prefix: Vec<Vec<BigRational>>,
    pub classes: Vec<FactorClass>,
}

impl FactorSpec {
    /// Canonical form: lists rescaled, zeros dropped, sorted descending.
    pub fn normalized(&self) -> Result<FactorSpec, SchemeError> {
        let (scheme, _) = factor_to_scheme(self)?;
        Ok(scheme_to_factor(scheme.spec()))
    }
}

fn clean_spectrum(values: &[BigRational], location: &str) -> Result<Vec<BigRational>, SchemeError> {
    if values.iter().any(Signed::is_negative) || values.iter().all(Zero::is_zero) {
        return Err(SchemeError::InvalidSpectrum { location: location.to_string() });
    }
    let kept: Vec<BigRational> = values.iter().filter(|v| v.is_positive()).cloned().collect();
    if kept.len() < 2 {
        return Err(SchemeError::AlphabetTooSmall { location: location.to_string() });
    }
    Ok(kept)
}

/// Scheme whose symbols are the nonzero eigenvalues, heaviest first. The
/// returned [`Normalization`] records how the nonzero eigenvalues were
/// reordered.
pub fn factor_to_scheme(factor: &FactorSpec) -> Result<(ValidatedScheme, Normalization), SchemeError> {
    let prefix = factor
        .prefix
        .iter()
        .enumerate()
        .map(|(i, values)| clean_spectrum(values, &prefix_location(i + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut classes = Vec::with_capacity(factor.classes.len());
    let mut two_point_swaps = Vec::new();
    for (i, class) in factor.classes.iter().enumerate() {
        let template = match &class.spectrum {
            WeightTemplate::ExplicitFinite(values) => {
                let kept = clean_spectrum(values, &class_location(i))?;
                if kept.len() == 2 {
                    let (heavy, light) = if kept[0] >= kept[1] { (0, 1) } else { (1, 0) };
                    two_point_swaps.push((i, vec![heavy, light]));
                    WeightTemplate::two_point(&kept[light] / &kept[heavy])
                } else {
                    WeightTemplate::ExplicitFinite(kept)
                }
            }
            WeightTemplate::PerturbedVector { limit, deviation } => {
                if limit.iter().any(Signed::is_negative) || limit.iter().all(Zero::is_zero) {
                    return Err(SchemeError::InvalidSpectrum { location: class_location(i) });
                }
                WeightTemplate::PerturbedVector { limit: limit.clone(), deviation: deviation.clone() }
            }
            other => other.clone(),
        };
        classes.push(IndexClass { indices: class.indices.clone(), template });
    }
    let (scheme, mut record) = normalize(&SchemeSpec { mode: factor.mode, prefix, classes })?;
    for (i, perm) in two_point_swaps {
        record.classes[i] = perm;
    }
    Ok((scheme, record))
}

/// Eigenvalue lists of the factor built from a scheme. Constant two-point
/// classes become explicit two-element spectra.
pub fn scheme_to_factor(scheme: &SchemeSpec) -> FactorSpec {
    let classes = scheme
        .classes
        .iter()
        .map(|class| {
            let spectrum = match &class.template {
                WeightTemplate::TwoPoint { deviation: Deviation::Zero, .. } => {
                    let law = class.template.limit_law();
                    WeightTemplate::ExplicitFinite(law.weights_upto(2))
                }
                other => other.clone(),
            };
            FactorClass { indices: class.indices.clone(), spectrum }
        })
        .collect();
    FactorSpec { mode: scheme.mode, prefix: scheme.prefix.clone(), classes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::Law;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn constant(spectrum: WeightTemplate) -> FactorSpec {
        FactorSpec { mode: Mode::Exact, prefix: vec![], classes: vec![FactorClass { indices: IndexSet::all_from(1), spectrum }] }
    }

    #[test]
    fn powers_factor_is_two_point_half() {
        let (scheme, _) = factor_to_scheme(&constant(WeightTemplate::ExplicitFinite(vec![q(2, 3), q(1, 3)]))).unwrap();
        assert_eq!(scheme.spec().classes[0].template, WeightTemplate::two_point(q(1, 2)));
    }

    #[test]
    fn equal_eigenvalues_give_uniform() {
        let (scheme, _) = factor_to_scheme(&constant(WeightTemplate::ExplicitFinite(vec![q(1, 2), q(1, 2)]))).unwrap();
        assert_eq!(scheme.spec().classes[0].template, WeightTemplate::two_point(q(1, 1)));
        assert_eq!(scheme.law::<BigRational>(9).unwrap(), Law::Finite(vec![q(1, 2), q(1, 2)]));
    }

    #[test]
    fn geometric_spectrum_stays_geometric() {
        let geometric = WeightTemplate::GeometricTail { head: vec![], tail: q(1, 2), ratio: q(1, 2) };
        let (scheme, _) = factor_to_scheme(&constant(geometric.clone())).unwrap();
        assert_eq!(scheme.spec().classes[0].template, geometric);
    }

    #[test]
    fn round_trips_on_normalized_input() {
        for spectrum in [
            WeightTemplate::ExplicitFinite(vec![q(2, 3), q(1, 3)]),
            WeightTemplate::ExplicitFinite(vec![q(1, 2), q(1, 2)]),
            WeightTemplate::ExplicitFinite(vec![q(1, 2), q(1, 3), q(1, 6)]),
            WeightTemplate::GeometricTail { head: vec![], tail: q(1, 2), ratio: q(1, 2) },
        ] {
            let factor = constant(spectrum);
            let (scheme, _) = factor_to_scheme(&factor).unwrap();
            assert_eq!(scheme_to_factor(scheme.spec()), factor);
        }
    }

    #[test]
    fn zeros_are_dropped_and_lists_rescaled() {
        let factor = constant(WeightTemplate::ExplicitFinite(vec![q(0, 1), q(1, 1), q(2, 1)]));
        let (scheme, record) = factor_to_scheme(&factor).unwrap();
        assert_eq!(scheme.spec().classes[0].template, WeightTemplate::two_point(q(1, 2)));
        assert_eq!(record.classes[0], vec![1, 0]);
        assert_eq!(
            factor.normalized().unwrap(),
            constant(WeightTemplate::ExplicitFinite(vec![q(2, 3), q(1, 3)]))
        );
        let bad = constant(WeightTemplate::ExplicitFinite(vec![q(0, 1), q(-1, 1), q(2, 1)]));
        assert!(matches!(factor_to_scheme(&bad), Err(SchemeError::InvalidSpectrum { .. })));
    }
}
