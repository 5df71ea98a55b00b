//! Seeded Monte Carlo sampling of cocycle values.

use std::fmt::Write as _;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{log_cocycle, Block, CocycleError};
use crate::scalar::Scalar;
use crate::scheme::ValidatedScheme;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleParams<S> {
    pub seed: u64,
    pub samples: usize,
    /// Block is `start + 1 ..= start + window`.
    pub start: usize,
    pub window: usize,
    pub delta: S,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = ""))]
pub struct CocycleSample<S: Scalar> {
    pub index: usize,
    #[serde(serialize_with = "crate::report::scalar")]
    pub d: S,
    pub log_d: f64,
    /// Coordinates where `x` and `y` differ.
    pub moved: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = ""))]
pub struct CocycleSampleSet<S: Scalar> {
    pub seed: u64,
    pub start: usize,
    pub window: usize,
    pub samples: Vec<CocycleSample<S>>,
}

impl<S: Scalar> CocycleSampleSet<S> {
    pub fn log_values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.log_d).collect()
    }

    /// One `index,log_D,D_num,D_den` line per sample. The fraction columns
    /// are empty for float schemes.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for s in &self.samples {
            let (num, den) = match S::EXACT.then(|| s.d.to_rational()).flatten() {
                Some(r) => (r.numer().to_string(), r.denom().to_string()),
                None => (String::new(), String::new()),
            };
            writeln!(out, "{},{:.16e},{},{}", s.index, s.log_d, num, den).expect("writing to a String");
        }
        out
    }
}

/// Draws `x` and `y` independently from the product measure on the block,
/// restricted to the retained symbols. Sample `i` uses ChaCha8 stream `i`
/// of `seed`, so results do not depend on the thread count.
pub fn mc_sample_cocycle<S: Scalar>(
    spec: &ValidatedScheme,
    params: &SampleParams<S>,
) -> Result<CocycleSampleSet<S>, CocycleError> {
    let block = Block::new(spec, params.start, params.window, &params.delta)?;
    let samplers: Vec<WeightedIndex<f64>> = block
        .weights
        .iter()
        .map(|w| {
            let f: Vec<f64> = w.iter().map(Scalar::as_f64).collect();
            WeightedIndex::new(&f).expect("retained weights have positive mass")
        })
        .collect();
    let samples = (0..params.samples)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(index as u64);
            let x: Vec<usize> = samplers.iter().map(|s| s.sample(&mut rng)).collect();
            let y: Vec<usize> = samplers.iter().map(|s| s.sample(&mut rng)).collect();
            let c = log_cocycle(&block, &x, &y).expect("sampled words fit the block");
            let moved = x.iter().zip(&y).filter(|(a, b)| a != b).count();
            CocycleSample { index, d: c.d, log_d: c.log_d, moved }
        })
        .collect();
    Ok(CocycleSampleSet { seed: params.seed, start: params.start, window: params.window, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::BigRational;

    fn params(seed: u64, samples: usize) -> SampleParams<BigRational> {
        SampleParams { seed, samples, start: 0, window: 8, delta: BigRational::new(1.into(), 1000.into()) }
    }

    #[test]
    fn uniform_samples_vanish() {
        let set = mc_sample_cocycle(&fixtures::uniform(), &params(1, 200)).unwrap();
        assert!(set.samples.iter().all(|s| s.log_d == 0.0));
    }

    #[test]
    fn thread_count_does_not_matter() {
        let spec = fixtures::interleaved(BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 3.into()));
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let a = one.install(|| mc_sample_cocycle(&spec, &params(7, 500)).unwrap());
        let b = mc_sample_cocycle(&spec, &params(7, 500)).unwrap();
        assert_eq!(a.export(), b.export());
        assert_ne!(a.export(), mc_sample_cocycle(&spec, &params(8, 500)).unwrap().export());
    }

    #[test]
    fn export_lines() {
        let set = mc_sample_cocycle(&fixtures::two_thirds(), &params(3, 4)).unwrap();
        let text = set.export();
        assert_eq!(text.lines().count(), 4);
        for line in text.lines() {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 4);
            let log: f64 = fields[1].parse().unwrap();
            let ratio = fields[2].parse::<f64>().unwrap() / fields[3].parse::<f64>().unwrap();
            assert!((log - ratio.ln()).abs() < 1e-12);
        }
    }
}
