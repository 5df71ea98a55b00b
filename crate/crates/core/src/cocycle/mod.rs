//! Finite-block Radon–Nikodym cocycles.
//!
//! For words `x, y` over a block of coordinates, `D(x → y) = Π μ_k(y_k) / μ_k(x_k)`.
//! Witness search, the brute-force oracle and the sampler all read weights
//! from a [`Block`], whose alphabets are truncated but never renormalized, so
//! every cocycle value is exact in the scalar type.

mod estimate;
mod lattice;
mod sample;
mod search;

use serde::Serialize;
use thiserror::Error;

use crate::scalar::Scalar;
use crate::scheme::{truncate_alphabet, SchemeError, ValidatedScheme};

pub use estimate::{agreement, estimate_ratio_set, EmpiricalLabel, EmpiricalReport, EstimateParams, GridProbe};
pub use lattice::{lattice_detect, LatticeVerdict, DEFAULT_LATTICE_TOL};
pub use sample::{mc_sample_cocycle, CocycleSample, CocycleSampleSet, SampleParams};
pub use search::{
    brute_force_block, witness_search, OracleHit, SearchReport, SearchScope, Target, WitnessQuery,
    BRUTE_FORCE_GUARD, DEFAULT_STATE_CAP,
};

/// ASCII `B3RN0U11` read as a big-endian integer.
pub const DEFAULT_SEED: u64 = u64::from_be_bytes(*b"B3RN0U11");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CocycleError {
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error("block length must be at least 1")]
    EmptyBlock,
    #[error("word has length {got}, block has {expected} coordinates")]
    WordLengthMismatch { expected: usize, got: usize },
    #[error("symbol {symbol} at position {position} is outside the retained alphabet of size {alphabet}")]
    SymbolOutOfRange { position: usize, symbol: usize, alphabet: usize },
    #[error("target must be positive and 0 < eps < target")]
    InvalidTarget,
    #[error("|D - target| is not below eps")]
    OutsideTolerance,
    #[error("search enumerated more than {cap} states")]
    SearchBudgetExceeded { cap: u64 },
    #[error("block has {words} words, over the oracle guard of {guard}")]
    BlockTooLarge { words: u128, guard: u128 },
    #[error("blocks share coordinate {coordinate}")]
    OverlappingBlocks { coordinate: usize },
    #[error("need at least two nonzero samples, got {nonzero}")]
    InsufficientSamples { nonzero: usize },
}

/// Coordinates with their retained weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = ""))]
pub struct Block<S: Scalar> {
    /// Increasing coordinate indices, 1-based.
    pub coordinates: Vec<usize>,
    /// True weights of the retained symbols at each coordinate.
    #[serde(serialize_with = "crate::report::scalar_rows")]
    pub weights: Vec<Vec<S>>,
    /// Mass budget `δ` used for infinite alphabets.
    #[serde(serialize_with = "crate::report::scalar")]
    pub delta: S,
    /// Coordinates whose alphabet was cut by the budget.
    pub truncated: Vec<usize>,
}

impl<S: Scalar> Block<S> {
    /// Coordinates `start + 1 ..= start + len`.
    pub fn new(spec: &ValidatedScheme, start: usize, len: usize, delta: &S) -> Result<Self, CocycleError> {
        if len == 0 {
            return Err(CocycleError::EmptyBlock);
        }
        Self::at(spec, (start + 1..=start + len).collect(), delta)
    }

    pub fn at(spec: &ValidatedScheme, coordinates: Vec<usize>, delta: &S) -> Result<Self, CocycleError> {
        let mut weights = Vec::with_capacity(coordinates.len());
        let mut truncated = Vec::new();
        for &n in &coordinates {
            let t = truncate_alphabet(&spec.law::<S>(n)?, delta)?;
            if !t.complete {
                truncated.push(n);
            }
            weights.push(t.weights);
        }
        Ok(Block { coordinates, weights, delta: delta.clone(), truncated })
    }

    /// Index of the coordinate before the block.
    pub fn start(&self) -> usize {
        self.coordinates.first().map_or(0, |c| c - 1)
    }

    pub fn len(&self) -> usize {
        self.coordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coordinates.is_empty()
    }

    /// Number of words, saturating.
    pub fn word_count(&self) -> u128 {
        self.weights.iter().fold(1u128, |acc, w| acc.saturating_mul(w.len() as u128))
    }

    /// The first `len` coordinates.
    pub fn prefix(&self, len: usize) -> Block<S> {
        let truncated = self.truncated.iter().copied().filter(|n| self.coordinates[..len].contains(n)).collect();
        Block {
            coordinates: self.coordinates[..len].to_vec(),
            weights: self.weights[..len].to_vec(),
            delta: self.delta.clone(),
            truncated,
        }
    }

    fn check_word(&self, word: &[usize]) -> Result<(), CocycleError> {
        if word.len() != self.len() {
            return Err(CocycleError::WordLengthMismatch { expected: self.len(), got: word.len() });
        }
        for (position, (&symbol, w)) in word.iter().zip(&self.weights).enumerate() {
            if symbol >= w.len() {
                return Err(CocycleError::SymbolOutOfRange { position, symbol, alphabet: w.len() });
            }
        }
        Ok(())
    }
}

/// `D(x → y)` with its natural log.
#[derive(Debug, Clone, PartialEq)]
pub struct Cocycle<S> {
    pub d: S,
    pub log_d: f64,
}

pub fn log_cocycle<S: Scalar>(block: &Block<S>, x: &[usize], y: &[usize]) -> Result<Cocycle<S>, CocycleError> {
    block.check_word(x)?;
    block.check_word(y)?;
    let mut d = S::one();
    for ((w, &a), &b) in block.weights.iter().zip(x).zip(y) {
        if a != b {
            d = d * w[b].clone() / w[a].clone();
        }
    }
    let log_d = d.ln();
    Ok(Cocycle { d, log_d })
}

/// Word pair whose cocycle lies within `eps` of `target`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = ""))]
pub struct Witness<S: Scalar> {
    pub block: Block<S>,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    #[serde(serialize_with = "crate::report::scalar")]
    pub d: S,
    pub log_d: f64,
    #[serde(serialize_with = "crate::report::scalar")]
    pub target: S,
    #[serde(serialize_with = "crate::report::scalar")]
    pub eps: S,
}

impl<S: Scalar> Witness<S> {
    /// Checks `|D(x → y) - target| < eps`.
    pub fn new(block: Block<S>, x: Vec<usize>, y: Vec<usize>, target: S, eps: S) -> Result<Self, CocycleError> {
        let Cocycle { d, log_d } = log_cocycle(&block, &x, &y)?;
        if (d.clone() - target.clone()).abs() >= eps {
            return Err(CocycleError::OutsideTolerance);
        }
        Ok(Witness { block, x, y, d, log_d, target, eps })
    }

    pub fn distance(&self) -> S {
        (self.d.clone() - self.target.clone()).abs()
    }

    /// Recomputes `D` from the scheme's full (untruncated) laws and checks
    /// the tolerance.
    pub fn replays(&self, spec: &ValidatedScheme) -> bool {
        let mut d = S::one();
        for ((&n, &a), &b) in self.block.coordinates.iter().zip(&self.x).zip(&self.y) {
            let Ok(law) = spec.law::<S>(n) else { return false };
            let (Some(wa), Some(wb)) = (law.weight(a), law.weight(b)) else { return false };
            if a != b {
                d = d * wb / wa;
            }
        }
        let close = if S::EXACT { d == self.d } else { d.near(&self.d, 1e-12 * self.d.as_f64().abs().max(1.0)) };
        close && (d - self.target.clone()).abs() < self.eps
    }
}

/// Witness for `r₁ r₂` on the union of two disjoint blocks, with
/// `ε' = ε₁|r₂| + ε₂|r₁| + ε₁ε₂`.
pub fn compose_witnesses<S: Scalar>(w1: &Witness<S>, w2: &Witness<S>) -> Result<Witness<S>, CocycleError> {
    if let Some(&coordinate) = w1.block.coordinates.iter().find(|c| w2.block.coordinates.contains(c)) {
        return Err(CocycleError::OverlappingBlocks { coordinate });
    }
    let mut rows: Vec<(usize, &Vec<S>, usize, usize)> = Vec::with_capacity(w1.block.len() + w2.block.len());
    for w in [w1, w2] {
        for (i, &n) in w.block.coordinates.iter().enumerate() {
            rows.push((n, &w.block.weights[i], w.x[i], w.y[i]));
        }
    }
    rows.sort_by_key(|r| r.0);
    let mut truncated: Vec<usize> = w1.block.truncated.iter().chain(&w2.block.truncated).copied().collect();
    truncated.sort_unstable();
    let block = Block {
        coordinates: rows.iter().map(|r| r.0).collect(),
        weights: rows.iter().map(|r| r.1.clone()).collect(),
        delta: if w1.block.delta < w2.block.delta { w1.block.delta.clone() } else { w2.block.delta.clone() },
        truncated,
    };
    let d = w1.d.clone() * w2.d.clone();
    let eps = w1.eps.clone() * w2.target.abs() + w2.eps.clone() * w1.target.abs() + w1.eps.clone() * w2.eps.clone();
    Ok(Witness {
        x: rows.iter().map(|r| r.2).collect(),
        y: rows.iter().map(|r| r.3).collect(),
        log_d: d.ln(),
        d,
        target: w1.target.clone() * w2.target.clone(),
        eps,
        block,
    })
}
