//! Empirical subtype guess from samples and witness probes.

use std::fmt;

use num_rational::BigRational;
use serde::{Serialize, Serializer};

use super::{
    lattice_detect, mc_sample_cocycle, witness_search, CocycleError, LatticeVerdict, SampleParams, Target,
    WitnessQuery, DEFAULT_LATTICE_TOL, DEFAULT_SEED, DEFAULT_STATE_CAP,
};
use crate::classifier::TypeLabel;
use crate::scalar::{rational_from_decimal_f64, Scalar};
use crate::scheme::ValidatedScheme;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateParams {
    pub seed: u64,
    pub samples: usize,
    pub window: usize,
    /// Coordinates `1..=start` are skipped, since ratio sets are asymptotic.
    pub start: usize,
    pub delta: f64,
    pub tol: f64,
    /// Probe targets are `e^{-k/4}` for `k = 1..=grid`.
    pub grid: usize,
    /// Probe tolerance relative to the target.
    pub grid_eps: f64,
    pub grid_k_max: usize,
}

impl Default for EstimateParams {
    fn default() -> Self {
        EstimateParams {
            seed: DEFAULT_SEED,
            samples: 1000,
            window: 20,
            start: 4096,
            delta: 1e-9,
            tol: DEFAULT_LATTICE_TOL,
            grid: 8,
            grid_eps: 1e-2,
            grid_k_max: 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EmpiricalLabel {
    IILike,
    III0Like,
    IIILambdaLike(f64),
    III1Like,
}

impl fmt::Display for EmpiricalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmpiricalLabel::IILike => f.write_str("II-like"),
            EmpiricalLabel::III0Like => f.write_str("III_0-like"),
            EmpiricalLabel::IIILambdaLike(l) => write!(f, "III_lambda-like lambda={l:.12}"),
            EmpiricalLabel::III1Like => f.write_str("III_1-like"),
        }
    }
}

impl Serialize for EmpiricalLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Witness probe at one grid target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridProbe {
    pub target: f64,
    pub block_len: Option<usize>,
    pub log_d: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalReport {
    pub label: EmpiricalLabel,
    /// `None` when fewer than two samples were nonzero.
    pub lattice: Option<LatticeVerdict>,
    pub samples: usize,
    pub nonzero_samples: usize,
    pub probes: Vec<GridProbe>,
    pub seed: u64,
    pub start: usize,
    pub window: usize,
}

/// Samples cocycles on `start+1 ..= start+window`: all zero reads as II,
/// a lattice with period `c` as `III_{e^{-c}}`. Otherwise witness probes at
/// `e^{-k/4}` separate III₁ (some target reached) from III₀ (values only
/// near 0 and 1).
pub fn estimate_ratio_set<S: Scalar>(
    spec: &ValidatedScheme,
    params: &EstimateParams,
) -> Result<EmpiricalReport, CocycleError> {
    let delta = scalar_of::<S>(params.delta);
    let sample_params =
        SampleParams { seed: params.seed, samples: params.samples, start: params.start, window: params.window, delta };
    let set = mc_sample_cocycle::<S>(spec, &sample_params)?;
    let logs = set.log_values();
    let nonzero_samples = logs.iter().filter(|l| l.abs() > params.tol).count();
    let lattice = match lattice_detect(&logs, params.tol) {
        Ok(v) => Some(v),
        Err(CocycleError::InsufficientSamples { .. }) => None,
        Err(e) => return Err(e),
    };
    let mut probes = Vec::new();
    let label = match lattice {
        Some(LatticeVerdict::AllZero) => EmpiricalLabel::IILike,
        Some(LatticeVerdict::Lattice { period }) => EmpiricalLabel::IIILambdaLike((-period).exp()),
        _ => {
            probes = probe_grid::<S>(spec, params)?;
            if probes.iter().any(|p| p.block_len.is_some()) {
                EmpiricalLabel::III1Like
            } else {
                EmpiricalLabel::III0Like
            }
        }
    };
    Ok(EmpiricalReport {
        label,
        lattice,
        samples: params.samples,
        nonzero_samples,
        probes,
        seed: params.seed,
        start: params.start,
        window: params.window,
    })
}

fn scalar_of<S: Scalar>(value: f64) -> S {
    S::from_f64(value).unwrap_or_else(|| {
        S::from_rational(&rational_from_decimal_f64(value).expect("finite parameter"))
    })
}

fn probe_grid<S: Scalar>(spec: &ValidatedScheme, params: &EstimateParams) -> Result<Vec<GridProbe>, CocycleError> {
    let mut probes = Vec::with_capacity(params.grid);
    for k in 1..=params.grid {
        let target = (-(k as f64) / 4.0).exp();
        let query = WitnessQuery {
            target: Target::Value(scalar_of::<S>(target)),
            eps: scalar_of::<S>(target * params.grid_eps),
            start: params.start,
            k_max: params.grid_k_max,
            delta: scalar_of::<S>(params.delta),
            state_cap: DEFAULT_STATE_CAP,
        };
        let report = witness_search(spec, &query)?;
        probes.push(GridProbe {
            target,
            block_len: report.witness.as_ref().map(|w| w.block.len()),
            log_d: report.witness.as_ref().map(|w| w.log_d),
        });
    }
    Ok(probes)
}

/// Whether the analytic and empirical labels name the same subtype; `None`
/// for an inconclusive analytic label. Types I, II₁ and II_∞ all read as
/// II-like. λ values agree when `|log λ_emp / log λ_ana - 1| < 10⁻³`.
pub fn agreement(analytic: &TypeLabel, empirical: &EmpiricalLabel) -> Option<bool> {
    Some(match (analytic, empirical) {
        (TypeLabel::Inconclusive, _) => return None,
        (TypeLabel::IInfinite | TypeLabel::II1 | TypeLabel::IIInfinite, EmpiricalLabel::IILike) => true,
        (TypeLabel::III0, EmpiricalLabel::III0Like) => true,
        (TypeLabel::III1, EmpiricalLabel::III1Like) => true,
        (TypeLabel::IIILambda(l), EmpiricalLabel::IIILambdaLike(e)) => lambda_close(l, *e),
        _ => false,
    })
}

fn lambda_close(analytic: &BigRational, empirical: f64) -> bool {
    let ratio = empirical.ln() / analytic.ln();
    (ratio - 1.0).abs() < 1e-3
}
