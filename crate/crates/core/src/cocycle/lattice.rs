//! Real-gcd lattice detection on log-cocycle samples.

use serde::Serialize;

use super::CocycleError;

pub const DEFAULT_LATTICE_TOL: f64 = 1e-6;

/// A period below `MIN_PERIOD_FACTOR * tol` is a collapsed cascade, not a
/// lattice: at that scale every sample sits within `tol` of `period · ℤ`.
const MIN_PERIOD_FACTOR: f64 = 1e3;

/// Remainder steps allowed per pair before the cascade is called degenerate.
const MAX_EUCLID_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LatticeVerdict {
    AllZero,
    /// Every sample lies within `tol` of `period · ℤ`.
    Lattice { period: f64 },
    NoLattice,
}

/// `gcd(a, b)` by remainders, stopping once the remainder drops to `tol`.
fn real_gcd(mut a: f64, mut b: f64, tol: f64) -> f64 {
    if a < b {
        std::mem::swap(&mut a, &mut b);
    }
    for _ in 0..MAX_EUCLID_STEPS {
        if b <= tol {
            return a;
        }
        let r = a.rem_euclid(b);
        // a remainder within tol of b is a full period
        let r = if b - r <= tol { 0.0 } else { r };
        a = b;
        b = r;
    }
    0.0
}

fn on_lattice(value: f64, period: f64, tol: f64) -> bool {
    (value - (value / period).round() * period).abs() <= tol
}

pub fn lattice_detect(samples: &[f64], tol: f64) -> Result<LatticeVerdict, CocycleError> {
    let mut nonzero: Vec<f64> = samples.iter().map(|s| s.abs()).filter(|s| *s > tol).collect();
    if nonzero.is_empty() && !samples.is_empty() {
        return Ok(LatticeVerdict::AllZero);
    }
    if nonzero.len() < 2 {
        return Err(CocycleError::InsufficientSamples { nonzero: nonzero.len() });
    }
    nonzero.sort_by(f64::total_cmp);
    nonzero.dedup_by(|a, b| (*a - *b).abs() <= tol);
    let mut period = nonzero[0];
    for &v in &nonzero[1..] {
        period = real_gcd(period, v, tol);
        if period <= MIN_PERIOD_FACTOR * tol {
            return Ok(LatticeVerdict::NoLattice);
        }
    }
    if samples.iter().all(|s| on_lattice(*s, period, tol)) {
        Ok(LatticeVerdict::Lattice { period })
    } else {
        Ok(LatticeVerdict::NoLattice)
    }
}
