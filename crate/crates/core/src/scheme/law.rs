use super::SchemeError;
use crate::scalar::Scalar;

/// Weight vector of a single coordinate.
#[derive(Debug, Clone, PartialEq)]
pub enum Law<S> {
    Finite(Vec<S>),
    /// `head[..]`, then `tail * ratio^j` for `j >= 0`.
    Geometric { head: Vec<S>, tail: S, ratio: S },
}

/// Symbols kept for a coordinate under a mass budget.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncation<S> {
    /// True weights of the retained symbols, in symbol order. Not renormalized.
    pub weights: Vec<S>,
    pub retained: S,
    /// Whether every symbol of the alphabet was kept.
    pub complete: bool,
}

const MAX_TRUNCATED_SYMBOLS: usize = 1 << 20;

impl<S: Scalar> Law<S> {
    pub fn alphabet_size(&self) -> Option<usize> {
        match self {
            Law::Finite(w) => Some(w.len()),
            Law::Geometric { .. } => None,
        }
    }

    pub fn weight(&self, symbol: usize) -> Option<S> {
        match self {
            Law::Finite(w) => w.get(symbol).cloned(),
            Law::Geometric { head, tail, ratio } => Some(match head.get(symbol) {
                Some(w) => w.clone(),
                None => tail.clone() * ratio.powi((symbol - head.len()) as i32),
            }),
        }
    }

    /// Finite weight list; geometric laws are cut after `limit` symbols.
    pub fn weights_upto(&self, limit: usize) -> Vec<S> {
        match self {
            Law::Finite(w) => w.clone(),
            Law::Geometric { .. } => (0..limit).filter_map(|i| self.weight(i)).collect(),
        }
    }

    pub fn max_weight(&self) -> S {
        let mut best = match self {
            Law::Finite(w) => w.first().cloned().unwrap_or_else(S::zero),
            Law::Geometric { tail, .. } => tail.clone(),
        };
        let head = match self {
            Law::Finite(w) => w,
            Law::Geometric { head, .. } => head,
        };
        for w in head {
            if *w > best {
                best = w.clone();
            }
        }
        best
    }

    /// Symbol 0 carries the maximum and weights never increase.
    pub fn is_descending(&self) -> bool {
        let head = match self {
            Law::Finite(w) => w,
            Law::Geometric { head, .. } => head,
        };
        let sorted = head.windows(2).all(|p| p[0] >= p[1]);
        match self {
            Law::Finite(_) => sorted,
            Law::Geometric { tail, .. } => sorted && head.last().is_none_or(|last| last >= tail),
        }
    }

    pub fn map<T, F: Fn(&S) -> T>(&self, f: F) -> Law<T> {
        match self {
            Law::Finite(w) => Law::Finite(w.iter().map(&f).collect()),
            Law::Geometric { head, tail, ratio } => Law::Geometric {
                head: head.iter().map(&f).collect(),
                tail: f(tail),
                ratio: f(ratio),
            },
        }
    }

    pub fn to_f64(&self) -> Law<f64> {
        self.map(Scalar::as_f64)
    }
}

/// Shortest prefix of the weight list holding mass at least `1 - δ`.
///
/// Finite alphabets are always kept whole. Weights are returned as-is so
/// that cocycle ratios computed from them stay exact.
pub fn truncate_alphabet<S: Scalar>(law: &Law<S>, delta: &S) -> Result<Truncation<S>, SchemeError> {
    let half = S::one() / S::from_int(2);
    if *delta <= S::zero() || *delta > half {
        return Err(SchemeError::InvalidBudget(delta.render()));
    }
    match law {
        Law::Finite(w) => Ok(Truncation {
            weights: w.clone(),
            retained: w.iter().cloned().fold(S::zero(), |a, b| a + b),
            complete: true,
        }),
        Law::Geometric { .. } => {
            let goal = S::one() - delta.clone();
            let mut weights = Vec::new();
            let mut mass = S::zero();
            while mass < goal {
                if weights.len() >= MAX_TRUNCATED_SYMBOLS {
                    return Err(SchemeError::BudgetUnreachable);
                }
                let w = law.weight(weights.len()).ok_or(SchemeError::BudgetUnreachable)?;
                mass = mass + w.clone();
                weights.push(w);
            }
            Ok(Truncation { weights, retained: mass, complete: false })
        }
    }
}
