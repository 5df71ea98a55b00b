//! Meet-in-the-middle witness search and the exhaustive oracle.

use std::cmp::Ordering;

use serde::Serialize;

use super::{log_cocycle, Block, CocycleError, Witness};
use crate::scalar::Scalar;
use crate::scheme::ValidatedScheme;

/// Cap on states enumerated by one [`witness_search`] call.
pub const DEFAULT_STATE_CAP: u64 = 100_000_000;

/// Largest block, in words, that [`brute_force_block`] accepts.
pub const BRUTE_FORCE_GUARD: u128 = 10_000_000;

/// Cap on distinct cocycle values the oracle keeps.
const ORACLE_STATE_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Target<S> {
    /// `|D - r| < ε`.
    Value(S),
    /// `min(|D - 1|, |D|) < ε` with `x ≠ y`.
    ZeroOrOne,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessQuery<S> {
    pub target: Target<S>,
    pub eps: S,
    /// Words agree on coordinates `1..=start`.
    pub start: usize,
    pub k_max: usize,
    /// Mass budget for infinite alphabets.
    pub delta: S,
    pub state_cap: u64,
}

/// What a search covered. A missing witness is a statement about this scope only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchScope {
    pub start: usize,
    pub k_max: usize,
    pub delta: String,
    pub state_cap: u64,
    pub states_enumerated: u64,
    /// Some coordinate in the searched range had its alphabet cut by `δ`.
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = ""))]
pub struct SearchReport<S: Scalar> {
    pub witness: Option<Witness<S>>,
    pub scope: SearchScope,
}

/// One factor choice `μ(y)/μ(x)` at a coordinate.
#[derive(Debug, Clone)]
struct Choice<S> {
    ratio: S,
    x: usize,
    y: usize,
}

impl<S> Choice<S> {
    fn moves(&self) -> bool {
        self.x != self.y
    }
}

/// Distinct `(ratio, moves)` pairs at one coordinate.
fn distinct_choices<S: Scalar>(weights: &[S]) -> Vec<Choice<S>> {
    let mut all = Vec::with_capacity(weights.len() * weights.len());
    for (x, wx) in weights.iter().enumerate() {
        for (y, wy) in weights.iter().enumerate() {
            let ratio = if x == y { S::one() } else { wy.clone() / wx.clone() };
            all.push(Choice { ratio, x, y });
        }
    }
    all.sort_by(|a, b| a.ratio.total_cmp(&b.ratio).then(a.moves().cmp(&b.moves())));
    all.dedup_by(|a, b| a.ratio == b.ratio && a.moves() == b.moves());
    all
}

struct Step {
    parent: Vec<u32>,
    choice: Vec<u32>,
}

/// Distinct products over a run of coordinates, sorted by value, each with
/// one representative word pair.
struct Reach<S> {
    values: Vec<S>,
    moves: Vec<bool>,
    steps: Vec<Step>,
}

impl<S: Scalar> Reach<S> {
    fn build(choices: &[Vec<Choice<S>>], counter: &mut u64, cap: u64) -> Result<Self, CocycleError> {
        let mut reach = Reach { values: vec![S::one()], moves: vec![false], steps: Vec::new() };
        for coordinate in choices {
            let expanded = (reach.values.len() * coordinate.len()) as u64;
            *counter = counter.saturating_add(expanded);
            if *counter > cap {
                return Err(CocycleError::SearchBudgetExceeded { cap });
            }
            let mut next: Vec<(S, bool, u32, u32)> = Vec::with_capacity(expanded as usize);
            for (i, (v, m)) in reach.values.iter().zip(&reach.moves).enumerate() {
                for (j, c) in coordinate.iter().enumerate() {
                    next.push((v.clone() * c.ratio.clone(), *m || c.moves(), i as u32, j as u32));
                }
            }
            next.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            next.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
            let mut step = Step { parent: Vec::with_capacity(next.len()), choice: Vec::with_capacity(next.len()) };
            reach.values.clear();
            reach.moves.clear();
            for (v, m, p, c) in next {
                reach.values.push(v);
                reach.moves.push(m);
                step.parent.push(p);
                step.choice.push(c);
            }
            reach.steps.push(step);
        }
        Ok(reach)
    }

    fn words(&self, mut index: usize, choices: &[Vec<Choice<S>>]) -> (Vec<usize>, Vec<usize>) {
        let mut x = vec![0; self.steps.len()];
        let mut y = vec![0; self.steps.len()];
        for k in (0..self.steps.len()).rev() {
            let c = &choices[k][self.steps[k].choice[index] as usize];
            x[k] = c.x;
            y[k] = c.y;
            index = self.steps[k].parent[index] as usize;
        }
        (x, y)
    }
}

/// Best combination `left[i] * right[j]` near `goal` for one left state.
struct Pick<S> {
    left: usize,
    right: usize,
    distance: S,
}

fn closest_in_right<S: Scalar>(
    left: &Reach<S>,
    right: &Reach<S>,
    goal: &S,
    require_moves: bool,
    best: &mut Option<Pick<S>>,
) {
    for (i, l) in left.values.iter().enumerate() {
        let want = goal.clone() / l.clone();
        let split = right.values.partition_point(|r| r.total_cmp(&want) == Ordering::Less);
        let usable = |j: usize| !require_moves || left.moves[i] || right.moves[j];
        let below = (0..split).rev().find(|&j| usable(j));
        let above = (split..right.values.len()).find(|&j| usable(j));
        for j in below.into_iter().chain(above) {
            let distance = (l.clone() * right.values[j].clone() - goal.clone()).abs();
            if best.as_ref().is_none_or(|b| distance < b.distance) {
                *best = Some(Pick { left: i, right: j, distance });
            }
        }
    }
}

/// Smallest `K ≤ k_max` such that some word pair on coordinates
/// `start+1 ..= start+K` is within `eps` of the target; the closest such
/// pair at that `K` is returned.
pub fn witness_search<S: Scalar>(
    spec: &ValidatedScheme,
    query: &WitnessQuery<S>,
) -> Result<SearchReport<S>, CocycleError> {
    if query.eps <= S::zero() {
        return Err(CocycleError::InvalidTarget);
    }
    if let Target::Value(r) = &query.target {
        if *r <= S::zero() || query.eps >= *r {
            return Err(CocycleError::InvalidTarget);
        }
    }
    let mut scope = SearchScope {
        start: query.start,
        k_max: query.k_max,
        delta: query.delta.render(),
        state_cap: query.state_cap,
        states_enumerated: 0,
        truncated: false,
    };
    if query.k_max == 0 {
        return Ok(SearchReport { witness: None, scope });
    }
    let full = Block::new(spec, query.start, query.k_max, &query.delta)?;
    scope.truncated = !full.truncated.is_empty();
    let choices: Vec<Vec<Choice<S>>> = full.weights.iter().map(|w| distinct_choices(w)).collect();
    let mut counter = 0u64;
    for k in 1..=query.k_max {
        let half = k / 2;
        let left = Reach::build(&choices[..half], &mut counter, query.state_cap)?;
        let right = Reach::build(&choices[half..k], &mut counter, query.state_cap)?;
        scope.states_enumerated = counter;
        let found = match &query.target {
            Target::Value(r) => {
                let mut best = None;
                closest_in_right(&left, &right, r, false, &mut best);
                best.filter(|b| b.distance < query.eps).map(|b| (b, r.clone()))
            }
            Target::ZeroOrOne => zero_or_one(&left, &right, &query.eps),
        };
        if let Some((pick, target)) = found {
            let (mut x, mut y) = left.words(pick.left, &choices[..half]);
            let (rx, ry) = right.words(pick.right, &choices[half..k]);
            x.extend(rx);
            y.extend(ry);
            let block = full.prefix(k);
            let c = log_cocycle(&block, &x, &y)?;
            let witness = Witness { block, x, y, d: c.d, log_d: c.log_d, target, eps: query.eps.clone() };
            return Ok(SearchReport { witness: Some(witness), scope });
        }
    }
    Ok(SearchReport { witness: None, scope })
}

fn zero_or_one<S: Scalar>(left: &Reach<S>, right: &Reach<S>, eps: &S) -> Option<(Pick<S>, S)> {
    // values are sorted, so the smallest product is the first pair; a
    // product below 1 always moves
    let smallest = left.values[0].clone() * right.values[0].clone();
    if smallest < *eps {
        return Some((Pick { left: 0, right: 0, distance: smallest }, S::zero()));
    }
    let mut best = None;
    closest_in_right(left, right, &S::one(), true, &mut best);
    best.filter(|b| b.distance < *eps).map(|b| (b, S::one()))
}

/// Closest cocycle value to one target over every word pair of a block.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = ""))]
pub struct OracleHit<S: Scalar> {
    #[serde(serialize_with = "crate::report::scalar")]
    pub target: S,
    #[serde(serialize_with = "crate::report::scalar")]
    pub distance: S,
    #[serde(serialize_with = "crate::report::scalar")]
    pub d: S,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
}

/// Exact `min_{x,y} |target - D(x → y)|` for each target.
///
/// Expands every symbol pair at every coordinate (no per-coordinate
/// merging), keeping only distinct running products, then scans linearly.
pub fn brute_force_block<S: Scalar>(block: &Block<S>, targets: &[S]) -> Result<Vec<OracleHit<S>>, CocycleError> {
    let words = block.word_count();
    if words > BRUTE_FORCE_GUARD {
        return Err(CocycleError::BlockTooLarge { words, guard: BRUTE_FORCE_GUARD });
    }
    // (value, x, y), kept sorted and distinct by value
    let mut states: Vec<(S, Vec<usize>, Vec<usize>)> = vec![(S::one(), Vec::new(), Vec::new())];
    for weights in &block.weights {
        let mut next = Vec::with_capacity(states.len() * weights.len() * weights.len());
        for (value, x, y) in &states {
            for (a, wa) in weights.iter().enumerate() {
                for (b, wb) in weights.iter().enumerate() {
                    let v = if a == b { value.clone() } else { value.clone() * wb.clone() / wa.clone() };
                    let (mut x, mut y) = (x.clone(), y.clone());
                    x.push(a);
                    y.push(b);
                    next.push((v, x, y));
                }
            }
        }
        next.sort_by(|a, b| a.0.total_cmp(&b.0));
        next.dedup_by(|a, b| a.0 == b.0);
        if next.len() > ORACLE_STATE_CAP {
            return Err(CocycleError::BlockTooLarge { words, guard: BRUTE_FORCE_GUARD });
        }
        states = next;
    }
    let mut hits = Vec::with_capacity(targets.len());
    for target in targets {
        let (value, x, y) = states
            .iter()
            .min_by(|a, b| (a.0.clone() - target.clone()).abs().total_cmp(&(b.0.clone() - target.clone()).abs()))
            .expect("at least the empty product");
        let c = log_cocycle(block, x, y)?;
        debug_assert!(c.d == *value || !S::EXACT);
        hits.push(OracleHit {
            target: target.clone(),
            distance: (value.clone() - target.clone()).abs(),
            d: value.clone(),
            x: x.clone(),
            y: y.clone(),
        });
    }
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn query(target: BigRational, eps: BigRational, k_max: usize) -> WitnessQuery<BigRational> {
        WitnessQuery { target: Target::Value(target), eps, start: 0, k_max, delta: q(1, 1000), state_cap: DEFAULT_STATE_CAP }
    }

    #[test]
    fn single_flip_witness() {
        let report = witness_search(&fixtures::two_thirds(), &query(q(1, 2), q(1, 1000), 4)).unwrap();
        let w = report.witness.unwrap();
        assert_eq!((w.block.len(), w.x.clone(), w.y.clone(), w.d.clone()), (1, vec![0], vec![1], q(1, 2)));
    }

    #[test]
    fn powers_of_two_miss_one_third() {
        let spec = fixtures::two_thirds();
        let report = witness_search(&spec, &query(q(1, 3), q(1, 100), 12)).unwrap();
        assert!(report.witness.is_none());
        let block = Block::new(&spec, 0, 12, &q(1, 1000)).unwrap();
        let hits = brute_force_block(&block, &[q(1, 3)]).unwrap();
        assert_eq!(hits[0].distance, q(1, 12));
    }

    #[test]
    fn geometric_quarter() {
        let report = witness_search(&fixtures::geometric(q(1, 2)), &query(q(1, 4), q(1, 1_000_000), 3)).unwrap();
        let w = report.witness.unwrap();
        assert_eq!((w.x.clone(), w.y.clone()), (vec![0], vec![2]));
        assert!(report.scope.truncated);
    }

    #[test]
    fn oracle_examples() {
        let block = Block::new(&fixtures::two_thirds(), 0, 3, &q(1, 8)).unwrap();
        let targets = [q(1, 1), q(1, 2), q(1, 4), q(1, 8)];
        assert!(brute_force_block(&block, &targets).unwrap().iter().all(|h| h.distance == q(0, 1)));
        let uniform = Block::new(&fixtures::uniform(), 0, 4, &q(1, 8)).unwrap();
        let hit = &brute_force_block(&uniform, &[q(3, 7)]).unwrap()[0];
        assert_eq!(hit.distance, q(4, 7));
    }

    #[test]
    fn zero_or_one_needs_a_move() {
        let mut qy = query(q(1, 2), q(1, 100), 6);
        qy.target = Target::ZeroOrOne;
        // powers of 1/2: nontrivial D = 1 needs two opposite flips
        let w = witness_search(&fixtures::two_thirds(), &qy).unwrap().witness.unwrap();
        assert_eq!(w.block.len(), 2);
        assert_eq!(w.d, q(1, 1));
        assert_ne!(w.x, w.y);
    }

    #[test]
    fn budget_is_enforced() {
        let mut qy = query(q(1, 3), q(1, 100), 12);
        qy.state_cap = 10;
        assert_eq!(
            witness_search(&fixtures::two_thirds(), &qy),
            Err(CocycleError::SearchBudgetExceeded { cap: 10 })
        );
    }

    #[test]
    fn oracle_guard() {
        let block = Block::new(&fixtures::uniform(), 0, 24, &q(1, 8)).unwrap();
        assert!(matches!(brute_force_block(&block, &[q(1, 2)]), Err(CocycleError::BlockTooLarge { .. })));
    }
}
