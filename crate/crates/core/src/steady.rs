//! Iterating the step map until it settles.

use std::collections::HashMap;
use std::hash::{DefaultHasher, Hash, Hasher};

use serde::Serialize;

use crate::dynamics::step;
use crate::lattice::LatticeState;

/// How a trajectory ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Outcome {
    /// `T(n_st + 1) == T(n_st)`, with `n_st` minimal.
    Fixed { n_st: u64 },
    /// `T(entry_time + period) == T(entry_time)` with `period >= 2`.
    Periodic { entry_time: u64, period: u64 },
    /// Neither happened within the step cap.
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrajectoryOutcome {
    pub outcome: Outcome,
    /// Fixed point, cycle entry state, or last computed state.
    pub steady_state: LatticeState,
    pub steps_taken: u64,
}

impl TrajectoryOutcome {
    pub fn is_fixed(&self) -> bool {
        matches!(self.outcome, Outcome::Fixed { .. })
    }

    pub fn n_st(&self) -> Option<u64> {
        match self.outcome {
            Outcome::Fixed { n_st } => Some(n_st),
            _ => None,
        }
    }
}

/// Step cap used when none is given: 100 steps per cell of the longest axis.
pub fn default_max_steps(state: &LatticeState) -> u64 {
    100 * state.shape().max_dim() as u64
}

pub fn evolve(initial: &LatticeState, max_steps: u64) -> TrajectoryOutcome {
    evolve_with(initial, max_steps, step)
}

/// [`evolve`] with a caller-supplied step map.
///
/// States are remembered by a 64-bit digest only. A digest hit is confirmed
/// by recomputing the earlier state from `initial` and comparing in full.
pub fn evolve_with<F>(initial: &LatticeState, max_steps: u64, step_fn: F) -> TrajectoryOutcome
where
    F: Fn(&LatticeState) -> LatticeState,
{
    detect(initial, max_steps, step_fn, digest)
}

fn detect<F, D>(initial: &LatticeState, max_steps: u64, step_fn: F, digest: D) -> TrajectoryOutcome
where
    F: Fn(&LatticeState) -> LatticeState,
    D: Fn(&LatticeState) -> u64,
{
    assert!(max_steps >= 1, "max_steps must be positive");
    let mut seen: HashMap<u64, Vec<u64>> = HashMap::new();
    seen.entry(digest(initial)).or_default().push(0);

    let mut current = initial.clone();
    for n in 0..max_steps {
        let next = step_fn(&current);
        if next == current {
            return TrajectoryOutcome {
                outcome: Outcome::Fixed { n_st: n },
                steady_state: current,
                steps_taken: n + 1,
            };
        }
        let time = n + 1;
        let key = digest(&next);
        if let Some(times) = seen.get(&key) {
            for &earlier in times {
                if replay(initial, earlier, &step_fn) == next {
                    return TrajectoryOutcome {
                        outcome: Outcome::Periodic {
                            entry_time: earlier,
                            period: time - earlier,
                        },
                        steady_state: next,
                        steps_taken: time,
                    };
                }
            }
        }
        seen.entry(key).or_default().push(time);
        current = next;
    }
    TrajectoryOutcome {
        outcome: Outcome::Unresolved,
        steady_state: current,
        steps_taken: max_steps,
    }
}

/// `[T(0), T(1), ..., T(n)]`.
pub fn trajectory(initial: &LatticeState, n: u64) -> Vec<LatticeState> {
    let mut states = Vec::with_capacity(n as usize + 1);
    states.push(initial.clone());
    for _ in 0..n {
        let next = step(states.last().unwrap());
        states.push(next);
    }
    states
}

fn replay<F>(initial: &LatticeState, steps: u64, step_fn: &F) -> LatticeState
where
    F: Fn(&LatticeState) -> LatticeState,
{
    (0..steps).fold(initial.clone(), |s, _| step_fn(&s))
}

fn digest(state: &LatticeState) -> u64 {
    let mut h = DefaultHasher::new();
    state.values().hash(&mut h);
    h.finish()
}
