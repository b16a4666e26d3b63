//! The solvable one-step model.
//!
//! One-element groups are placed i.i.d. Bernoulli(p) on an even torus. Each
//! even cell then moves its content one cell left or right with probability
//! 1/2 and merges with the odd cell it lands on. Afterwards every odd cell
//! holds the sum of one, two or three of the original variables.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::montecarlo::{check_probability, rng_from_seed, sample_seed, Estimate, GroupHistogram};

/// Probability that an odd cell ends up holding one, two or three variables.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReceiveProbabilities {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

pub const RECEIVE: ReceiveProbabilities = ReceiveProbabilities {
    s1: 0.25,
    s2: 0.5,
    s3: 0.25,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PrimitiveDensities {
    pub p: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
}

impl PrimitiveDensities {
    pub fn get(&self, r: u64) -> f64 {
        match r {
            1 => self.q1,
            2 => self.q2,
            3 => self.q3,
            _ => 0.0,
        }
    }
}

/// Closed-form steady-state densities of 1-, 2- and 3-element groups.
pub fn analytic_densities(p: f64) -> Result<PrimitiveDensities> {
    check_probability(p)?;
    let p2 = p * p;
    let p3 = p2 * p;
    Ok(PrimitiveDensities {
        p,
        q1: (8.0 * p - 10.0 * p2 + 3.0 * p3) / 8.0,
        q2: (5.0 * p2 - 3.0 * p3) / 8.0,
        q3: p3 / 8.0,
    })
}

/// One random realization of the one-step model on `Z_m`.
pub fn simulate_primitive(m: usize, p: f64, seed: u64) -> Result<GroupHistogram> {
    let (_, cells) = one_step(m, p, seed)?;
    let mut hist = GroupHistogram::empty(m as u64);
    for &v in cells.iter().filter(|&&v| v > 0) {
        hist.record(v);
    }
    Ok(hist)
}

/// Analytic densities next to Monte Carlo estimates at one `p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PrimitiveComparison {
    pub analytic: PrimitiveDensities,
    /// Empirical `Q_1`, `Q_2`, `Q_3`.
    pub monte_carlo: [Estimate; 3],
}

/// Average `seeds` realizations on `Z_m`; realization `j` uses
/// `sample_seed(master_seed, index, j)`.
pub fn compare_primitive(
    m: usize,
    p: f64,
    index: u64,
    seeds: u64,
    master_seed: u64,
) -> Result<PrimitiveComparison> {
    let analytic = analytic_densities(p)?;
    let mut sums = [0u64; 3];
    let mut sq_sums = [0u128; 3];
    for j in 0..seeds {
        let h = simulate_primitive(m, p, sample_seed(master_seed, index, j))?;
        for r in 0..3 {
            let c = h.count(r as u64 + 1);
            sums[r] += c;
            sq_sums[r] += c as u128 * c as u128;
        }
    }
    let monte_carlo = std::array::from_fn(|r| {
        Estimate::from_sums(seeds, sums[r], sq_sums[r], m as f64).unwrap_or_default()
    });
    Ok(PrimitiveComparison {
        analytic,
        monte_carlo,
    })
}

/// Initial occupancies and the occupancies after the move.
fn one_step(m: usize, p: f64, seed: u64) -> Result<(Vec<u64>, Vec<u64>)> {
    if m < 4 || !m.is_multiple_of(2) {
        return Err(Error::PrimitiveSize(m));
    }
    check_probability(p)?;
    let mut rng = rng_from_seed(seed);
    let initial: Vec<u64> = (0..m).map(|_| rng.random_bool(p) as u64).collect();
    let mut cells = initial.clone();
    for even in (0..m).step_by(2) {
        let content = std::mem::take(&mut cells[even]);
        if content == 0 {
            continue;
        }
        let target = if rng.random_bool(0.5) {
            (even + 1) % m
        } else {
            (even + m - 1) % m
        };
        cells[target] += content;
    }
    Ok((initial, cells))
}
