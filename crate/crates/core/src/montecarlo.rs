//! Random initial states, group-size statistics and p-grid sweeps.
//!
//! A sweep draws `samples` Bernoulli(p) initial states per grid point, evolves
//! each until it settles and averages the group-size densities of the fixed
//! points. All accumulation is in integers and the division happens once per
//! grid point, so results do not depend on how samples are scheduled.

use std::collections::BTreeMap;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeState, TorusShape};
use crate::steady::{evolve, Outcome, TrajectoryOutcome};

/// Group sizes at or above this are pooled into the tail bucket.
pub const TAIL_FROM: u64 = 5;

/// Number of cells holding an `r`-element group, for each `r >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupHistogram {
    pub counts: BTreeMap<u64, u64>,
    pub total_cells: u64,
}

impl GroupHistogram {
    pub fn empty(total_cells: u64) -> Self {
        Self {
            counts: BTreeMap::new(),
            total_cells,
        }
    }

    pub fn measure(state: &LatticeState) -> Self {
        let mut counts = BTreeMap::new();
        for &v in state.values().iter().filter(|&&v| v > 0) {
            *counts.entry(v).or_insert(0) += 1;
        }
        Self {
            counts,
            total_cells: state.shape().total_cells() as u64,
        }
    }

    pub fn count(&self, r: u64) -> u64 {
        self.counts.get(&r).copied().unwrap_or(0)
    }

    /// `Q_r`: fraction of cells holding an `r`-element group.
    pub fn density(&self, r: u64) -> f64 {
        self.count(r) as f64 / self.total_cells as f64
    }

    pub fn groups(&self) -> u64 {
        self.counts.values().sum()
    }

    /// `sum_r r * count_r`.
    pub fn mass(&self) -> u64 {
        self.counts.iter().map(|(&r, &c)| r * c).sum()
    }

    pub fn max_size(&self) -> Option<u64> {
        self.counts.keys().next_back().copied()
    }

    pub(crate) fn record(&mut self, r: u64) {
        *self.counts.entry(r).or_insert(0) += 1;
    }
}

pub fn measure(state: &LatticeState) -> GroupHistogram {
    GroupHistogram::measure(state)
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Probability(p))
    }
}

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Each cell independently holds a one-element group with probability `p`.
pub fn bernoulli_state(shape: &TorusShape, p: f64, seed: u64) -> Result<LatticeState> {
    check_probability(p)?;
    let mut rng = rng_from_seed(seed);
    let values = (0..shape.total_cells())
        .map(|_| rng.random_bool(p) as u64)
        .collect();
    LatticeState::new(shape.clone(), values)
}

/// SplitMix64 output function.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of sample `j` at grid point `i`:
/// `splitmix64(splitmix64(splitmix64(master) ^ i) ^ j)`.
pub fn sample_seed(master_seed: u64, grid_index: u64, sample_index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ grid_index) ^ sample_index)
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub outcome: TrajectoryOutcome,
    /// Present only for fixed outcomes.
    pub histogram: Option<GroupHistogram>,
    pub initial_mass: u64,
}

pub fn run_sample(shape: &TorusShape, p: f64, seed: u64, max_steps: u64) -> Result<Sample> {
    let initial = bernoulli_state(shape, p, seed)?;
    let initial_mass = initial.total_mass();
    let outcome = evolve(&initial, max_steps);
    let histogram = outcome
        .is_fixed()
        .then(|| GroupHistogram::measure(&outcome.steady_state));
    Ok(Sample {
        outcome,
        histogram,
        initial_mass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub dims: Vec<usize>,
    pub p_max: f64,
    /// Grid is `p_i = i * p_max / p_steps` for `i = 0..=p_steps`;
    /// `p_steps = 0` means the single point `p_max`.
    pub p_steps: u64,
    pub samples: u64,
    pub master_seed: u64,
    /// Defaults to 100 times the longest axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<u64>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<TorusShape> {
        let shape = TorusShape::new(self.dims.clone()).map_err(|e| Error::Config {
            field: "dims",
            reason: e.to_string(),
        })?;
        if !(0.0..=1.0).contains(&self.p_max) {
            return Err(Error::Config {
                field: "p_max",
                reason: format!("{} is outside [0, 1]", self.p_max),
            });
        }
        if self.samples == 0 {
            return Err(Error::Config {
                field: "samples",
                reason: "must be at least 1".into(),
            });
        }
        if self.max_steps == Some(0) {
            return Err(Error::Config {
                field: "max_steps",
                reason: "must be at least 1".into(),
            });
        }
        Ok(shape)
    }

    pub fn grid(&self) -> Vec<f64> {
        if self.p_steps == 0 {
            return vec![self.p_max];
        }
        (0..=self.p_steps)
            .map(|i| i as f64 * self.p_max / self.p_steps as f64)
            .collect()
    }

    pub fn effective_max_steps(&self) -> u64 {
        self.max_steps
            .unwrap_or_else(|| 100 * self.dims.iter().copied().max().unwrap_or(0) as u64)
    }
}

/// Integer sums over the samples of one grid point.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct PointTally {
    samples: u64,
    fixed: u64,
    periodic: u64,
    unresolved: u64,
    n_st_sum: u64,
    n_st_sq_sum: u128,
    fixed_initial_mass: u64,
    fixed_group_mass: u64,
    count_sum: BTreeMap<u64, u64>,
    count_sq_sum: BTreeMap<u64, u128>,
    tail_sum: u64,
    tail_sq_sum: u128,
}

impl PointTally {
    fn from_sample(sample: &Sample) -> Self {
        let mut t = Self {
            samples: 1,
            ..Self::default()
        };
        match sample.outcome.outcome {
            Outcome::Fixed { n_st } => {
                let hist = sample
                    .histogram
                    .as_ref()
                    .expect("fixed samples are measured");
                t.fixed = 1;
                t.n_st_sum = n_st;
                t.n_st_sq_sum = n_st as u128 * n_st as u128;
                t.fixed_initial_mass = sample.initial_mass;
                t.fixed_group_mass = hist.mass();
                let mut tail = 0;
                for (&r, &c) in &hist.counts {
                    t.count_sum.insert(r, c);
                    t.count_sq_sum.insert(r, c as u128 * c as u128);
                    if r >= TAIL_FROM {
                        tail += c;
                    }
                }
                t.tail_sum = tail;
                t.tail_sq_sum = tail as u128 * tail as u128;
            }
            Outcome::Periodic { .. } => t.periodic = 1,
            Outcome::Unresolved => t.unresolved = 1,
        }
        t
    }

    fn merge(mut self, other: Self) -> Self {
        self.samples += other.samples;
        self.fixed += other.fixed;
        self.periodic += other.periodic;
        self.unresolved += other.unresolved;
        self.n_st_sum += other.n_st_sum;
        self.n_st_sq_sum += other.n_st_sq_sum;
        self.fixed_initial_mass += other.fixed_initial_mass;
        self.fixed_group_mass += other.fixed_group_mass;
        for (r, c) in other.count_sum {
            *self.count_sum.entry(r).or_insert(0) += c;
        }
        for (r, c) in other.count_sq_sum {
            *self.count_sq_sum.entry(r).or_insert(0) += c;
        }
        self.tail_sum += other.tail_sum;
        self.tail_sq_sum += other.tail_sq_sum;
        self
    }
}

/// Mean and standard error of a per-sample quantity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    /// From `n` samples with `sum x` and `sum x^2`, all scaled by `1 / scale`.
    pub(crate) fn from_sums(n: u64, sum: u64, sq_sum: u128, scale: f64) -> Option<Self> {
        if n == 0 {
            return None;
        }
        let nf = n as f64;
        let mean = sum as f64 / nf;
        let stderr = if n > 1 {
            // exact integer numerator: n * sum x^2 - (sum x)^2
            let num = n as u128 * sq_sum - sum as u128 * sum as u128;
            (num as f64 / (nf * (nf - 1.0)) / nf).sqrt()
        } else {
            0.0
        };
        Some(Self {
            mean: mean / scale,
            stderr: stderr / scale,
        })
    }
}

/// Aggregated statistics at one grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub index: u64,
    pub p: f64,
    pub samples: u64,
    pub fixed_count: u64,
    pub periodic_count: u64,
    pub unresolved_count: u64,
    /// Over fixed samples only.
    pub n_st: Option<Estimate>,
    /// `Q_r` over fixed samples, for every observed `r`.
    pub densities: BTreeMap<u64, Estimate>,
    /// Pooled density of groups of size `TAIL_FROM` and above.
    pub tail: Estimate,
    /// Ones in the initial states of the fixed samples.
    pub fixed_initial_mass: u64,
    /// `sum_r r * count_r` over the fixed samples.
    pub fixed_group_mass: u64,
    pub total_cells: u64,
}

impl SweepPoint {
    fn from_tally(index: u64, p: f64, total_cells: u64, t: PointTally) -> Self {
        let cells = total_cells as f64;
        let densities = t
            .count_sum
            .iter()
            .map(|(&r, &sum)| {
                let sq = t.count_sq_sum[&r];
                (r, Estimate::from_sums(t.fixed, sum, sq, cells).unwrap())
            })
            .collect();
        Self {
            index,
            p,
            samples: t.samples,
            fixed_count: t.fixed,
            periodic_count: t.periodic,
            unresolved_count: t.unresolved,
            n_st: Estimate::from_sums(t.fixed, t.n_st_sum, t.n_st_sq_sum, 1.0),
            densities,
            tail: Estimate::from_sums(t.fixed, t.tail_sum, t.tail_sq_sum, cells)
                .unwrap_or_default(),
            fixed_initial_mass: t.fixed_initial_mass,
            fixed_group_mass: t.fixed_group_mass,
            total_cells,
        }
    }

    /// Mean `Q_r`, zero when no fixed sample had an `r`-group.
    pub fn q(&self, r: u64) -> f64 {
        self.density(r).mean
    }

    pub fn density(&self, r: u64) -> Estimate {
        self.densities.get(&r).copied().unwrap_or_default()
    }

    pub fn mean_n_st(&self) -> Option<f64> {
        self.n_st.map(|e| e.mean)
    }

    pub fn periodic_fraction(&self) -> f64 {
        self.periodic_count as f64 / self.samples as f64
    }
}

/// Run `samples` trajectories at one grid point.
///
/// Sample `j` is seeded with `sample_seed(master_seed, index, j)`.
pub fn run_point(
    shape: &TorusShape,
    p: f64,
    index: u64,
    samples: u64,
    master_seed: u64,
    max_steps: u64,
) -> Result<SweepPoint> {
    check_probability(p)?;
    let tally = (0..samples)
        .into_par_iter()
        .map(|j| {
            let seed = sample_seed(master_seed, index, j);
            // p is validated and bernoulli states cannot overflow
            let sample = run_sample(shape, p, seed, max_steps).expect("valid sample");
            PointTally::from_sample(&sample)
        })
        .reduce(PointTally::default, PointTally::merge);
    Ok(SweepPoint::from_tally(
        index,
        p,
        shape.total_cells() as u64,
        tally,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub points: Vec<SweepPoint>,
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    run_sweep_with(config, |_| {})
}

/// [`run_sweep`], calling `on_point` after each grid point completes.
pub fn run_sweep_with<F>(config: &SweepConfig, mut on_point: F) -> Result<SweepResult>
where
    F: FnMut(&SweepPoint),
{
    let shape = config.validate()?;
    let max_steps = config.effective_max_steps();
    let mut points = Vec::new();
    for (i, p) in config.grid().into_iter().enumerate() {
        let point = run_point(
            &shape,
            p,
            i as u64,
            config.samples,
            config.master_seed,
            max_steps,
        )?;
        on_point(&point);
        points.push(point);
    }
    Ok(SweepResult {
        config: config.clone(),
        points,
    })
}

pub const SWEEP_CSV_HEADER: &str =
    "p,r,mean_q,stderr_q,mean_n_st,fixed_count,periodic_count,unresolved_count,samples";

impl SweepResult {
    /// Per grid point: one `r = 0` summary row, then rows for `r = 1..=4`
    /// and every larger observed `r`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{SWEEP_CSV_HEADER}")?;
        for pt in &self.points {
            let n_st = pt.mean_n_st().map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},0,,,{},{},{},{},{}",
                pt.p, n_st, pt.fixed_count, pt.periodic_count, pt.unresolved_count, pt.samples
            )?;
            let observed = pt.densities.keys().copied().filter(|&r| r > 4);
            for r in (1..=4).chain(observed) {
                let d = pt.density(r);
                writeln!(w, "{},{},{},{},,,,,", pt.p, r, d.mean, d.stderr)?;
            }
        }
        Ok(())
    }
}
