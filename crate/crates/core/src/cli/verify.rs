//! Property and reproduction checks behind `groupform verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{step, step_oracle};
use crate::lattice::{LatticeState, TorusShape};
use crate::montecarlo::run_point;
use crate::primitive::{analytic_densities, compare_primitive};
use crate::steady::{evolve_with, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Scale {
    Quick,
    Full,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name,
            passed,
            detail: detail.into(),
        }
    }
}

pub type StepFn<'a> = &'a (dyn Fn(&LatticeState) -> LatticeState + Sync);

const RANDOM_STATES: usize = 10_000;
const VERIFY_SEED: u64 = 0x5eed_0f9a;

/// Random 1D state with `M` in `[3, 16]` or 2D state up to 8x8, values in `[0, 3]`.
pub fn random_state(rng: &mut impl Rng, two_d: bool) -> LatticeState {
    let shape = if two_d {
        TorusShape::plane(rng.random_range(3..=8), rng.random_range(3..=8))
    } else {
        TorusShape::line(rng.random_range(3..=16))
    }
    .unwrap();
    let values = (0..shape.total_cells())
        .map(|_| rng.random_range(0..=3))
        .collect();
    LatticeState::new(shape, values).unwrap()
}

fn random_offset(rng: &mut impl Rng, state: &LatticeState) -> Vec<i64> {
    state
        .shape()
        .dims()
        .iter()
        .map(|&d| rng.random_range(-(2 * d as i64)..=2 * d as i64))
        .collect()
}

fn count_failures(
    step_fn: StepFn,
    seed: u64,
    test: impl Fn(StepFn, &LatticeState, &mut ChaCha8Rng) -> bool,
) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for i in 0..2 * RANDOM_STATES {
        let state = random_state(&mut rng, i % 2 == 1);
        if !test(step_fn, &state, &mut rng) {
            failures += 1;
        }
    }
    failures
}

fn property(name: &'static str, failures: usize) -> Check {
    Check::new(
        name,
        failures == 0,
        format!("{failures} of {} random states failed", 2 * RANDOM_STATES),
    )
}

fn line(values: &[u64]) -> LatticeState {
    LatticeState::new(TorusShape::line(values.len()).unwrap(), values.to_vec()).unwrap()
}

pub fn quick_checks(step_fn: StepFn) -> Vec<Check> {
    let mut checks = Vec::new();

    checks.push(property(
        "oracle equivalence",
        count_failures(step_fn, VERIFY_SEED, |f, s, _| f(s) == step_oracle(s)),
    ));
    checks.push(property(
        "mass conservation",
        count_failures(step_fn, VERIFY_SEED + 1, |f, s, _| {
            f(s).total_mass() == s.total_mass()
        }),
    ));
    checks.push(property(
        "translation equivariance",
        count_failures(step_fn, VERIFY_SEED + 2, |f, s, rng| {
            let a = random_offset(rng, s);
            f(&s.shift(&a).unwrap()) == f(s).shift(&a).unwrap()
        }),
    ));
    checks.push(property(
        "reflection equivariance",
        count_failures(step_fn, VERIFY_SEED + 3, |f, s, _| {
            f(&s.reflect()) == f(s).reflect()
        }),
    ));

    let merge = step_fn(&line(&[1, 1, 0, 1, 1, 0, 0])) == line(&[0, 0, 2, 0, 0, 1, 1]);
    let fixed = evolve_with(&line(&[1, 1, 0, 1, 1, 0, 0]), 100, step_fn);
    let fixed_ok = fixed.outcome == Outcome::Fixed { n_st: 2 }
        && fixed.steady_state == line(&[1, 0, 2, 0, 1, 0, 0]);
    let cycle = evolve_with(&line(&[1, 1, 1, 0, 0]), 100, step_fn);
    let cycle_ok = cycle.outcome
        == Outcome::Periodic {
            entry_time: 0,
            period: 2,
        };
    checks.push(Check::new(
        "worked examples",
        merge && fixed_ok && cycle_ok,
        format!("Z7 merge step {merge}, Z7 fixed point {fixed_ok}, Z5 period-2 cycle {cycle_ok}"),
    ));

    let worst_identity = (0..100)
        .map(|i| {
            let p = i as f64 / 99.0;
            let d = analytic_densities(p).unwrap();
            (d.q1 + 2.0 * d.q2 + 3.0 * d.q3 - p).abs()
        })
        .fold(0.0, f64::max);
    checks.push(Check::new(
        "primitive mass identity",
        worst_identity <= 4.0 * f64::EPSILON,
        format!("max |q1 + 2 q2 + 3 q3 - p| = {worst_identity:e}"),
    ));

    let mut worst_gap: f64 = 0.0;
    let mut worst_z: f64 = 0.0;
    for (i, &p) in [0.1, 0.3, 0.5, 0.7, 0.9].iter().enumerate() {
        let cmp = compare_primitive(10_000, p, i as u64, 100, VERIFY_SEED).unwrap();
        for r in 0..3 {
            let est = cmp.monte_carlo[r];
            let gap = (est.mean - cmp.analytic.get(r as u64 + 1)).abs();
            worst_gap = worst_gap.max(gap);
            if est.stderr > 0.0 {
                worst_z = worst_z.max(gap / est.stderr);
            }
        }
    }
    checks.push(Check::new(
        "primitive convergence",
        worst_gap <= 0.005 && worst_z <= 4.0,
        format!("max |dQ| = {worst_gap:.2e}, max |dQ|/stderr = {worst_z:.2}"),
    ));

    checks
}

pub fn full_checks() -> Vec<Check> {
    let shape = TorusShape::line(3000).unwrap();
    let cap = 300_000;

    let relax = run_point(&shape, 0.8, 0, 500, VERIFY_SEED, cap).unwrap();
    let n_st = relax.mean_n_st().unwrap_or(f64::NAN);
    let mut checks = vec![Check::new(
        "relaxation time M=3000 p=0.8",
        (n_st - 50.0).abs() <= 2.0,
        format!(
            "mean N_st = {n_st:.3} over {} fixed samples",
            relax.fixed_count
        ),
    )];

    let mut failing = Vec::new();
    for i in 0..6u64 {
        let p = (70 + 5 * i) as f64 / 100.0;
        let pt = run_point(&shape, p, 1 + i, 1000, VERIFY_SEED, cap).unwrap();
        let q2 = pt.q(2);
        if ![1, 3, 4].iter().all(|&r| q2 > pt.q(r)) {
            failing.push(format!("p={p}"));
        }
    }
    checks.push(Check::new(
        "two-element dominance M=3000",
        failing.is_empty(),
        if failing.is_empty() {
            "Q_2 leads at p = 0.70..0.95".to_string()
        } else {
            format!("Q_2 does not lead at {}", failing.join(", "))
        },
    ));
    checks
}

pub fn run(scale: Scale) -> Vec<Check> {
    let mut checks = quick_checks(&step);
    if scale == Scale::Full {
        checks.extend(full_checks());
    }
    checks
}
