//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use groupform::cli::verify::random_state;
use groupform::montecarlo::run_point;
use groupform::primitive::compare_primitive;
use groupform::{analytic_densities, evolve, step, step_oracle, LatticeState, Outcome, TorusShape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

const RANDOM_STATES: usize = 10_000;

fn line(values: &[u64]) -> LatticeState {
    LatticeState::new(TorusShape::line(values.len()).unwrap(), values.to_vec()).unwrap()
}

fn uncapped(shape: &TorusShape) -> u64 {
    100 * shape.max_dim() as u64
}

fn primitive_closed_forms() -> Verdict {
    let mut worst_gap: f64 = 0.0;
    for (i, &p) in [0.1, 0.3, 0.5, 0.7, 0.9].iter().enumerate() {
        let cmp = compare_primitive(10_000, p, i as u64, 100, 101).unwrap();
        for r in 0..3 {
            let gap = (cmp.monte_carlo[r].mean - cmp.analytic.get(r as u64 + 1)).abs();
            worst_gap = worst_gap.max(gap);
        }
    }
    let worst_identity = (0..100)
        .map(|i| {
            let p = i as f64 / 99.0;
            let d = analytic_densities(p).unwrap();
            (d.q1 + 2.0 * d.q2 + 3.0 * d.q3 - p).abs()
        })
        .fold(0.0, f64::max);
    verdict(
        worst_gap <= 0.005 && worst_identity <= 4.0 * f64::EPSILON,
        format!(
            "max |dQ_r| = {worst_gap:.2e} (<= 5e-3), max identity residual = {worst_identity:.1e}"
        ),
    )
}

fn relaxation_time() -> Verdict {
    let mut passed = true;
    let mut parts = Vec::new();
    for (idx, (m, expected)) in [(3000usize, 50.0), (4000, 52.5)].into_iter().enumerate() {
        let shape = TorusShape::line(m).unwrap();
        let pt = run_point(&shape, 0.8, idx as u64, 2000, 202, uncapped(&shape)).unwrap();
        let n_st = pt.mean_n_st().unwrap_or(f64::NAN);
        passed &= pt.fixed_count >= 500 && (n_st - expected).abs() <= 2.0;
        parts.push(format!(
            "M={m}: N_st = {n_st:.3} +/- {:.3} (target {expected} +/- 2, {} fixed)",
            pt.n_st.map_or(f64::NAN, |e| e.stderr),
            pt.fixed_count
        ));
    }
    verdict(passed, parts.join("; "))
}

fn two_element_dominance() -> Verdict {
    let shape = TorusShape::line(3000).unwrap();
    let mut failing = Vec::new();
    let mut tightest = f64::INFINITY;
    for i in 0..6u64 {
        let p = (70 + 5 * i) as f64 / 100.0;
        let pt = run_point(&shape, p, i, 1000, 303, uncapped(&shape)).unwrap();
        let others = [1, 3, 4].map(|r| pt.q(r));
        let lead = pt.q(2) - others.iter().copied().fold(f64::MIN, f64::max);
        tightest = tightest.min(lead);
        if lead <= 0.0 || pt.fixed_count < 1000 {
            failing.push(format!("p={p}"));
        }
    }
    verdict(
        failing.is_empty(),
        format!("smallest lead of Q_2 over Q_1,Q_3,Q_4 = {tightest:.4}; failing: {failing:?}"),
    )
}

fn size_insensitivity() -> Verdict {
    let small = TorusShape::line(300).unwrap();
    let large = TorusShape::line(3000).unwrap();
    let a = run_point(&small, 0.6, 0, 2000, 404, uncapped(&small)).unwrap();
    let b = run_point(&large, 0.6, 1, 2000, 404, uncapped(&large)).unwrap();
    let d1 = (a.q(1) - b.q(1)).abs();
    let d2 = (a.q(2) - b.q(2)).abs();
    verdict(
        d1 < 0.01 && d2 < 0.01 && a.fixed_count >= 2000 && b.fixed_count >= 2000,
        format!(
            "|dQ_1| = {d1:.2e}, |dQ_2| = {d2:.2e} (< 1e-2; fixed {} / {})",
            a.fixed_count, b.fixed_count
        ),
    )
}

fn constant_steady_prevalence() -> Verdict {
    let shape = TorusShape::line(3000).unwrap();
    let mut worst = (0.0, 0.0);
    for i in 1..=19u64 {
        let p = (5 * i) as f64 / 100.0;
        let pt = run_point(&shape, p, i, 2000, 505, uncapped(&shape)).unwrap();
        if pt.periodic_fraction() >= worst.1 {
            worst = (p, pt.periodic_fraction());
        }
    }
    verdict(
        worst.1 < 0.01,
        format!(
            "largest periodic fraction {:.4} at p = {} over p = 0.05..0.95",
            worst.1, worst.0
        ),
    )
}

fn oracle_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut mismatches = [0usize; 2];
    for (dim, slot) in mismatches.iter_mut().enumerate() {
        for _ in 0..RANDOM_STATES {
            let s = random_state(&mut rng, dim == 1);
            if step(&s) != step_oracle(&s) {
                *slot += 1;
            }
        }
    }
    verdict(
        mismatches == [0, 0],
        format!(
            "mismatches: 1D {} / {RANDOM_STATES}, 2D {} / {RANDOM_STATES}",
            mismatches[0], mismatches[1]
        ),
    )
}

fn property_suite() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut failures = [0usize; 3];
    for i in 0..2 * RANDOM_STATES {
        let s = random_state(&mut rng, i % 2 == 1);
        let next = step(&s);
        failures[0] += usize::from(next.total_mass() != s.total_mass());
        let offset: Vec<i64> = s
            .shape()
            .dims()
            .iter()
            .map(|&d| rng.random_range(-(d as i64)..=d as i64))
            .collect();
        failures[1] +=
            usize::from(step(&s.shift(&offset).unwrap()) != next.shift(&offset).unwrap());
        failures[2] += usize::from(step(&s.reflect()) != next.reflect());
    }

    let z7 = line(&[1, 1, 0, 1, 1, 0, 0]);
    let merge = step_oracle(&z7) == line(&[0, 0, 2, 0, 0, 1, 1]);
    let z7_out = evolve(&z7, 100);
    let fixed = z7_out.outcome == Outcome::Fixed { n_st: 2 }
        && z7_out.steady_state == line(&[1, 0, 2, 0, 1, 0, 0])
        && step_oracle(&z7_out.steady_state) == z7_out.steady_state;
    let z5 = line(&[1, 1, 1, 0, 0]);
    let z5_out = evolve(&z5, 100);
    let cycle = z5_out.outcome
        == Outcome::Periodic {
            entry_time: 0,
            period: 2,
        }
        && step_oracle(&z5) == line(&[0, 1, 0, 1, 1])
        && step_oracle(&step_oracle(&z5)) == z5;

    verdict(
        failures == [0, 0, 0] && merge && fixed && cycle,
        format!(
            "failures over {} states: mass {}, translation {}, reflection {}; Z7 merge {merge}, Z7 fixed {fixed}, Z5 cycle {cycle}",
            2 * RANDOM_STATES,
            failures[0],
            failures[1],
            failures[2]
        ),
    )
}

fn spread(pt: &groupform::SweepPoint) -> f64 {
    let q: Vec<f64> = (1..=4).map(|r| pt.q(r)).collect();
    q.iter().copied().fold(f64::MIN, f64::max) - q.iter().copied().fold(f64::MAX, f64::min)
}

fn planar_spread() -> Verdict {
    let plane = TorusShape::plane(200, 200).unwrap();
    let ring = TorusShape::line(3000).unwrap();
    let p2 = run_point(&plane, 0.9, 0, 500, 808, uncapped(&plane)).unwrap();
    let p1 = run_point(&ring, 0.9, 1, 1000, 808, uncapped(&ring)).unwrap();
    let (s2, s1) = (spread(&p2), spread(&p1));
    verdict(
        s2 < s1 && p2.fixed_count > 0,
        format!(
            "2D spread {s2:.4} ({} fixed, {} periodic, {} unresolved) vs 1D spread {s1:.4}",
            p2.fixed_count, p2.periodic_count, p2.unresolved_count
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 primitive closed forms", primitive_closed_forms),
        ("2 relaxation time", relaxation_time),
        ("3 two-element dominance", two_element_dominance),
        ("4 size insensitivity", size_insensitivity),
        (
            "5 constant steady-state prevalence",
            constant_steady_prevalence,
        ),
        ("6 oracle equivalence", oracle_equivalence),
        ("7 property suite", property_suite),
        ("8 planar spread", planar_spread),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (name, criterion) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let t = Instant::now();
        let v = criterion();
        let tag = if v.passed { "PASS" } else { "FAIL" };
        println!(
            "{tag} criterion {name}: {} [{:.1}s]",
            v.detail,
            t.elapsed().as_secs_f64()
        );
        failed += usize::from(!v.passed);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
