//! The `groupform` command line.
//!
//! Exit codes: 0 on success, 1 when a verification check fails, 2 on a usage
//! or configuration error. Progress goes to stderr; data goes to files or
//! stdout.

pub mod verify;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::dynamics::step;
use crate::error::{Error, Result};
use crate::lattice::{LatticeState, TorusShape};
use crate::montecarlo::{bernoulli_state, run_sweep_with, SweepConfig};
use crate::primitive::{compare_primitive, PrimitiveComparison};
use crate::steady::{default_max_steps, evolve, Outcome};

pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "groupform",
    version,
    about = "Group formation dynamics on discrete tori"
)]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve one state and write its trajectory.
    Simulate(SimulateArgs),
    /// Monte Carlo sweep over a p grid.
    Sweep(SweepArgs),
    /// Closed-form versus sampled densities of the one-step model.
    Primitive(PrimitiveArgs),
    /// Run the property and reproduction checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON state file `{"dims": [...], "values": [...]}`.
    #[arg(long, conflicts_with_all = ["dims", "p"])]
    pub state: Option<PathBuf>,
    /// Torus dims for a random Bernoulli initial state.
    #[arg(long, num_args = 1..=2, requires = "p")]
    pub dims: Option<Vec<usize>>,
    /// One-element group probability for the random initial state.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Step cap (default: 100 times the longest axis).
    #[arg(long)]
    pub max_steps: Option<u64>,
    /// JSON-lines trajectory output; the outcome record always goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON sweep config.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory for `sweep.csv` and `manifest.json`.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides `master_seed` from the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides `max_steps` from the config.
    #[arg(long)]
    pub max_steps: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PrimitiveArgs {
    #[arg(long, default_value_t = 1.0)]
    pub p_max: f64,
    #[arg(long, default_value_t = 20)]
    pub p_steps: u64,
    /// Even torus size.
    #[arg(long, default_value_t = 10_000)]
    pub m: usize,
    /// Realizations per grid point.
    #[arg(long, default_value_t = 100)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV output (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "quick")]
    pub scale: verify::Scale,
}

#[derive(Debug, Serialize)]
pub struct RunManifest<C: Serialize> {
    pub command: &'static str,
    pub version: &'static str,
    pub config: C,
    pub master_seed: u64,
    pub threads: usize,
    pub wall_clock_secs: f64,
    pub outputs: Vec<PathBuf>,
}

pub fn run(cli: Cli) -> ExitCode {
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let result = match cli.command {
        Command::Simulate(args) => simulate(&args).map(|()| ExitCode::SUCCESS),
        Command::Sweep(args) => sweep(&args).map(|()| ExitCode::SUCCESS),
        Command::Primitive(args) => primitive(&args).map(|()| ExitCode::SUCCESS),
        Command::Verify(args) => Ok(verify_cmd(&args)),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_USAGE)
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let (initial, source) = match (&args.state, &args.dims, args.p) {
        (Some(path), _, _) => {
            let text = fs::read_to_string(path)?;
            let state: LatticeState = serde_json::from_str(&text)?;
            (state, json!({ "state_file": path }))
        }
        (None, Some(dims), Some(p)) => {
            let shape = TorusShape::new(dims.clone())?;
            let state = bernoulli_state(&shape, p, args.seed)?;
            (state, json!({ "dims": dims, "p": p, "seed": args.seed }))
        }
        _ => {
            return Err(Error::Config {
                field: "state",
                reason: "give --state FILE or --dims with --p".into(),
            })
        }
    };
    let max_steps = args
        .max_steps
        .unwrap_or_else(|| default_max_steps(&initial));
    if max_steps == 0 {
        return Err(Error::Config {
            field: "max_steps",
            reason: "must be at least 1".into(),
        });
    }
    let result = evolve(&initial, max_steps);

    if let Some(path) = &args.out {
        let mut w = create(path)?;
        let mut state = initial.clone();
        serde_json::to_writer(&mut w, &state)?;
        writeln!(w)?;
        for _ in 0..result.steps_taken {
            state = step(&state);
            serde_json::to_writer(&mut w, &state)?;
            writeln!(w)?;
        }
        w.flush()?;
    }

    let mut record = serde_json::to_value(result.outcome)?;
    let fields = record
        .as_object_mut()
        .expect("outcome serializes as an object");
    fields.insert("steps_taken".into(), json!(result.steps_taken));
    fields.insert("mass".into(), json!(initial.total_mass()));
    fields.insert("max_steps".into(), json!(max_steps));
    fields.insert("source".into(), source);
    fields.insert(
        "steady_state".into(),
        serde_json::to_value(&result.steady_state)?,
    );
    if result.outcome == Outcome::Unresolved {
        eprintln!("warning: no steady state within {max_steps} steps");
    }
    let mut stdout = io::stdout().lock();
    serde_json::to_writer(&mut stdout, &record)?;
    writeln!(stdout)?;
    Ok(())
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    let started = Instant::now();
    let text = fs::read_to_string(&args.config)?;
    let mut config: SweepConfig = serde_json::from_str(&text)?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if args.max_steps.is_some() {
        config.max_steps = args.max_steps;
    }
    config.validate()?;
    // pin the cap so the manifest alone reproduces the run
    config.max_steps = Some(config.effective_max_steps());

    let grid_len = config.grid().len();
    let result = run_sweep_with(&config, |pt| {
        eprintln!(
            "[{}/{}] p={} fixed={} periodic={} unresolved={} N_st={}",
            pt.index + 1,
            grid_len,
            pt.p,
            pt.fixed_count,
            pt.periodic_count,
            pt.unresolved_count,
            pt.mean_n_st()
                .map_or("-".to_string(), |v| format!("{v:.3}")),
        );
    })?;

    fs::create_dir_all(&args.out)?;
    let csv_path = args.out.join("sweep.csv");
    let mut w = create(&csv_path)?;
    result.write_csv(&mut w)?;
    w.flush()?;

    let manifest = RunManifest {
        command: "sweep",
        version: env!("CARGO_PKG_VERSION"),
        master_seed: config.master_seed,
        config,
        threads: rayon::current_num_threads(),
        wall_clock_secs: started.elapsed().as_secs_f64(),
        outputs: vec![csv_path],
    };
    let mut m = create(&args.out.join("manifest.json"))?;
    serde_json::to_writer_pretty(&mut m, &manifest)?;
    writeln!(m)?;
    m.flush()?;
    Ok(())
}

pub const PRIMITIVE_CSV_HEADER: &str =
    "p,q1_analytic,q2_analytic,q3_analytic,q1_mc,q2_mc,q3_mc,q1_stderr,q2_stderr,q3_stderr";

pub fn primitive_table(args: &PrimitiveArgs) -> Result<Vec<PrimitiveComparison>> {
    if !(0.0..=1.0).contains(&args.p_max) {
        return Err(Error::Probability(args.p_max));
    }
    if args.m < 4 || !args.m.is_multiple_of(2) {
        return Err(Error::PrimitiveSize(args.m));
    }
    let grid: Vec<f64> = if args.p_steps == 0 {
        vec![args.p_max]
    } else {
        (0..=args.p_steps)
            .map(|i| i as f64 * args.p_max / args.p_steps as f64)
            .collect()
    };
    grid.par_iter()
        .enumerate()
        .map(|(i, &p)| compare_primitive(args.m, p, i as u64, args.seeds, args.seed))
        .collect()
}

pub fn write_primitive_csv<W: Write>(rows: &[PrimitiveComparison], mut w: W) -> io::Result<()> {
    writeln!(w, "{PRIMITIVE_CSV_HEADER}")?;
    for row in rows {
        let a = &row.analytic;
        let [m1, m2, m3] = row.monte_carlo;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            a.p, a.q1, a.q2, a.q3, m1.mean, m2.mean, m3.mean, m1.stderr, m2.stderr, m3.stderr
        )?;
    }
    Ok(())
}

pub fn primitive(args: &PrimitiveArgs) -> Result<()> {
    let started = Instant::now();
    let rows = primitive_table(args)?;
    match &args.out {
        Some(path) => {
            let mut w = create(path)?;
            write_primitive_csv(&rows, &mut w)?;
            w.flush()?;
            let manifest = RunManifest {
                command: "primitive",
                version: env!("CARGO_PKG_VERSION"),
                config: json!({
                    "p_max": args.p_max,
                    "p_steps": args.p_steps,
                    "m": args.m,
                    "seeds": args.seeds,
                }),
                master_seed: args.seed,
                threads: rayon::current_num_threads(),
                wall_clock_secs: started.elapsed().as_secs_f64(),
                outputs: vec![path.clone()],
            };
            let mut name = path.as_os_str().to_owned();
            name.push(".manifest.json");
            let mut m = create(Path::new(&name))?;
            serde_json::to_writer_pretty(&mut m, &manifest)?;
            writeln!(m)?;
            m.flush()?;
        }
        None => write_primitive_csv(&rows, io::stdout().lock())?,
    }
    Ok(())
}

fn verify_cmd(args: &VerifyArgs) -> ExitCode {
    let started = Instant::now();
    let checks = verify::run(args.scale);
    let mut failed = 0;
    for c in &checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("{tag} {}: {}", c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    eprintln!(
        "{} checks, {failed} failed, {:.1}s",
        checks.len(),
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY_FAILED)
    }
}
