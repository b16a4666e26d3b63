//! Competition-accumulation group formation on discrete tori.
//!
//! Each occupied cell of a 1D or 2D torus is pushed away from its neighbors by
//! the integer central difference of their occupancies; groups that land on
//! the same cell merge. Random one-element initial states are evolved until
//! they become constant, and the steady-state group-size densities `Q_r(p)`
//! and relaxation times `N_st` are averaged over many samples.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod montecarlo;
pub mod primitive;
pub mod steady;

pub use dynamics::{gradient, step, step_oracle, step_with, Displacement};
pub use error::{Error, Result};
pub use lattice::{LatticeState, TorusShape};
pub use montecarlo::{
    bernoulli_state, measure, run_point, run_sample, run_sweep, GroupHistogram, SweepConfig,
    SweepPoint, SweepResult,
};
pub use primitive::{analytic_densities, simulate_primitive, PrimitiveDensities};
pub use steady::{evolve, evolve_with, trajectory, Outcome, TrajectoryOutcome};
