//! Search over interactions that respect an additive conservation law.
//!
//! Feasibility is exact: interactions are `exp(i Σ θ_k G_k)` with `G_k`
//! spanning the hermitian commutant of the conserved total.

mod commutant;
mod search;
mod sweep;

pub use commutant::{
    commutant_basis, conservative_unitary, exchange_theta, CommutantBasis, Generator,
    GeneratorKind,
};
pub use search::{
    optimize_noise, NoiseProblem, Objective, OptimizationRun, OptimizerConfig, RestartSummary,
};
pub use sweep::{
    spin_ladder_probe, spin_ladder_problem, sweep_probe_size, ProbeFamily, SpinLadderProbe,
    SweepRow, MAX_SWEEP_CUTOFF,
};
