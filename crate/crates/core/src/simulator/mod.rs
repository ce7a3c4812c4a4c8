//! Circuit execution: exact branch enumeration, seeded shot sampling with
//! measurement collapse, classically conditioned gates, Monte-Carlo Pauli
//! noise and post-selection.

mod analytic;
mod circuit;
mod exec;
mod histogram;
mod noise;
mod rng;

pub use analytic::{run_analytic, run_analytic_from, AnalyticResult, Branch};
pub use circuit::{
    Circuit, CircuitError, ErrorKind, Instruction, Warning, ADVISORY_QUBITS, MAX_CLASSICAL_BITS,
};
pub use exec::{
    conditional_apply, measure_collapse, run_shots, run_shots_map, run_shots_map_from, RunConfig,
    Trajectory,
};
pub use histogram::{post_select, Histogram};
pub use noise::{apply_noise, NoiseModel, Pauli};
pub use rng::{shot_rng, ShotRng};
