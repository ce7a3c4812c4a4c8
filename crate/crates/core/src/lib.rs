//! Dense statevector simulation of small quantum circuits, a line-oriented
//! circuit language, and drivers for state preparation, Bell/GHZ generation
//! and quantum teleportation.
//!
//! Qubit 0 is the leftmost tensor factor everywhere: in a basis index `k` of
//! an `n`-qubit register, qubit `q` is bit `n - 1 - q`. Classical bitstrings
//! are rendered bit 0 first.

pub mod dsl;
pub mod error;
pub mod protocols;
pub mod qcore;
pub mod simulator;

pub use error::{Error, Result};
pub use qcore::{
    bloch_vector, density_from_state, equal_up_to_global_phase, fidelity_pure, partial_trace,
    standard_gate, tensor, BlochVector, DensityMatrix, Gate, GateName, StateVector, C64,
};
pub use simulator::{Circuit, Histogram, Instruction, NoiseModel, RunConfig};
