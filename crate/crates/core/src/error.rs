use thiserror::Error;

use crate::qcore::GateName;
use crate::simulator::CircuitError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit index {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("control and target are both qubit {0}")]
    ControlIsTarget(usize),

    #[error("dimension mismatch: {left} qubits vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("expected a single-qubit {what}, got {n_qubits} qubits")]
    NotSingleQubit { what: &'static str, n_qubits: usize },

    #[error("gate {0} is not a single-qubit gate")]
    NotSingleQubitGate(GateName),

    #[error("unknown gate '{0}' (expected one of i, x, y, z, h, s, t, cx)")]
    UnknownGate(String),

    #[error("register of {0} qubits is unsupported (1..=24)")]
    RegisterSize(usize),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("{name} = {value} is outside [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("shots must be at least 1")]
    ZeroShots,

    #[error("classical bit {bit} does not exist in {n_bits}-bit outcomes")]
    UnknownClassicalBit { bit: usize, n_bits: usize },

    #[error("GHZ register size {0} outside 3..=5")]
    GhzSize(usize),

    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

pub type Result<T> = std::result::Result<T, Error>;
