//! Exact complex linear algebra on small registers.

mod density;
mod gate;
mod state;

pub use density::{
    bloch_vector, density_from_state, fidelity_pure, partial_trace, reduced_qubit, BlochVector,
    DensityMatrix,
};
pub(crate) use gate::cached_gate;
pub use gate::{standard_gate, Gate, GateMatrix, GateName};
pub use state::{
    apply_1q, apply_cnot, equal_up_to_global_phase, probabilities, tensor, StateVector, MAX_QUBITS,
};

pub use num_complex::Complex64 as C64;

/// Tolerance for exact algebra (single gates, closed-form identities).
pub const EXACT_TOL: f64 = 1e-12;
/// Tolerance for accumulated pipelines (norms, traces after many steps).
pub const PIPELINE_TOL: f64 = 1e-10;

/// Renders basis index `index` of an `width`-bit register, bit 0 first.
pub fn bitstring(index: usize, width: usize) -> String {
    (0..width)
        .map(|b| if index >> (width - 1 - b) & 1 == 1 { '1' } else { '0' })
        .collect()
}
