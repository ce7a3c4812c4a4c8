use super::exec::cbit_mask;
use super::{Circuit, CircuitError, ErrorKind, Instruction};
use crate::error::{Error, Result};
use crate::qcore::{bitstring, cached_gate, StateVector, MAX_QUBITS};

/// One measurement history: its probability, classical register (as an
/// index, bit 0 most significant) and the normalized post-measurement state.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub probability: f64,
    pub classical: u64,
    pub state: StateVector,
}

impl Branch {
    pub fn bit(&self, n_classical_bits: usize, cbit: usize) -> u8 {
        u8::from(self.classical & cbit_mask(n_classical_bits, cbit) != 0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticResult {
    pub n_classical_bits: usize,
    pub branches: Vec<Branch>,
    measured: bool,
}

impl AnalyticResult {
    /// Exact probability of every classical register value, indexed like
    /// [`bitstring`](crate::qcore::bitstring).
    pub fn distribution(&self) -> Vec<f64> {
        let mut out = vec![0.0; 1usize << self.n_classical_bits];
        for b in &self.branches {
            out[b.classical as usize] += b.probability;
        }
        out
    }

    pub fn bitstrings(&self) -> Vec<String> {
        (0..1usize << self.n_classical_bits)
            .map(|k| bitstring(k, self.n_classical_bits))
            .collect()
    }

    /// The final pure state, available only when nothing was measured.
    pub fn state(&self) -> Option<&StateVector> {
        if self.measured {
            None
        } else {
            self.branches.first().map(|b| &b.state)
        }
    }
}

pub fn run_analytic(circuit: &Circuit) -> Result<AnalyticResult> {
    run_analytic_from(circuit, StateVector::zero(circuit.n_qubits)?)
}

/// Exact noiseless run from `initial`, enumerating every measurement branch.
pub fn run_analytic_from(circuit: &Circuit, initial: StateVector) -> Result<AnalyticResult> {
    circuit.validate()?;
    if initial.n_qubits() != circuit.n_qubits {
        return Err(Error::DimensionMismatch {
            left: circuit.n_qubits,
            right: initial.n_qubits(),
        });
    }
    let ncl = circuit.n_classical_bits;
    if ncl > MAX_QUBITS {
        return Err(CircuitError::new(
            ErrorKind::IndexOutOfRange,
            None,
            format!("analytic runs support at most {MAX_QUBITS} classical bits, got {ncl}"),
        )
        .into());
    }
    let mut branches = vec![Branch {
        probability: 1.0,
        classical: 0,
        state: initial,
    }];
    let mut measured = false;
    for instr in &circuit.instructions {
        match *instr {
            Instruction::Gate1 { gate, target } => {
                for b in &mut branches {
                    b.state.apply_1q_in_place(cached_gate(gate), target)?;
                }
            }
            Instruction::Cnot { control, target } => {
                for b in &mut branches {
                    b.state.apply_cnot_in_place(control, target)?;
                }
            }
            Instruction::Measure { qubit, cbit } => {
                measured = true;
                let mask = cbit_mask(ncl, cbit);
                let mut next = Vec::with_capacity(branches.len() * 2);
                for b in branches {
                    for bit in 0..2u8 {
                        let mut state = b.state.clone();
                        let p = state.project_in_place(qubit, bit);
                        if p > 0.0 {
                            next.push(Branch {
                                probability: b.probability * p,
                                classical: if bit == 1 {
                                    b.classical | mask
                                } else {
                                    b.classical & !mask
                                },
                                state,
                            });
                        }
                    }
                }
                branches = next;
            }
            Instruction::Conditional {
                gate,
                target,
                cbit,
                value,
            } => {
                for b in &mut branches {
                    if b.bit(ncl, cbit) == value {
                        b.state.apply_1q_in_place(cached_gate(gate), target)?;
                    }
                }
            }
        }
    }
    Ok(AnalyticResult {
        n_classical_bits: ncl,
        branches,
        measured,
    })
}
