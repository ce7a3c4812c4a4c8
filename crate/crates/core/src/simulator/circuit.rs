use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qcore::{GateName, MAX_QUBITS};

/// Register size of the cloud processor; larger circuits validate with a warning.
pub const ADVISORY_QUBITS: usize = 5;
/// Classical registers are packed into a `u64`.
pub const MAX_CLASSICAL_BITS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    Syntax,
    UnknownGate,
    IndexOutOfRange,
    ClassicalBitUndefined,
    QubitAfterMeasure,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Syntax => "syntax",
            ErrorKind::UnknownGate => "unknown-gate",
            ErrorKind::IndexOutOfRange => "index-out-of-range",
            ErrorKind::ClassicalBitUndefined => "classical-bit-undefined",
            ErrorKind::QubitAfterMeasure => "qubit-after-measure",
        })
    }
}

/// A malformed circuit. `instruction` is the offending position, if any.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{kind}: {message}")]
pub struct CircuitError {
    pub kind: ErrorKind,
    pub instruction: Option<usize>,
    pub message: String,
}

impl CircuitError {
    pub fn new(kind: ErrorKind, instruction: Option<usize>, message: impl Into<String>) -> Self {
        Self {
            kind,
            instruction,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Warning {
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Instruction {
    Gate1 {
        gate: GateName,
        target: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Measure {
        qubit: usize,
        cbit: usize,
    },
    /// Applies `gate` to `target` iff classical bit `cbit` holds `value`.
    Conditional {
        gate: GateName,
        target: usize,
        cbit: usize,
        value: u8,
    },
}

impl Instruction {
    pub fn is_unitary(&self) -> bool {
        matches!(self, Instruction::Gate1 { .. } | Instruction::Cnot { .. })
    }

    fn qubits(&self) -> [Option<usize>; 2] {
        match *self {
            Instruction::Gate1 { target, .. } => [Some(target), None],
            Instruction::Cnot { control, target } => [Some(control), Some(target)],
            Instruction::Measure { qubit, .. } => [Some(qubit), None],
            Instruction::Conditional { target, .. } => [Some(target), None],
        }
    }
}

/// An ordered instruction list over `n_qubits` qubits and `n_classical_bits` bits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub n_classical_bits: usize,
    pub instructions: Vec<Instruction>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            n_classical_bits: 0,
            instructions: Vec::new(),
        }
    }

    /// Appends an instruction, growing the classical register as needed.
    pub fn push(&mut self, instruction: Instruction) -> &mut Self {
        if let Instruction::Measure { cbit, .. } | Instruction::Conditional { cbit, .. } =
            instruction
        {
            self.n_classical_bits = self.n_classical_bits.max(cbit + 1);
        }
        self.instructions.push(instruction);
        self
    }

    pub fn gate(&mut self, gate: GateName, target: usize) -> &mut Self {
        self.push(Instruction::Gate1 { gate, target })
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> &mut Self {
        self.push(Instruction::Cnot { control, target })
    }

    pub fn measure(&mut self, qubit: usize, cbit: usize) -> &mut Self {
        self.push(Instruction::Measure { qubit, cbit })
    }

    pub fn conditional(&mut self, gate: GateName, target: usize, cbit: usize, value: u8) -> &mut Self {
        self.push(Instruction::Conditional {
            gate,
            target,
            cbit,
            value,
        })
    }

    pub fn has_measurement(&self) -> bool {
        self.instructions
            .iter()
            .any(|i| matches!(i, Instruction::Measure { .. }))
    }

    /// Number of leading unitary instructions.
    pub fn unitary_prefix_len(&self) -> usize {
        self.instructions
            .iter()
            .take_while(|i| i.is_unitary())
            .count()
    }

    /// Checks every structural invariant. Registers above the advisory size
    /// produce a warning rather than an error.
    pub fn validate(&self) -> Result<Vec<Warning>, CircuitError> {
        use ErrorKind::*;
        if self.n_qubits == 0 || self.n_qubits > MAX_QUBITS {
            return Err(CircuitError::new(
                IndexOutOfRange,
                None,
                format!("qubit count {} outside 1..={MAX_QUBITS}", self.n_qubits),
            ));
        }
        if self.n_classical_bits > MAX_CLASSICAL_BITS {
            return Err(CircuitError::new(
                IndexOutOfRange,
                None,
                format!(
                    "{} classical bits exceeds the limit of {MAX_CLASSICAL_BITS}",
                    self.n_classical_bits
                ),
            ));
        }
        let mut measured = vec![false; self.n_qubits];
        let mut written = vec![false; self.n_classical_bits];
        for (idx, instr) in self.instructions.iter().enumerate() {
            let at = Some(idx);
            for q in instr.qubits().into_iter().flatten() {
                if q >= self.n_qubits {
                    return Err(CircuitError::new(
                        IndexOutOfRange,
                        at,
                        format!("qubit {q} out of range for {} qubits", self.n_qubits),
                    ));
                }
            }
            match *instr {
                Instruction::Gate1 { gate, target } => {
                    if !gate.is_single_qubit() {
                        return Err(CircuitError::new(
                            UnknownGate,
                            at,
                            format!("{gate} is not a single-qubit gate"),
                        ));
                    }
                    if measured[target] {
                        return Err(CircuitError::new(
                            QubitAfterMeasure,
                            at,
                            format!("gate on qubit {target} after it was measured"),
                        ));
                    }
                }
                Instruction::Cnot { control, target } => {
                    if control == target {
                        return Err(CircuitError::new(
                            IndexOutOfRange,
                            at,
                            format!("cx control and target are both qubit {control}"),
                        ));
                    }
                    if let Some(q) = [control, target].into_iter().find(|&q| measured[q]) {
                        return Err(CircuitError::new(
                            QubitAfterMeasure,
                            at,
                            format!("cx on qubit {q} after it was measured"),
                        ));
                    }
                }
                Instruction::Measure { qubit, cbit } => {
                    if cbit >= self.n_classical_bits {
                        return Err(CircuitError::new(
                            IndexOutOfRange,
                            at,
                            format!("classical bit {cbit} out of range"),
                        ));
                    }
                    measured[qubit] = true;
                    written[cbit] = true;
                }
                Instruction::Conditional {
                    gate,
                    target,
                    cbit,
                    value,
                } => {
                    if !gate.is_single_qubit() {
                        return Err(CircuitError::new(
                            UnknownGate,
                            at,
                            format!("conditional {gate} is not a single-qubit gate"),
                        ));
                    }
                    if value > 1 {
                        return Err(CircuitError::new(
                            Syntax,
                            at,
                            format!("condition value {value} is not a bit"),
                        ));
                    }
                    if cbit >= self.n_classical_bits || !written[cbit] {
                        return Err(CircuitError::new(
                            ClassicalBitUndefined,
                            at,
                            format!("classical bit {cbit} is read before any measurement writes it"),
                        ));
                    }
                    if measured[target] {
                        return Err(CircuitError::new(
                            QubitAfterMeasure,
                            at,
                            format!("conditional gate on qubit {target} after it was measured"),
                        ));
                    }
                }
            }
        }
        let mut warnings = Vec::new();
        if self.n_qubits > ADVISORY_QUBITS {
            warnings.push(Warning {
                message: format!(
                    "{} qubits exceeds the {ADVISORY_QUBITS}-qubit hardware this mirrors",
                    self.n_qubits
                ),
            });
        }
        Ok(warnings)
    }
}
