use super::{Gate, GateName, C64, PIPELINE_TOL};
use crate::error::{Error, Result};

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 24;

/// Pure state of an `n`-qubit register as 2ⁿ complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

fn check_register(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::RegisterSize(n_qubits));
    }
    Ok(())
}

impl StateVector {
    /// |0…0⟩
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// Computational basis state `index` (qubit 0 is the most significant bit).
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::InvalidState(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wraps amplitudes that must already be normalized within 1e-10.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n_qubits = Self::register_for(&amps)?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if (norm - 1.0).abs() > PIPELINE_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm} is not 1")));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Wraps amplitudes after rescaling them to unit norm.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let n_qubits = Self::register_for(&amps)?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { n_qubits, amps })
    }

    /// α|0⟩ + β|1⟩
    pub fn qubit(alpha: C64, beta: C64) -> Result<Self> {
        Self::from_amplitudes(vec![alpha, beta])
    }

    fn register_for(amps: &[C64]) -> Result<usize> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "{len} amplitudes is not a power of two ≥ 2"
            )));
        }
        let n = len.trailing_zeros() as usize;
        check_register(n)?;
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        Ok(n)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Multiplies every amplitude by `phase`, which must have unit modulus.
    pub fn with_global_phase(mut self, phase: C64) -> Self {
        self.amps.iter_mut().for_each(|a| *a *= phase);
        self
    }

    pub(crate) fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Bit mask selecting `qubit` within a basis index.
    #[inline]
    pub fn qubit_mask(&self, qubit: usize) -> usize {
        1usize << (self.n_qubits - 1 - qubit)
    }

    /// Strided in-place kernel: pairs (k, k + stride) differ only in `target`.
    pub(crate) fn apply_matrix_in_place(&mut self, m: &[[C64; 2]; 2], target: usize) {
        let stride = self.qubit_mask(target);
        let dim = self.amps.len();
        let mut base = 0;
        while base < dim {
            for k in base..base + stride {
                let a0 = self.amps[k];
                let a1 = self.amps[k + stride];
                self.amps[k] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[k + stride] = m[1][0] * a0 + m[1][1] * a1;
            }
            base += stride << 1;
        }
    }

    pub fn apply_1q_in_place(&mut self, gate: &Gate, target: usize) -> Result<()> {
        let m = *gate.single()?;
        self.check_qubit(target)?;
        match gate.name() {
            GateName::I => {}
            GateName::X => self.swap_pairs(target),
            _ => self.apply_matrix_in_place(&m, target),
        }
        Ok(())
    }

    fn swap_pairs(&mut self, target: usize) {
        let stride = self.qubit_mask(target);
        let dim = self.amps.len();
        let mut base = 0;
        while base < dim {
            for k in base..base + stride {
                self.amps.swap(k, k + stride);
            }
            base += stride << 1;
        }
    }

    pub fn apply_cnot_in_place(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::ControlIsTarget(control));
        }
        let cmask = self.qubit_mask(control);
        let tmask = self.qubit_mask(target);
        for k in 0..self.amps.len() {
            if k & cmask != 0 && k & tmask == 0 {
                self.amps.swap(k, k | tmask);
            }
        }
        Ok(())
    }

    /// Applies any standard gate; CNOT takes `qubits = [control, target]`.
    pub fn apply_gate_in_place(&mut self, gate: &Gate, qubits: &[usize]) -> Result<()> {
        match (gate.arity(), qubits) {
            (1, [t]) => self.apply_1q_in_place(gate, *t),
            (2, [c, t]) => self.apply_cnot_in_place(*c, *t),
            _ => Err(Error::InvalidState(format!(
                "gate {} expects {} qubit operand(s), got {}",
                gate.name(),
                gate.arity(),
                qubits.len()
            ))),
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Probability that `qubit` reads 0 in the Z basis.
    pub fn prob_zero(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = self.qubit_mask(qubit);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(k, _)| k & mask == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projects `qubit` onto `bit` and renormalizes; returns the branch
    /// probability. A zero-probability projection leaves the state untouched.
    pub(crate) fn project_in_place(&mut self, qubit: usize, bit: u8) -> f64 {
        let mask = self.qubit_mask(qubit);
        let keep = if bit == 0 { 0 } else { mask };
        let p: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(k, _)| k & mask == keep)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        if p <= 0.0 {
            return 0.0;
        }
        let scale = 1.0 / p.sqrt();
        for (k, a) in self.amps.iter_mut().enumerate() {
            if k & mask == keep {
                *a *= scale;
            } else {
                *a = C64::new(0.0, 0.0);
            }
        }
        p
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// `a ⊗ b`, with `a`'s qubits leftmost.
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let n_qubits = a.n_qubits + b.n_qubits;
    check_register(n_qubits)?;
    let mut amps = Vec::with_capacity(a.dim() * b.dim());
    for x in &a.amps {
        amps.extend(b.amps.iter().map(|y| x * y));
    }
    Ok(StateVector { n_qubits, amps })
}

pub fn apply_1q(state: &StateVector, gate: &Gate, target: usize) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply_1q_in_place(gate, target)?;
    Ok(out)
}

pub fn apply_cnot(state: &StateVector, control: usize, target: usize) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply_cnot_in_place(control, target)?;
    Ok(out)
}

pub fn probabilities(state: &StateVector) -> Vec<f64> {
    state.probabilities()
}

/// True iff |⟨a|b⟩| ≥ 1 − tol.
pub fn equal_up_to_global_phase(a: &StateVector, b: &StateVector, tol: f64) -> Result<bool> {
    Ok(a.inner(b)?.norm() >= 1.0 - tol)
}
