use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::noise::{apply_noise_in_place, NoiseModel};
use super::rng::shot_rng;
use super::{Circuit, Histogram, Instruction};
use crate::error::{Error, Result};
use crate::qcore::{bitstring, cached_gate, GateName, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub shots: u64,
    pub seed: u64,
    pub noise: Option<NoiseModel>,
}

impl RunConfig {
    pub fn new(shots: u64, seed: u64) -> Self {
        Self {
            shots,
            seed,
            noise: None,
        }
    }

    pub fn with_noise(mut self, noise: NoiseModel) -> Self {
        self.noise = Some(noise);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::ZeroShots);
        }
        if let Some(noise) = &self.noise {
            noise.validate()?;
        }
        Ok(())
    }

    /// The noise model, or `None` when it cannot change any outcome.
    fn effective_noise(&self) -> Option<NoiseModel> {
        self.noise.filter(|n| !n.is_noiseless())
    }
}

/// Mask of classical bit `cbit` in a register index (bit 0 most significant).
#[inline]
pub(crate) fn cbit_mask(n_classical_bits: usize, cbit: usize) -> u64 {
    1u64 << (n_classical_bits - 1 - cbit)
}

/// Collapses `qubit` given a uniform draw `u`: the outcome is 1 iff u ≥ P(0).
pub fn measure_collapse(state: &StateVector, qubit: usize, u: f64) -> Result<(u8, StateVector)> {
    let mut out = state.clone();
    let bit = collapse_in_place(&mut out, qubit, u)?;
    Ok((bit, out))
}

fn collapse_in_place(state: &mut StateVector, qubit: usize, u: f64) -> Result<u8> {
    let p0 = state.prob_zero(qubit)?;
    let bit = u8::from(u >= p0);
    state.project_in_place(qubit, bit);
    Ok(bit)
}

/// Applies `gate` iff `bit_value == required`.
pub fn conditional_apply(
    state: &StateVector,
    gate: GateName,
    target: usize,
    bit_value: u8,
    required: u8,
) -> Result<StateVector> {
    if !gate.is_single_qubit() {
        return Err(Error::NotSingleQubitGate(gate));
    }
    let mut out = state.clone();
    if bit_value == required {
        out.apply_1q_in_place(cached_gate(gate), target)?;
    }
    Ok(out)
}

/// One shot's final classical register (as an index) and quantum state.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub classical: u64,
    pub state: StateVector,
}

impl Trajectory {
    pub fn bit(&self, n_classical_bits: usize, cbit: usize) -> u8 {
        u8::from(self.classical & cbit_mask(n_classical_bits, cbit) != 0)
    }
}

/// Runs `instructions[start..]` on `state` for one shot.
pub(crate) fn run_trajectory<R: Rng + ?Sized>(
    circuit: &Circuit,
    mut state: StateVector,
    start: usize,
    noise: Option<&NoiseModel>,
    rng: &mut R,
) -> Result<Trajectory> {
    let ncl = circuit.n_classical_bits;
    let mut reg = 0u64;
    let depol = noise.map_or(0.0, |n| n.depolarizing_p);
    let flip = noise.map_or(0.0, |n| n.readout_flip_q);
    for instr in &circuit.instructions[start..] {
        match *instr {
            Instruction::Gate1 { gate, target } => {
                state.apply_1q_in_place(cached_gate(gate), target)?;
                if depol > 0.0 {
                    apply_noise_in_place(&mut state, &[target], depol, rng)?;
                }
            }
            Instruction::Cnot { control, target } => {
                state.apply_cnot_in_place(control, target)?;
                if depol > 0.0 {
                    apply_noise_in_place(&mut state, &[control, target], depol, rng)?;
                }
            }
            Instruction::Measure { qubit, cbit } => {
                let mut bit = collapse_in_place(&mut state, qubit, rng.random())?;
                if flip > 0.0 && rng.random::<f64>() < flip {
                    bit ^= 1;
                }
                let mask = cbit_mask(ncl, cbit);
                reg = if bit == 1 { reg | mask } else { reg & !mask };
            }
            Instruction::Conditional {
                gate,
                target,
                cbit,
                value,
            } => {
                let have = u8::from(reg & cbit_mask(ncl, cbit) != 0);
                if have == value {
                    state.apply_1q_in_place(cached_gate(gate), target)?;
                    if depol > 0.0 {
                        apply_noise_in_place(&mut state, &[target], depol, rng)?;
                    }
                }
            }
        }
    }
    Ok(Trajectory {
        classical: reg,
        state,
    })
}

/// Starting state and instruction offset shared by every shot. Without noise
/// the leading unitary block is deterministic and is evaluated once.
fn shared_prefix(
    circuit: &Circuit,
    initial: StateVector,
    noise: Option<&NoiseModel>,
) -> Result<(StateVector, usize)> {
    if noise.is_some() {
        return Ok((initial, 0));
    }
    let prefix = circuit.unitary_prefix_len();
    let mut state = initial;
    for instr in &circuit.instructions[..prefix] {
        match *instr {
            Instruction::Gate1 { gate, target } => {
                state.apply_1q_in_place(cached_gate(gate), target)?
            }
            Instruction::Cnot { control, target } => state.apply_cnot_in_place(control, target)?,
            _ => unreachable!("prefix holds only unitary instructions"),
        }
    }
    Ok((state, prefix))
}

fn check_initial(circuit: &Circuit, initial: &StateVector) -> Result<()> {
    if initial.n_qubits() != circuit.n_qubits {
        return Err(Error::DimensionMismatch {
            left: circuit.n_qubits,
            right: initial.n_qubits(),
        });
    }
    Ok(())
}

/// Runs every shot from `initial` and maps each trajectory through `f`.
/// The output is ordered by shot index.
pub fn run_shots_map_from<T, F>(
    circuit: &Circuit,
    initial: StateVector,
    cfg: &RunConfig,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Trajectory) -> T + Sync,
{
    circuit.validate()?;
    cfg.validate()?;
    check_initial(circuit, &initial)?;
    let noise = cfg.effective_noise();
    let (start_state, start) = shared_prefix(circuit, initial, noise.as_ref())?;
    (0..cfg.shots)
        .into_par_iter()
        .map(|shot| {
            let mut rng = shot_rng(cfg.seed, shot);
            let t = run_trajectory(circuit, start_state.clone(), start, noise.as_ref(), &mut rng)?;
            Ok(f(&t))
        })
        .collect()
}

pub fn run_shots_map<T, F>(circuit: &Circuit, cfg: &RunConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Trajectory) -> T + Sync,
{
    run_shots_map_from(circuit, StateVector::zero(circuit.n_qubits)?, cfg, f)
}

/// Samples `cfg.shots` independent trajectories and tallies the classical
/// registers. Identical inputs give identical histograms on any thread pool.
pub fn run_shots(circuit: &Circuit, cfg: &RunConfig) -> Result<Histogram> {
    circuit.validate()?;
    cfg.validate()?;
    let noise = cfg.effective_noise();
    let initial = StateVector::zero(circuit.n_qubits)?;
    let (start_state, start) = shared_prefix(circuit, initial, noise.as_ref())?;
    let tally = (0..cfg.shots)
        .into_par_iter()
        .map(|shot| {
            let mut rng = shot_rng(cfg.seed, shot);
            run_trajectory(circuit, start_state.clone(), start, noise.as_ref(), &mut rng)
                .map(|t| t.classical)
        })
        .try_fold(HashMap::<u64, u64>::new, |mut acc, reg| {
            *acc.entry(reg?).or_default() += 1;
            Ok::<_, Error>(acc)
        })
        .try_reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            Ok(a)
        })?;
    let ncl = circuit.n_classical_bits;
    let mut hist = Histogram::new(ncl);
    for (reg, n) in tally {
        hist.add(bitstring(reg as usize, ncl), n);
    }
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{apply_1q, apply_cnot, standard_gate, tensor, C64};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8};
    use GateName::*;

    fn bell() -> StateVector {
        let h = apply_1q(&StateVector::zero(2).unwrap(), &standard_gate(H), 0).unwrap();
        apply_cnot(&h, 0, 1).unwrap()
    }

    #[test]
    fn collapse_of_basis_state() {
        let one = StateVector::basis(1, 1).unwrap();
        for u in [0.0, 0.3, 0.999] {
            let (bit, post) = measure_collapse(&one, 0, u).unwrap();
            assert_eq!(bit, 1);
            assert_eq!(post, one);
        }
        let zero = StateVector::zero(1).unwrap();
        assert_eq!(measure_collapse(&zero, 0, 0.999_999).unwrap().0, 0);
    }

    #[test]
    fn collapse_of_bell_pair() {
        let (bit, post) = measure_collapse(&bell(), 0, 0.3).unwrap();
        assert_eq!(bit, 0);
        assert!((post.amplitude(0) - C64::new(1.0, 0.0)).norm() < 1e-12);
        let (bit, post) = measure_collapse(&bell(), 0, 0.7).unwrap();
        assert_eq!(bit, 1);
        assert!((post.amplitude(3) - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(measure_collapse(&bell(), 2, 0.1).is_err());
    }

    #[test]
    fn collapse_after_entangling_cnot_selects_branch() {
        let (a, b) = (FRAC_PI_8.cos(), FRAC_PI_8.sin());
        let phi = StateVector::qubit(C64::new(a, 0.0), C64::new(b, 0.0)).unwrap();
        let joint = apply_cnot(&tensor(&phi, &bell()).unwrap(), 0, 1).unwrap();
        let r = FRAC_1_SQRT_2;
        // u below P(0) = α² keeps the α-branch |0⟩(|00⟩+|11⟩)/√2
        let (bit, post) = measure_collapse(&joint, 0, 0.5).unwrap();
        assert_eq!(bit, 0);
        assert!((post.amplitude(0b000).re - r).abs() < 1e-12);
        assert!((post.amplitude(0b011).re - r).abs() < 1e-12);
        // u above P(0) keeps the β-branch |1⟩(|10⟩+|01⟩)/√2
        let (bit, post) = measure_collapse(&joint, 0, 0.9).unwrap();
        assert_eq!(bit, 1);
        assert!((post.amplitude(0b110).re - r).abs() < 1e-12);
        assert!((post.amplitude(0b101).re - r).abs() < 1e-12);
    }

    #[test]
    fn conditional_application() {
        let zero = StateVector::zero(1).unwrap();
        assert_eq!(conditional_apply(&zero, X, 0, 0, 1).unwrap(), zero);
        assert_eq!(
            conditional_apply(&zero, X, 0, 1, 1).unwrap(),
            StateVector::basis(1, 1).unwrap()
        );
        assert!(conditional_apply(&zero, Cnot, 0, 1, 1).is_err());
    }

    #[test]
    fn deterministic_outcome_circuit() {
        let mut c = Circuit::new(1);
        c.gate(X, 0).measure(0, 0);
        let h = run_shots(&c, &RunConfig::new(100, 9)).unwrap();
        assert_eq!(h.shots, 100);
        assert_eq!(h.count("1"), 100);
        assert_eq!(h.counts.len(), 1);
    }

    #[test]
    fn zero_noise_model_matches_noiseless() {
        let mut c = Circuit::new(2);
        c.gate(H, 0).cnot(0, 1).measure(0, 0).measure(1, 1);
        let plain = RunConfig::new(500, 3);
        let zero_noise = plain.with_noise(NoiseModel::default());
        assert_eq!(run_shots(&c, &plain).unwrap(), run_shots(&c, &zero_noise).unwrap());
    }

    #[test]
    fn prefix_shortcut_agrees_with_full_replay() {
        let mut c = Circuit::new(2);
        c.gate(H, 0).gate(T, 0).cnot(0, 1).gate(H, 1).measure(0, 0).measure(1, 1);
        let cfg = RunConfig::new(64, 11);
        let fast = run_shots_map(&c, &cfg, |t| t.classical).unwrap();
        let slow: Vec<u64> = (0..64)
            .map(|shot| {
                let mut rng = shot_rng(11, shot);
                run_trajectory(&c, StateVector::zero(2).unwrap(), 0, None, &mut rng)
                    .unwrap()
                    .classical
            })
            .collect();
        assert_eq!(fast, slow);
    }

    #[test]
    fn rejects_bad_config() {
        let mut c = Circuit::new(1);
        c.measure(0, 0);
        assert!(matches!(run_shots(&c, &RunConfig::new(0, 1)), Err(Error::ZeroShots)));
        let noisy = RunConfig::new(1, 1).with_noise(NoiseModel {
            depolarizing_p: 1.5,
            readout_flip_q: 0.0,
        });
        assert!(run_shots(&c, &noisy).is_err());
        let mut bad = Circuit::new(1);
        bad.gate(H, 3);
        assert!(matches!(run_shots(&bad, &RunConfig::new(1, 1)), Err(Error::Circuit(_))));
    }

    #[test]
    fn certain_readout_flip_inverts_every_bit() {
        let mut c = Circuit::new(1);
        c.measure(0, 0);
        let cfg = RunConfig::new(50, 2).with_noise(NoiseModel {
            depolarizing_p: 0.0,
            readout_flip_q: 1.0,
        });
        assert_eq!(run_shots(&c, &cfg).unwrap().count("1"), 50);
    }
}
