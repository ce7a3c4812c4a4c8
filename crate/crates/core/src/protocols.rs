//! Ready-made circuits and experiment drivers: single-qubit state
//! preparation, Bell and GHZ generation, and teleportation with either
//! in-circuit (feedforward) or after-the-fact (post-selected) correction.
//!
//! Teleportation uses qubit 0 for the input state, qubit 1 for Alice's half
//! of the Bell pair and qubit 2 for Bob's. Classical bits 0 and 1 hold
//! Alice's outcomes, bit 2 holds Bob's.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{
    bloch_vector, cached_gate, fidelity_pure, reduced_qubit, tensor, BlochVector, DensityMatrix,
    GateName, StateVector, C64,
};
use crate::simulator::{
    run_analytic, run_analytic_from, run_shots, run_shots_map, Circuit, Instruction, RunConfig,
};

pub const INPUT_QUBIT: usize = 0;
pub const ALICE_QUBIT: usize = 1;
pub const BOB_QUBIT: usize = 2;

/// How Bob's correction is carried out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TeleportMode {
    /// All three qubits are measured together; the correction is applied to
    /// the recorded statistics, as on hardware without classical feedback.
    Postselect,
    /// Bob's gates are conditioned on Alice's measured bits during the run.
    Feedforward,
}

impl fmt::Display for TeleportMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TeleportMode::Postselect => "postselect",
            TeleportMode::Feedforward => "feedforward",
        })
    }
}

impl FromStr for TeleportMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "postselect" => Ok(TeleportMode::Postselect),
            "feedforward" => Ok(TeleportMode::Feedforward),
            _ => Err(format!("unknown mode '{s}' (expected postselect or feedforward)")),
        }
    }
}

/// Alice's two measured bits: the input qubit and her Bell-pair half.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AliceOutcome {
    pub m_i: u8,
    pub m_a: u8,
}

impl AliceOutcome {
    pub const ALL: [AliceOutcome; 4] = [
        AliceOutcome { m_i: 0, m_a: 0 },
        AliceOutcome { m_i: 0, m_a: 1 },
        AliceOutcome { m_i: 1, m_a: 0 },
        AliceOutcome { m_i: 1, m_a: 1 },
    ];

    pub fn label(&self) -> String {
        format!("{}{}", self.m_i, self.m_a)
    }
}

/// Gate that returns Bob's qubit to the input state for a given outcome.
pub fn correction_gate(o: AliceOutcome) -> GateName {
    match (o.m_i, o.m_a) {
        (0, 0) => GateName::I,
        (0, _) => GateName::X,
        (_, 0) => GateName::Z,
        _ => GateName::Y,
    }
}

/// Bob's bit value that a perfect correction would map onto |0⟩.
/// Bob's raw bit that carries the α amplitude. Feedforward has already
/// undone the bit flip, postselection has not.
fn alpha_bit(mode: TeleportMode, o: AliceOutcome) -> u8 {
    if mode == TeleportMode::Feedforward {
        return 0;
    }
    match correction_gate(o) {
        GateName::X | GateName::Y => 1,
        _ => 0,
    }
}

/// Appends `measure q -> q` for every qubit.
pub fn with_measurements(circuit: &Circuit) -> Circuit {
    let mut out = circuit.clone();
    for q in 0..circuit.n_qubits {
        out.measure(q, q);
    }
    out
}

fn prep_gates(c: &mut Circuit, target: usize) {
    for g in [GateName::H, GateName::T, GateName::H, GateName::S] {
        c.gate(g, target);
    }
}

/// H, T, H, S on one qubit: e^{iπ/8}(cos(π/8)|0⟩ + sin(π/8)|1⟩).
pub fn prep_circuit() -> Circuit {
    let mut c = Circuit::new(1);
    prep_gates(&mut c, 0);
    c
}

/// The state `prep_circuit` produces, computed by running it.
pub fn prep_state() -> StateVector {
    run_analytic(&prep_circuit())
        .ok()
        .and_then(|r| r.state().cloned())
        .expect("preparation circuit is valid and unmeasured")
}

/// H on qubit 0, then CNOT 0→1.
pub fn bell_circuit() -> Circuit {
    let mut c = Circuit::new(2);
    c.gate(GateName::H, 0).cnot(0, 1);
    c
}

/// H on qubit 0 followed by the CNOT chain 0→1, 1→2, …
pub fn ghz_circuit(n: usize) -> Result<Circuit> {
    if !(3..=5).contains(&n) {
        return Err(Error::GhzSize(n));
    }
    let mut c = Circuit::new(n);
    c.gate(GateName::H, 0);
    for q in 0..n - 1 {
        c.cnot(q, q + 1);
    }
    Ok(c)
}

/// Bell pair on (1, 2), CNOT 0→1, H on 0. Leaves the register in the
/// four-branch state just before Alice measures.
pub fn teleport_entangler() -> Circuit {
    let mut c = Circuit::new(3);
    c.gate(GateName::H, ALICE_QUBIT)
        .cnot(ALICE_QUBIT, BOB_QUBIT)
        .cnot(INPUT_QUBIT, ALICE_QUBIT)
        .gate(GateName::H, INPUT_QUBIT);
    c
}

/// Entangler, Alice's measurements and (in feedforward mode) Bob's
/// conditional X then Z. Bob is measured into bit 2 when `measure_bob`.
pub fn teleport_body(mode: TeleportMode, measure_bob: bool) -> Circuit {
    let mut c = teleport_entangler();
    c.measure(INPUT_QUBIT, 0).measure(ALICE_QUBIT, 1);
    if mode == TeleportMode::Feedforward {
        // X^{m_A} then Z^{m_i}; for (1,1) this is ZX = iY.
        c.conditional(GateName::X, BOB_QUBIT, 1, 1)
            .conditional(GateName::Z, BOB_QUBIT, 0, 1);
    }
    if measure_bob {
        c.measure(BOB_QUBIT, 2);
    }
    c
}

/// Full teleportation of the prepared state, ending with Bob's measurement.
pub fn teleport_circuit(mode: TeleportMode) -> Circuit {
    let mut c = Circuit::new(3);
    prep_gates(&mut c, INPUT_QUBIT);
    for instr in teleport_body(mode, true).instructions {
        c.push(instr);
    }
    c
}

fn with_prep(body: Circuit) -> Circuit {
    let mut c = Circuit::new(body.n_qubits);
    prep_gates(&mut c, INPUT_QUBIT);
    for instr in body.instructions {
        c.push(instr);
    }
    c
}

/// Bob's qubit after the correction for the recorded outcome. In
/// feedforward mode the circuit already applied it.
fn corrected_bob(
    mode: TeleportMode,
    outcome: AliceOutcome,
    state: &StateVector,
) -> Result<DensityMatrix> {
    let mut state = state.clone();
    if mode == TeleportMode::Postselect {
        state.apply_1q_in_place(cached_gate(correction_gate(outcome)), BOB_QUBIT)?;
    }
    reduced_qubit(&state, BOB_QUBIT)
}

/// Exact ⟨φ|ρ_B|φ⟩ for teleporting an arbitrary single-qubit `input`.
pub fn teleport_fidelity_analytic(mode: TeleportMode, input: &StateVector) -> Result<f64> {
    if input.n_qubits() != 1 {
        return Err(Error::NotSingleQubit {
            what: "input state",
            n_qubits: input.n_qubits(),
        });
    }
    let initial = tensor(input, &StateVector::zero(2)?)?;
    let result = run_analytic_from(&teleport_body(mode, false), initial)?;
    let ncl = result.n_classical_bits;
    let mut rho = [C64::new(0.0, 0.0); 4];
    for b in &result.branches {
        let outcome = AliceOutcome {
            m_i: b.bit(ncl, 0),
            m_a: b.bit(ncl, 1),
        };
        let bob = corrected_bob(mode, outcome, &b.state)?;
        for (acc, e) in rho.iter_mut().zip(bob.elems()) {
            *acc += b.probability * e;
        }
    }
    fidelity_pure(input, &DensityMatrix::from_elems(1, rho.to_vec())?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrepReport {
    pub shots: u64,
    pub p0: f64,
    pub p1: f64,
    pub theory_p0: f64,
    pub theory_p1: f64,
    pub bloch: BlochVector,
}

fn prep_theory() -> Result<(f64, f64, BlochVector)> {
    let state = prep_state();
    let p = state.probabilities();
    Ok((p[0], p[1], bloch_vector(&reduced_qubit(&state, 0)?)?))
}

/// Samples the prepared state in the Z basis. Theory values and the Bloch
/// vector come from the exact noiseless state.
pub fn run_prep_experiment(cfg: &RunConfig) -> Result<PrepReport> {
    let hist = run_shots(&with_measurements(&prep_circuit()), cfg)?;
    let (theory_p0, theory_p1, bloch) = prep_theory()?;
    let p0 = hist.frequency("0");
    Ok(PrepReport {
        shots: hist.shots,
        p0,
        p1: 1.0 - p0,
        theory_p0,
        theory_p1,
        bloch,
    })
}

/// The exact report (`shots` = 0).
pub fn analytic_prep_report() -> Result<PrepReport> {
    let (theory_p0, theory_p1, bloch) = prep_theory()?;
    Ok(PrepReport {
        shots: 0,
        p0: theory_p0,
        p1: theory_p1,
        theory_p0,
        theory_p1,
        bloch,
    })
}

/// Bob's statistics conditioned on one Alice outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeStats {
    pub count: u64,
    /// Relative frequency of the outcome (exact probability in analytic reports).
    pub probability: f64,
    /// Population of the corrected |0⟩; `None` when no shot had this outcome.
    pub p_alpha: Option<f64>,
    pub p_beta: Option<f64>,
    pub correction: GateName,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeleportReport {
    pub mode: TeleportMode,
    pub shots: u64,
    /// Keyed by Alice's bits, input qubit first ("00", "01", "10", "11").
    pub per_outcome: BTreeMap<String, OutcomeStats>,
    pub fidelity_analytic: f64,
    /// Mean per-shot fidelity of Bob's corrected qubit; `None` in analytic reports.
    pub fidelity_sampled: Option<f64>,
    pub theory_p_alpha: f64,
    pub theory_p_beta: f64,
}

/// Runs the teleportation circuit and conditions Bob's populations on each
/// of Alice's outcomes. In postselect mode X/Y corrections relabel Bob's
/// bit; I/Z leave it unchanged.
pub fn run_teleport_experiment(mode: TeleportMode, cfg: &RunConfig) -> Result<TeleportReport> {
    let hist = run_shots(&teleport_circuit(mode), cfg)?;
    let mut per_outcome = BTreeMap::new();
    for o in AliceOutcome::ALL {
        let sel = hist.post_select(&[(0, o.m_i), (1, o.m_a)])?;
        let bob = sel.marginal(2)?;
        let (p_alpha, p_beta) = if sel.shots == 0 {
            (None, None)
        } else {
            let a = bob[alpha_bit(mode, o) as usize] as f64 / sel.shots as f64;
            (Some(a), Some(1.0 - a))
        };
        per_outcome.insert(
            o.label(),
            OutcomeStats {
                count: sel.shots,
                probability: sel.shots as f64 / hist.shots as f64,
                p_alpha,
                p_beta,
                correction: correction_gate(o),
            },
        );
    }

    let target = prep_state();
    let unmeasured_bob = with_prep(teleport_body(mode, false));
    let ncl = unmeasured_bob.n_classical_bits;
    let fidelities = run_shots_map(&unmeasured_bob, cfg, |t| {
        let o = AliceOutcome {
            m_i: t.bit(ncl, 0),
            m_a: t.bit(ncl, 1),
        };
        corrected_bob(mode, o, &t.state).and_then(|rho| fidelity_pure(&target, &rho))
    })?;
    let fidelity_sampled =
        fidelities.into_iter().sum::<Result<f64>>()? / cfg.shots as f64;

    let (theory_p_alpha, theory_p_beta, _) = prep_theory()?;
    Ok(TeleportReport {
        mode,
        shots: hist.shots,
        per_outcome,
        fidelity_analytic: teleport_fidelity_analytic(mode, &target)?,
        fidelity_sampled: Some(fidelity_sampled),
        theory_p_alpha,
        theory_p_beta,
    })
}

/// The exact report (`shots` = 0, counts 0, probabilities exact).
pub fn analytic_teleport_report(mode: TeleportMode) -> Result<TeleportReport> {
    let dist = run_analytic(&teleport_circuit(mode))?.distribution();
    let mut per_outcome = BTreeMap::new();
    for o in AliceOutcome::ALL {
        let base = ((o.m_i as usize) << 2) | ((o.m_a as usize) << 1);
        let bob = [dist[base], dist[base | 1]];
        let p = bob[0] + bob[1];
        let (p_alpha, p_beta) = if p > 0.0 {
            let a = bob[alpha_bit(mode, o) as usize] / p;
            (Some(a), Some(1.0 - a))
        } else {
            (None, None)
        };
        per_outcome.insert(
            o.label(),
            OutcomeStats {
                count: 0,
                probability: p,
                p_alpha,
                p_beta,
                correction: correction_gate(o),
            },
        );
    }
    let (theory_p_alpha, theory_p_beta, _) = prep_theory()?;
    Ok(TeleportReport {
        mode,
        shots: 0,
        per_outcome,
        fidelity_analytic: teleport_fidelity_analytic(mode, &prep_state())?,
        fidelity_sampled: None,
        theory_p_alpha,
        theory_p_beta,
    })
}

/// True when every instruction is a gate application (no measurement).
pub fn is_unitary(circuit: &Circuit) -> bool {
    circuit.instructions.iter().all(Instruction::is_unitary)
}
