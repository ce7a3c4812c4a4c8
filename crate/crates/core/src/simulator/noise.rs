use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{standard_gate, GateName, StateVector};

/// Depolarizing error per gate application plus independent readout flips.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Probability, per qubit touched by a gate, of a uniformly random Pauli.
    pub depolarizing_p: f64,
    /// Probability that a recorded measurement bit is flipped.
    pub readout_flip_q: f64,
}

impl NoiseModel {
    pub fn new(depolarizing_p: f64, readout_flip_q: f64) -> Result<Self> {
        let model = Self {
            depolarizing_p,
            readout_flip_q,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("depolarizing_p", self.depolarizing_p)?;
        check_probability("readout_flip_q", self.readout_flip_q)
    }

    pub fn is_noiseless(&self) -> bool {
        self.depolarizing_p == 0.0 && self.readout_flip_q == 0.0
    }
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidProbability { name, value });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    /// Maps u ∈ [0, 1) onto X, Y, Z in equal thirds.
    pub fn from_uniform(u: f64) -> Pauli {
        if u < 1.0 / 3.0 {
            Pauli::X
        } else if u < 2.0 / 3.0 {
            Pauli::Y
        } else {
            Pauli::Z
        }
    }

    pub fn gate(self) -> GateName {
        match self {
            Pauli::X => GateName::X,
            Pauli::Y => GateName::Y,
            Pauli::Z => GateName::Z,
        }
    }
}

pub(crate) fn apply_noise_in_place<R: Rng + ?Sized>(
    state: &mut StateVector,
    targets: &[usize],
    p: f64,
    rng: &mut R,
) -> Result<()> {
    for &q in targets {
        if rng.random::<f64>() < p {
            let pauli = Pauli::from_uniform(rng.random());
            state.apply_1q_in_place(&standard_gate(pauli.gate()), q)?;
        }
    }
    Ok(())
}

/// With probability `p` per target qubit applies a uniformly random Pauli.
pub fn apply_noise<R: Rng + ?Sized>(
    state: &StateVector,
    targets: &[usize],
    p: f64,
    rng: &mut R,
) -> Result<StateVector> {
    check_probability("p", p)?;
    let mut out = state.clone();
    apply_noise_in_place(&mut out, targets, p, rng)?;
    Ok(out)
}
