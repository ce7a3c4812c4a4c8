use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{C64, EXACT_TOL};
use crate::error::{Error, Result};

/// The gate set of the five-qubit cloud processor: Paulis, H, S, T and CNOT.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateName {
    I,
    X,
    Y,
    Z,
    H,
    S,
    T,
    #[serde(rename = "CNOT")]
    Cnot,
}

impl GateName {
    pub const ALL: [GateName; 8] = [
        GateName::I,
        GateName::X,
        GateName::Y,
        GateName::Z,
        GateName::H,
        GateName::S,
        GateName::T,
        GateName::Cnot,
    ];

    pub const SINGLE_QUBIT: [GateName; 7] = [
        GateName::I,
        GateName::X,
        GateName::Y,
        GateName::Z,
        GateName::H,
        GateName::S,
        GateName::T,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateName::Cnot => 2,
            _ => 1,
        }
    }

    pub fn is_single_qubit(self) -> bool {
        self.arity() == 1
    }

    /// Lowercase mnemonic used by the circuit language.
    pub fn mnemonic(self) -> &'static str {
        match self {
            GateName::I => "i",
            GateName::X => "x",
            GateName::Y => "y",
            GateName::Z => "z",
            GateName::H => "h",
            GateName::S => "s",
            GateName::T => "t",
            GateName::Cnot => "cx",
        }
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GateName::Cnot => "CNOT",
            other => return write!(f, "{}", other.mnemonic().to_ascii_uppercase()),
        };
        f.write_str(s)
    }
}

impl FromStr for GateName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i" | "id" => Ok(GateName::I),
            "x" => Ok(GateName::X),
            "y" => Ok(GateName::Y),
            "z" => Ok(GateName::Z),
            "h" => Ok(GateName::H),
            "s" => Ok(GateName::S),
            "t" => Ok(GateName::T),
            "cx" | "cnot" => Ok(GateName::Cnot),
            _ => Err(Error::UnknownGate(s.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateMatrix {
    Single([[C64; 2]; 2]),
    /// Basis order |00⟩, |01⟩, |10⟩, |11⟩ with the control as the left factor.
    Double([[C64; 4]; 4]),
}

impl GateMatrix {
    pub fn dim(&self) -> usize {
        match self {
            GateMatrix::Single(_) => 2,
            GateMatrix::Double(_) => 4,
        }
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        match self {
            GateMatrix::Single(m) => m[row][col],
            GateMatrix::Double(m) => m[row][col],
        }
    }

    /// max |(U†U − 𝟙)_rc|
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..d {
                    acc += self.get(k, r).conj() * self.get(k, c);
                }
                if r == c {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }
}

/// A named unitary together with its exact matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    name: GateName,
    matrix: GateMatrix,
}

impl Gate {
    pub fn name(&self) -> GateName {
        self.name
    }

    pub fn arity(&self) -> usize {
        self.name.arity()
    }

    pub fn matrix(&self) -> &GateMatrix {
        &self.matrix
    }

    /// The 2×2 matrix of a single-qubit gate.
    pub fn single(&self) -> Result<&[[C64; 2]; 2]> {
        match &self.matrix {
            GateMatrix::Single(m) => Ok(m),
            GateMatrix::Double(_) => Err(Error::NotSingleQubitGate(self.name)),
        }
    }

    /// Looks a gate up by its (case-insensitive) mnemonic.
    pub fn by_name(name: &str) -> Result<Gate> {
        Ok(standard_gate(name.parse()?))
    }
}

/// Shared instances of the standard gates, built once.
pub(crate) fn cached_gate(name: GateName) -> &'static Gate {
    static GATES: OnceLock<Vec<Gate>> = OnceLock::new();
    let gates = GATES.get_or_init(|| GateName::ALL.iter().map(|&n| standard_gate(n)).collect());
    &gates[name as usize]
}

/// Returns the exact matrix of a standard gate.
///
/// CNOT carries no 1/√2 prefactor; with it the matrix would not be unitary.
pub fn standard_gate(name: GateName) -> Gate {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let matrix = match name {
        GateName::I => GateMatrix::Single([[l, o], [o, l]]),
        GateName::X => GateMatrix::Single([[o, l], [l, o]]),
        GateName::Y => GateMatrix::Single([[o, -i], [i, o]]),
        GateName::Z => GateMatrix::Single([[l, o], [o, -l]]),
        GateName::H => GateMatrix::Single([[r, r], [r, -r]]),
        GateName::S => GateMatrix::Single([[l, o], [o, i]]),
        GateName::T => GateMatrix::Single([
            [l, o],
            [o, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)],
        ]),
        GateName::Cnot => GateMatrix::Double([
            [l, o, o, o],
            [o, l, o, o],
            [o, o, o, l],
            [o, o, l, o],
        ]),
    };
    assert!(
        matrix.unitarity_defect() <= EXACT_TOL,
        "standard gate {name} is not unitary"
    );
    Gate { name, matrix }
}
