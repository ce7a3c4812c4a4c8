use serde::{Deserialize, Serialize};

use super::{StateVector, C64, PIPELINE_TOL};
use crate::error::{Error, Result};

/// Dense 2ⁿ × 2ⁿ density matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    elems: Vec<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (eigenvalues ≥ −1e-9).
    pub fn from_elems(n_qubits: usize, elems: Vec<C64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 12 {
            return Err(Error::RegisterSize(n_qubits));
        }
        let dim = 1usize << n_qubits;
        if elems.len() != dim * dim {
            return Err(Error::InvalidState(format!(
                "{} elements for a {dim}×{dim} matrix",
                elems.len()
            )));
        }
        let rho = Self { n_qubits, elems };
        if !rho.is_hermitian(PIPELINE_TOL) {
            return Err(Error::InvalidState("matrix is not Hermitian".into()));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > PIPELINE_TOL {
            return Err(Error::InvalidState(format!("trace {} is not 1", tr.re)));
        }
        if !rho.is_positive(1e-9) {
            return Err(Error::InvalidState("matrix has a negative eigenvalue".into()));
        }
        Ok(rho)
    }

    /// 𝟙 / 2ⁿ
    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        let mut elems = vec![C64::new(0.0, 0.0); dim * dim];
        for k in 0..dim {
            elems[k * dim + k] = C64::new(1.0 / dim as f64, 0.0);
        }
        Self::from_elems(n_qubits, elems)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.elems[row * self.dim() + col]
    }

    pub fn elems(&self) -> &[C64] {
        &self.elems
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|k| self.get(k, k)).sum()
    }

    /// Tr ρ²
    pub fn purity(&self) -> f64 {
        // ρ is Hermitian, so Tr ρ² = Σ |ρ_rc|².
        self.elems.iter().map(|e| e.norm_sqr()).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|r| (r..d).all(|c| (self.get(r, c) - self.get(c, r).conj()).norm() <= tol))
    }

    /// Cholesky of ρ + tol·𝟙 succeeds iff every eigenvalue exceeds −tol.
    fn is_positive(&self, tol: f64) -> bool {
        let d = self.dim();
        let mut l = vec![C64::new(0.0, 0.0); d * d];
        for j in 0..d {
            let mut diag = self.get(j, j).re + tol;
            for k in 0..j {
                diag -= l[j * d + k].norm_sqr();
            }
            if diag <= 0.0 {
                return false;
            }
            let ljj = diag.sqrt();
            l[j * d + j] = C64::new(ljj, 0.0);
            for i in j + 1..d {
                let mut acc = self.get(i, j);
                for k in 0..j {
                    acc -= l[i * d + k] * l[j * d + k].conj();
                }
                l[i * d + j] = acc / ljj;
            }
        }
        true
    }

    /// `self ⊗ other`, with `self`'s qubits leftmost.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let (da, db) = (self.dim(), other.dim());
        let d = da * db;
        let mut elems = vec![C64::new(0.0, 0.0); d * d];
        for ra in 0..da {
            for ca in 0..da {
                let a = self.get(ra, ca);
                for rb in 0..db {
                    for cb in 0..db {
                        elems[(ra * db + rb) * d + ca * db + cb] = a * other.get(rb, cb);
                    }
                }
            }
        }
        Self::from_elems(self.n_qubits + other.n_qubits, elems)
    }
}

/// ρ = |ψ⟩⟨ψ|
pub fn density_from_state(state: &StateVector) -> DensityMatrix {
    let amps = state.amplitudes();
    let mut elems = Vec::with_capacity(amps.len() * amps.len());
    for a in amps {
        elems.extend(amps.iter().map(|b| a * b.conj()));
    }
    DensityMatrix {
        n_qubits: state.n_qubits(),
        elems,
    }
}

/// Basis index of the full register given the kept bit and the 2ⁿ⁻¹ index `rest`.
#[inline]
fn with_bit(rest: usize, mask: usize, bit: usize) -> usize {
    let low = rest & (mask - 1);
    let high = (rest & !(mask - 1)) << 1;
    high | low | if bit == 1 { mask } else { 0 }
}

/// Traces out every qubit except `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: usize) -> Result<DensityMatrix> {
    let n = rho.n_qubits;
    if keep >= n {
        return Err(Error::QubitOutOfRange {
            qubit: keep,
            n_qubits: n,
        });
    }
    let mask = 1usize << (n - 1 - keep);
    let mut out = [C64::new(0.0, 0.0); 4];
    for r in 0..2 {
        for c in 0..2 {
            out[r * 2 + c] = (0..1usize << (n - 1))
                .map(|rest| rho.get(with_bit(rest, mask, r), with_bit(rest, mask, c)))
                .sum();
        }
    }
    Ok(DensityMatrix {
        n_qubits: 1,
        elems: out.to_vec(),
    })
}

/// Reduced state of one qubit straight from the amplitudes, in O(2ⁿ).
pub fn reduced_qubit(state: &StateVector, qubit: usize) -> Result<DensityMatrix> {
    state.check_qubit(qubit)?;
    let amps = state.amplitudes();
    let mask = state.qubit_mask(qubit);
    let mut out = [C64::new(0.0, 0.0); 4];
    for rest in 0..amps.len() / 2 {
        let a0 = amps[with_bit(rest, mask, 0)];
        let a1 = amps[with_bit(rest, mask, 1)];
        out[0] += a0 * a0.conj();
        out[1] += a0 * a1.conj();
        out[2] += a1 * a0.conj();
        out[3] += a1 * a1.conj();
    }
    Ok(DensityMatrix {
        n_qubits: 1,
        elems: out.to_vec(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// (Tr ρX, Tr ρY, Tr ρZ) of a single-qubit density matrix.
pub fn bloch_vector(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.n_qubits != 1 {
        return Err(Error::NotSingleQubit {
            what: "density matrix",
            n_qubits: rho.n_qubits,
        });
    }
    let off = rho.get(0, 1);
    Ok(BlochVector {
        x: 2.0 * off.re,
        y: -2.0 * off.im,
        z: (rho.get(0, 0) - rho.get(1, 1)).re,
    })
}

/// ⟨φ|ρ|φ⟩
pub fn fidelity_pure(theory: &StateVector, rho: &DensityMatrix) -> Result<f64> {
    if theory.n_qubits() != rho.n_qubits {
        return Err(Error::DimensionMismatch {
            left: theory.n_qubits(),
            right: rho.n_qubits,
        });
    }
    let phi = theory.amplitudes();
    let d = rho.dim();
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..d {
        let row: C64 = (0..d).map(|c| rho.get(r, c) * phi[c]).sum();
        acc += phi[r].conj() * row;
    }
    Ok(acc.re)
}
