//! Gate kernels against explicit dense (𝟙 ⊗ … ⊗ U ⊗ … ⊗ 𝟙) products.

use proptest::prelude::*;
use qteleport_core::qcore::{
    apply_1q, apply_cnot, bloch_vector, density_from_state, partial_trace, reduced_qubit,
    standard_gate, tensor, GateName, StateVector, C64,
};

type Dense = Vec<Vec<C64>>;

fn identity(d: usize) -> Dense {
    (0..d)
        .map(|r| (0..d).map(|c| C64::new(if r == c { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect()
}

fn kron(a: &Dense, b: &Dense) -> Dense {
    let (da, db) = (a.len(), b.len());
    let mut out = vec![vec![C64::new(0.0, 0.0); da * db]; da * db];
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    out[i * db + k][j * db + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn matvec(m: &Dense, v: &[C64]) -> Vec<C64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn single_dense(name: GateName) -> Dense {
    let m = *standard_gate(name).single().unwrap();
    vec![m[0].to_vec(), m[1].to_vec()]
}

/// 𝟙 ⊗ … ⊗ U(target) ⊗ … ⊗ 𝟙
fn embed_1q(name: GateName, target: usize, n: usize) -> Dense {
    let mut out = vec![vec![C64::new(1.0, 0.0)]];
    for q in 0..n {
        let f = if q == target { single_dense(name) } else { identity(2) };
        out = kron(&out, &f);
    }
    out
}

/// Permutation matrix of CNOT written entrywise from its definition.
fn embed_cnot(control: usize, target: usize, n: usize) -> Dense {
    let d = 1 << n;
    let mut out = vec![vec![C64::new(0.0, 0.0); d]; d];
    for col in 0..d {
        let cbit = (col >> (n - 1 - control)) & 1;
        let row = if cbit == 1 { col ^ (1 << (n - 1 - target)) } else { col };
        out[row][col] = C64::new(1.0, 0.0);
    }
    out
}

fn random_state() -> impl Strategy<Value = StateVector> {
    (1usize..=3).prop_flat_map(|n| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
            .prop_filter_map("nonzero", |v| {
                StateVector::normalized(v.into_iter().map(|(r, i)| C64::new(r, i)).collect()).ok()
            })
    })
}

fn single_gate() -> impl Strategy<Value = GateName> {
    prop::sample::select(GateName::SINGLE_QUBIT.to_vec())
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn single_qubit_kernel_matches_dense(state in random_state(), gate in single_gate(), t in 0usize..3) {
        let n = state.n_qubits();
        let target = t % n;
        let fast = apply_1q(&state, &standard_gate(gate), target).unwrap();
        let slow = matvec(&embed_1q(gate, target, n), state.amplitudes());
        prop_assert!(max_diff(fast.amplitudes(), &slow) <= 1e-12);
    }

    #[test]
    fn cnot_kernel_matches_dense(state in random_state(), c in 0usize..3, t in 0usize..3) {
        let n = state.n_qubits();
        prop_assume!(n >= 2);
        let (control, target) = (c % n, t % n);
        prop_assume!(control != target);
        let fast = apply_cnot(&state, control, target).unwrap();
        let slow = matvec(&embed_cnot(control, target, n), state.amplitudes());
        prop_assert!(max_diff(fast.amplitudes(), &slow) <= 1e-12);
    }

    #[test]
    fn norm_is_preserved(
        state in random_state(),
        ops in prop::collection::vec((0usize..8, 0usize..3, 0usize..3), 0..=50),
    ) {
        let n = state.n_qubits();
        let mut s = state;
        for (g, a, b) in ops {
            let gate = GateName::ALL[g];
            if gate == GateName::Cnot {
                if n < 2 || a % n == b % n { continue; }
                s = apply_cnot(&s, a % n, b % n).unwrap();
            } else {
                s = apply_1q(&s, &standard_gate(gate), a % n).unwrap();
            }
            prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn pure_qubit_bloch_vectors_are_unit(re0 in -1.0f64..1.0, im0 in -1.0f64..1.0, re1 in -1.0f64..1.0, im1 in -1.0f64..1.0) {
        prop_assume!(re0.abs() + im0.abs() + re1.abs() + im1.abs() > 1e-3);
        let s = StateVector::normalized(vec![C64::new(re0, im0), C64::new(re1, im1)]).unwrap();
        let b = bloch_vector(&density_from_state(&s)).unwrap();
        prop_assert!((b.norm() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn product_states_trace_to_their_factors(a in random_state(), b in random_state()) {
        prop_assume!(a.n_qubits() + b.n_qubits() <= 5);
        let joint = tensor(&a, &b).unwrap();
        let rho = density_from_state(&joint);
        for q in 0..a.n_qubits() {
            let want = reduced_qubit(&a, q).unwrap();
            let got = partial_trace(&rho, q).unwrap();
            prop_assert!(max_diff(got.elems(), want.elems()) <= 1e-10);
        }
        for q in 0..b.n_qubits() {
            let want = reduced_qubit(&b, q).unwrap();
            let got = partial_trace(&rho, a.n_qubits() + q).unwrap();
            prop_assert!(max_diff(got.elems(), want.elems()) <= 1e-10);
            prop_assert!((got.trace().re - 1.0).abs() <= 1e-10);
        }
    }
}

#[test]
fn bell_pair_kernel_and_dense_agree() {
    let n = 2;
    let s0 = StateVector::zero(n).unwrap();
    let fast = apply_cnot(&apply_1q(&s0, &standard_gate(GateName::H), 0).unwrap(), 0, 1).unwrap();
    let slow = matvec(
        &embed_cnot(0, 1, n),
        &matvec(&embed_1q(GateName::H, 0, n), s0.amplitudes()),
    );
    assert!(max_diff(fast.amplitudes(), &slow) <= 1e-12);
}
