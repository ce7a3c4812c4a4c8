//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_8, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use qteleport_core::dsl;
use qteleport_core::protocols::{
    bell_circuit, ghz_circuit, prep_circuit, prep_state, run_prep_experiment,
    run_teleport_experiment, teleport_circuit, teleport_fidelity_analytic, TeleportMode,
};
use qteleport_core::qcore::{standard_gate, GateMatrix, GateName, StateVector, C64};
use qteleport_core::simulator::{run_analytic, run_shots, ErrorKind};
use qteleport_core::{Circuit, Instruction, NoiseModel, RunConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    check(elapsed < limit, || format!("{what} took {elapsed:?}, limit {limit:?}"))
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn analytic_state(circuit: &Circuit) -> StateVector {
    run_analytic(circuit).unwrap().state().cloned().unwrap()
}

fn prep_identity() -> Outcome {
    let started = Instant::now();
    let mut s = StateVector::zero(1).unwrap();
    for g in [GateName::H, GateName::T, GateName::H, GateName::S] {
        s.apply_1q_in_place(&standard_gate(g), 0).unwrap();
    }
    let elapsed = started.elapsed();
    let phase = C64::from_polar(1.0, FRAC_PI_8);
    let want = [phase * FRAC_PI_8.cos(), phase * FRAC_PI_8.sin()];
    let worst = s
        .amplitudes()
        .iter()
        .zip(want)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    check(worst <= 1e-12, || format!("max amplitude error {worst:e}"))?;
    within(elapsed, Duration::from_millis(1), "gate sequence")?;
    Ok(format!("max amplitude error {worst:.1e}, {elapsed:?}"))
}

fn prep_populations() -> Outcome {
    let started = Instant::now();
    let probs = analytic_state(&prep_circuit()).probabilities();
    check((probs[0] - FRAC_PI_8.cos().powi(2)).abs() <= 1e-12, || format!("P(0) = {}", probs[0]))?;
    check((probs[1] - FRAC_PI_8.sin().powi(2)).abs() <= 1e-12, || format!("P(1) = {}", probs[1]))?;
    let mut worst: f64 = 0.0;
    for seed in [0, 1, 2, 7, 42, 1234, u64::MAX] {
        let r = run_prep_experiment(&RunConfig::new(8192, seed)).unwrap();
        check((r.p0 + r.p1 - 1.0).abs() <= 1e-9, || "p0 + p1 != 1".into())?;
        worst = worst.max((r.p0 - probs[0]).abs());
    }
    check(worst <= 0.02, || format!("sampled P(0) off by {worst}"))?;
    let elapsed = started.elapsed();
    within(elapsed, Duration::from_secs(1), "populations")?;
    Ok(format!(
        "P(0) = {:.10}, worst sampled deviation {worst:.4} over 7 seeds, {elapsed:?}",
        probs[0]
    ))
}

fn teleport_exactness() -> Outcome {
    let started = Instant::now();
    let mut worst = (1.0 - teleport_fidelity_analytic(TeleportMode::Feedforward, &prep_state()).unwrap()).abs();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let theta: f64 = rng.random_range(0.0..PI);
        let phi: f64 = rng.random_range(0.0..2.0 * PI);
        let input = StateVector::qubit(
            c((theta / 2.0).cos()),
            C64::from_polar((theta / 2.0).sin(), phi),
        )
        .unwrap();
        let f = teleport_fidelity_analytic(TeleportMode::Feedforward, &input).unwrap();
        worst = worst.max((1.0 - f).abs());
    }
    check(worst <= 1e-10, || format!("worst |1 - F| = {worst:e}"))?;
    let elapsed = started.elapsed();
    within(elapsed, Duration::from_secs(1), "fidelity checks")?;
    Ok(format!("51 states, worst |1 - F| = {worst:.1e}, {elapsed:?}"))
}

fn outcome_law() -> Outcome {
    let circuit = teleport_circuit(TeleportMode::Postselect);
    let dist = run_analytic(&circuit).unwrap().distribution();
    let sigma = (8192.0f64 * 0.25 * 0.75).sqrt();
    let hist = run_shots(&circuit, &RunConfig::new(8192, 11)).unwrap();
    let mut worst_z: f64 = 0.0;
    for o in 0..4usize {
        let p = dist[o << 1] + dist[(o << 1) | 1];
        check((p - 0.25).abs() <= 1e-12, || format!("outcome {o:02b}: p = {p}"))?;
        let prefix = format!("{}{}", o >> 1, o & 1);
        let n: u64 = hist
            .counts
            .iter()
            .filter(|(k, _)| k.starts_with(&prefix))
            .map(|(_, v)| v)
            .sum();
        worst_z = worst_z.max((n as f64 - 2048.0).abs() / sigma);
    }
    check(worst_z <= 5.0, || format!("count {worst_z:.2} sigma from 2048"))?;
    Ok(format!("exact 0.25 each, sampled counts within {worst_z:.2} sigma"))
}

fn conditional_populations() -> Outcome {
    let alpha = FRAC_PI_8.cos().powi(2);
    let mut worst: f64 = 0.0;
    for seed in [1, 42, 9000] {
        let r = run_teleport_experiment(TeleportMode::Postselect, &RunConfig::new(8192, seed)).unwrap();
        for (label, s) in &r.per_outcome {
            let (pa, pb) = (s.p_alpha.unwrap(), s.p_beta.unwrap());
            check((pa + pb - 1.0).abs() <= 1e-9, || format!("{label}: p_alpha + p_beta != 1"))?;
            worst = worst.max((pa - alpha).abs()).max((pb - (1.0 - alpha)).abs());
        }
    }
    check(worst <= 0.03, || format!("p_alpha/p_beta off by {worst}"))?;
    Ok(format!("worst deviation {worst:.4} over 3 seeds x 4 outcomes"))
}

fn bell_ghz() -> Outcome {
    let mut circuits = vec![("bell", bell_circuit())];
    for n in 3..=5 {
        circuits.push(("ghz", ghz_circuit(n).unwrap()));
    }
    for (name, circuit) in &circuits {
        let p = analytic_state(circuit).probabilities();
        let last = p.len() - 1;
        for (k, pk) in p.iter().enumerate() {
            let want = if k == 0 || k == last { 0.5 } else { 0.0 };
            check((pk - want).abs() <= 1e-12, || {
                format!("{name}{}: P[{k}] = {pk}", circuit.n_qubits)
            })?;
        }
    }
    Ok("bell, ghz3, ghz4, ghz5 exact".into())
}

fn dense_embed(n: usize, instr: &Instruction) -> Vec<Vec<C64>> {
    let dim = 1 << n;
    let bit = |q: usize| n - 1 - q;
    let mut m = vec![vec![c(0.0); dim]; dim];
    match *instr {
        Instruction::Gate1 { gate, target } | Instruction::Conditional { gate, target, .. } => {
            let GateMatrix::Single(u) = standard_gate(gate).matrix().clone() else {
                unreachable!()
            };
            for (row, m_row) in m.iter_mut().enumerate() {
                for (col, cell) in m_row.iter_mut().enumerate() {
                    let rest = !(1 << bit(target));
                    if row & rest == col & rest {
                        *cell = u[(row >> bit(target)) & 1][(col >> bit(target)) & 1];
                    }
                }
            }
        }
        Instruction::Cnot { control, target } => {
            for col in 0..dim {
                let row = if (col >> bit(control)) & 1 == 1 {
                    col ^ (1 << bit(target))
                } else {
                    col
                };
                m[row][col] = c(1.0);
            }
        }
        Instruction::Measure { .. } => unreachable!(),
    }
    m
}

fn oracle_equivalence() -> Outcome {
    let mut circuits = vec![
        ("prep", prep_circuit()),
        ("bell", bell_circuit()),
        ("ghz3", ghz_circuit(3).unwrap()),
    ];
    for mode in [TeleportMode::Postselect, TeleportMode::Feedforward] {
        circuits.push(("teleport", teleport_circuit(mode)));
    }
    let mut worst: f64 = 0.0;
    let mut steps = 0;
    for (name, circuit) in &circuits {
        let n = circuit.n_qubits;
        let mut kernel = StateVector::zero(n).unwrap();
        let mut dense: Vec<C64> = kernel.amplitudes().to_vec();
        for instr in &circuit.instructions {
            match *instr {
                Instruction::Measure { .. } => continue,
                Instruction::Gate1 { gate, target } | Instruction::Conditional { gate, target, .. } => {
                    kernel.apply_1q_in_place(&standard_gate(gate), target).unwrap()
                }
                Instruction::Cnot { control, target } => {
                    kernel.apply_cnot_in_place(control, target).unwrap()
                }
            }
            let m = dense_embed(n, instr);
            dense = m
                .iter()
                .map(|row| row.iter().zip(&dense).map(|(a, b)| a * b).sum())
                .collect();
            steps += 1;
            let err = kernel
                .amplitudes()
                .iter()
                .zip(&dense)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            check(err <= 1e-12, || format!("{name}: step {steps} differs by {err:e}"))?;
            worst = worst.max(err);
        }
    }
    Ok(format!("{} circuits, {steps} gate steps, max error {worst:.1e}", circuits.len()))
}

fn noise_monotone() -> Outcome {
    let mut means = Vec::new();
    for p in [0.0, 0.05, 0.1] {
        let total: f64 = (0..10u64)
            .map(|seed| {
                let cfg = RunConfig::new(2048, seed).with_noise(NoiseModel::new(p, 0.0).unwrap());
                run_teleport_experiment(TeleportMode::Feedforward, &cfg)
                    .unwrap()
                    .fidelity_sampled
                    .unwrap()
            })
            .sum();
        means.push(total / 10.0);
    }
    check((means[0] - 1.0).abs() <= 1e-10, || format!("F(p=0) = {}", means[0]))?;
    check(means[0] >= means[1] && means[1] >= means[2], || format!("not monotone: {means:?}"))?;
    Ok(format!(
        "mean F at p = 0, 0.05, 0.1: {:.4}, {:.4}, {:.4}",
        means[0], means[1], means[2]
    ))
}

fn random_circuit(rng: &mut ChaCha8Rng) -> Circuit {
    let n = rng.random_range(1..=5);
    let mut c = Circuit::new(n);
    let mut measured = vec![false; n];
    let mut written: Vec<usize> = Vec::new();
    for _ in 0..rng.random_range(0..20) {
        let free: Vec<usize> = (0..n).filter(|&q| !measured[q]).collect();
        if free.is_empty() {
            break;
        }
        let q = free[rng.random_range(0..free.len())];
        match rng.random_range(0..4) {
            0 if free.len() >= 2 => {
                let t = *free.iter().find(|&&t| t != q).unwrap();
                c.cnot(q, t);
            }
            1 => {
                let cbit = rng.random_range(0..4);
                c.measure(q, cbit);
                measured[q] = true;
                written.push(cbit);
            }
            2 if !written.is_empty() => {
                let cbit = written[rng.random_range(0..written.len())];
                let g = GateName::SINGLE_QUBIT[rng.random_range(0..7)];
                c.conditional(g, q, cbit, rng.random_range(0..2));
            }
            _ => {
                c.gate(GateName::SINGLE_QUBIT[rng.random_range(0..7)], q);
            }
        }
    }
    c
}

fn parser() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for k in 0..100 {
        let c = random_circuit(&mut rng);
        let text = dsl::serialize(&c);
        let back = dsl::parse(&text).map_err(|e| format!("round trip {k}: {e}\n{text}"))?;
        check(back == c, || format!("round trip {k} changed the circuit\n{text}"))?;
    }

    let tokens = ["qubits", "3", "x", "cx", "measure", "->", "if", "==", "then", "h", "#", "\n", " ", "0", "1", "\r\n", "99999999999999999999"];
    let mut accepted = 0;
    for k in 0..10_000 {
        let bytes: Vec<u8> = if k % 2 == 0 {
            (0..rng.random_range(0..64)).map(|_| rng.random()).collect()
        } else {
            // Most of these get past the header and exercise the statement parser.
            let body = (0..rng.random_range(0..24))
                .map(|_| tokens[rng.random_range(0..tokens.len())])
                .collect::<Vec<_>>()
                .join(if rng.random_bool(0.5) { " " } else { "" });
            format!("qubits 3\n{body}").into_bytes()
        };
        let res = catch_unwind(AssertUnwindSafe(|| dsl::parse_bytes(&bytes)))
            .map_err(|_| format!("parser panicked on {bytes:?}"))?;
        match res {
            Ok(_) => accepted += 1,
            Err(e) => {
                let lines = bytes.split(|&b| b == b'\n').count().max(1);
                check(e.line >= 1 && e.line <= lines && e.column >= 1, || {
                    format!("error position {}:{} outside input {bytes:?}", e.line, e.column)
                })?;
            }
        }
    }

    let cases = [
        ("qubits 2\nh 0\nfoo 1\n", 3, 1, ErrorKind::UnknownGate),
        ("qubits 2\nx 2\n", 2, 3, ErrorKind::IndexOutOfRange),
        ("qubits 2\nif 0 == 1 then x 1\n", 2, 1, ErrorKind::ClassicalBitUndefined),
        ("qubits 2\nmeasure 0 -> 0\nh 0\n", 3, 1, ErrorKind::QubitAfterMeasure),
        ("qubits 2\nmeasure 0 0\n", 2, 11, ErrorKind::Syntax),
        ("h 0\n", 1, 1, ErrorKind::Syntax),
    ];
    for (src, line, column, kind) in cases {
        let e = dsl::parse(src).err().ok_or_else(|| format!("{src:?} parsed"))?;
        check((e.line, e.column, e.kind) == (line, column, kind), || {
            format!("{src:?}: got {}:{} {}, want {line}:{column} {kind}", e.line, e.column, e.kind)
        })?;
    }
    Ok(format!(
        "100 round trips, 10000 fuzz inputs ({accepted} accepted), {} positioned error cases",
        cases.len()
    ))
}

fn determinism() -> Outcome {
    let run = |workers: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_qteleport"))
            .args(["teleport", "--shots", "8192", "--seed", "42", "--workers", workers])
            .env_remove("QTELEPORT_SEED")
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(String::from_utf8_lossy(&out.stderr).into_owned());
        }
        let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
        Ok::<_, String>(
            text.lines()
                .filter(|l| !l.trim_start().starts_with("\"timing_ms\""))
                .collect::<Vec<_>>()
                .join("\n"),
        )
    };
    let reference = run("1")?;
    for workers in ["1", "2", "4", "8"] {
        let again = run(workers)?;
        check(again == reference, || format!("--workers {workers} changed the report"))?;
    }
    Ok(format!("5 runs identical apart from timing_ms ({} bytes)", reference.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("prepared state identity", prep_identity),
        ("initial-state populations", prep_populations),
        ("teleportation exactness", teleport_exactness),
        ("outcome law", outcome_law),
        ("conditional Bob populations", conditional_populations),
        ("Bell and GHZ distributions", bell_ghz),
        ("kernel and dense oracle agree", oracle_equivalence),
        ("fidelity falls with noise", noise_monotone),
        ("parser round trip, fuzz, positions", parser),
        ("determinism across workers", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("PASS  {:>2}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2}. {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
