//! Python bindings. Reports come back as plain dicts with the same shape
//! as the CLI's JSON output.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use qteleport_core::protocols::{self, TeleportMode};
use qteleport_core::simulator;
use qteleport_core::{dsl, GateName, NoiseModel, RunConfig, C64};

create_exception!(qteleport, ParseError, PyValueError, "Malformed circuit text.");

fn err(e: qteleport_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_error(e: dsl::ParseError) -> PyErr {
    let message = e.to_string();
    Python::attach(|py| {
        let exc = ParseError::new_err(message);
        let value = exc.value(py);
        // best effort: the message already carries the position
        let _ = value.setattr("line", e.line);
        let _ = value.setattr("column", e.column);
        let _ = value.setattr("kind", e.kind.to_string());
        exc
    })
}

fn gate_name(name: &str) -> PyResult<GateName> {
    name.parse().map_err(err)
}

fn mode(name: &str) -> PyResult<TeleportMode> {
    name.parse().map_err(PyValueError::new_err)
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn config(shots: u64, seed: u64, depolarizing_p: f64, readout_flip_q: f64) -> PyResult<RunConfig> {
    let mut cfg = RunConfig::new(shots, seed);
    if depolarizing_p != 0.0 || readout_flip_q != 0.0 {
        cfg = cfg.with_noise(NoiseModel::new(depolarizing_p, readout_flip_q).map_err(err)?);
    }
    cfg.validate().map_err(err)?;
    Ok(cfg)
}

#[pyclass(name = "StateVector", module = "qteleport", skip_from_py_object)]
#[derive(Clone)]
struct PyStateVector {
    inner: qteleport_core::StateVector,
}

#[pymethods]
impl PyStateVector {
    /// |0…0⟩ on `n_qubits` qubits.
    #[new]
    fn new(n_qubits: usize) -> PyResult<Self> {
        Ok(Self {
            inner: qteleport_core::StateVector::zero(n_qubits).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_amplitudes(amplitudes: Vec<C64>) -> PyResult<Self> {
        Ok(Self {
            inner: qteleport_core::StateVector::from_amplitudes(amplitudes).map_err(err)?,
        })
    }

    /// α|0⟩ + β|1⟩
    #[staticmethod]
    fn qubit(alpha: C64, beta: C64) -> PyResult<Self> {
        Ok(Self {
            inner: qteleport_core::StateVector::qubit(alpha, beta).map_err(err)?,
        })
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<C64> {
        self.inner.amplitudes().to_vec()
    }

    fn probabilities(&self) -> Vec<f64> {
        self.inner.probabilities()
    }

    /// Applies a single-qubit gate (`"h"`, `"t"`, ...) in place.
    fn apply(&mut self, gate: &str, target: usize) -> PyResult<()> {
        let g = qteleport_core::standard_gate(gate_name(gate)?);
        self.inner.apply_1q_in_place(&g, target).map_err(err)
    }

    fn cnot(&mut self, control: usize, target: usize) -> PyResult<()> {
        self.inner.apply_cnot_in_place(control, target).map_err(err)
    }

    fn tensor(&self, other: &PyStateVector) -> PyResult<Self> {
        Ok(Self {
            inner: qteleport_core::tensor(&self.inner, &other.inner).map_err(err)?,
        })
    }

    /// Bloch vector (x, y, z) of one qubit's reduced state.
    fn bloch(&self, qubit: usize) -> PyResult<(f64, f64, f64)> {
        let rho = qteleport_core::qcore::reduced_qubit(&self.inner, qubit).map_err(err)?;
        let b = qteleport_core::bloch_vector(&rho).map_err(err)?;
        Ok((b.x, b.y, b.z))
    }

    #[pyo3(signature = (other, tol = 1e-10))]
    fn equal_up_to_global_phase(&self, other: &PyStateVector, tol: f64) -> PyResult<bool> {
        qteleport_core::equal_up_to_global_phase(&self.inner, &other.inner, tol).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("StateVector(n_qubits={})", self.inner.n_qubits())
    }
}

#[pyclass(name = "Circuit", module = "qteleport", eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyCircuit {
    inner: qteleport_core::Circuit,
}

#[pymethods]
impl PyCircuit {
    #[new]
    fn new(n_qubits: usize) -> Self {
        Self {
            inner: qteleport_core::Circuit::new(n_qubits),
        }
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits
    }

    #[getter]
    fn n_classical_bits(&self) -> usize {
        self.inner.n_classical_bits
    }

    fn gate(&mut self, name: &str, target: usize) -> PyResult<()> {
        self.inner.gate(gate_name(name)?, target);
        Ok(())
    }

    fn cnot(&mut self, control: usize, target: usize) {
        self.inner.cnot(control, target);
    }

    fn measure(&mut self, qubit: usize, cbit: usize) {
        self.inner.measure(qubit, cbit);
    }

    /// Applies `gate` to `target` when classical bit `cbit` equals `value`.
    fn conditional(&mut self, gate: &str, target: usize, cbit: usize, value: u8) -> PyResult<()> {
        self.inner.conditional(gate_name(gate)?, target, cbit, value);
        Ok(())
    }

    /// Checks the circuit and returns any warnings.
    fn validate(&self) -> PyResult<Vec<String>> {
        dsl::validate(&self.inner)
            .map(|ws| ws.into_iter().map(|w| w.message).collect())
            .map_err(parse_error)
    }

    fn to_qc(&self) -> String {
        dsl::serialize(&self.inner)
    }

    fn instructions<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.instructions)
    }

    fn __len__(&self) -> usize {
        self.inner.instructions.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Circuit(n_qubits={}, n_classical_bits={}, instructions={})",
            self.inner.n_qubits,
            self.inner.n_classical_bits,
            self.inner.instructions.len()
        )
    }
}

impl From<qteleport_core::Circuit> for PyCircuit {
    fn from(inner: qteleport_core::Circuit) -> Self {
        Self { inner }
    }
}

#[pyfunction]
fn parse(source: &str) -> PyResult<PyCircuit> {
    dsl::parse(source).map(Into::into).map_err(parse_error)
}

#[pyfunction]
fn serialize(circuit: &PyCircuit) -> String {
    dsl::serialize(&circuit.inner)
}

/// Exact outcome distribution. `state` is present only for circuits
/// without measurements.
#[pyfunction]
fn run_analytic<'py>(py: Python<'py>, circuit: &PyCircuit) -> PyResult<Bound<'py, PyDict>> {
    let c = circuit.inner.clone();
    let result = py.detach(|| simulator::run_analytic(&c)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("n_bits", result.n_classical_bits)?;
    d.set_item("outcomes", result.bitstrings())?;
    d.set_item("probabilities", result.distribution())?;
    d.set_item(
        "state",
        result
            .state()
            .map(|s| PyStateVector { inner: s.clone() }),
    )?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (circuit, shots = 8192, seed = 0, depolarizing_p = 0.0, readout_flip_q = 0.0))]
fn run_shots<'py>(
    py: Python<'py>,
    circuit: &PyCircuit,
    shots: u64,
    seed: u64,
    depolarizing_p: f64,
    readout_flip_q: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = config(shots, seed, depolarizing_p, readout_flip_q)?;
    let c = circuit.inner.clone();
    let hist = py.detach(|| simulator::run_shots(&c, &cfg)).map_err(err)?;
    to_py(py, &hist)
}

#[pyfunction]
fn prep_circuit() -> PyCircuit {
    protocols::prep_circuit().into()
}

#[pyfunction]
fn bell_circuit() -> PyCircuit {
    protocols::bell_circuit().into()
}

#[pyfunction]
fn ghz_circuit(n: usize) -> PyResult<PyCircuit> {
    protocols::ghz_circuit(n).map(Into::into).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (mode = "postselect"))]
fn teleport_circuit(mode: &str) -> PyResult<PyCircuit> {
    Ok(protocols::teleport_circuit(self::mode(mode)?).into())
}

#[pyfunction]
fn with_measurements(circuit: &PyCircuit) -> PyCircuit {
    protocols::with_measurements(&circuit.inner).into()
}

#[pyfunction]
#[pyo3(signature = (shots = 8192, seed = 0, depolarizing_p = 0.0, readout_flip_q = 0.0, analytic = false))]
fn prep_experiment<'py>(
    py: Python<'py>,
    shots: u64,
    seed: u64,
    depolarizing_p: f64,
    readout_flip_q: f64,
    analytic: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let report = if analytic {
        protocols::analytic_prep_report()
    } else {
        let cfg = config(shots, seed, depolarizing_p, readout_flip_q)?;
        py.detach(|| protocols::run_prep_experiment(&cfg))
    }
    .map_err(err)?;
    to_py(py, &report)
}

#[pyfunction]
#[pyo3(signature = (mode = "postselect", shots = 8192, seed = 0, depolarizing_p = 0.0, readout_flip_q = 0.0, analytic = false))]
fn teleport_experiment<'py>(
    py: Python<'py>,
    mode: &str,
    shots: u64,
    seed: u64,
    depolarizing_p: f64,
    readout_flip_q: f64,
    analytic: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let mode = self::mode(mode)?;
    let report = if analytic {
        protocols::analytic_teleport_report(mode)
    } else {
        let cfg = config(shots, seed, depolarizing_p, readout_flip_q)?;
        py.detach(|| protocols::run_teleport_experiment(mode, &cfg))
    }
    .map_err(err)?;
    to_py(py, &report)
}

/// Exact fidelity of teleporting an arbitrary one-qubit state.
#[pyfunction]
#[pyo3(signature = (state, mode = "feedforward"))]
fn teleport_fidelity(state: &PyStateVector, mode: &str) -> PyResult<f64> {
    protocols::teleport_fidelity_analytic(self::mode(mode)?, &state.inner).map_err(err)
}

#[pymodule]
fn qteleport(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ParseError", m.py().get_type::<ParseError>())?;
    m.add_class::<PyStateVector>()?;
    m.add_class::<PyCircuit>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(serialize, m)?)?;
    m.add_function(wrap_pyfunction!(run_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(run_shots, m)?)?;
    m.add_function(wrap_pyfunction!(prep_circuit, m)?)?;
    m.add_function(wrap_pyfunction!(bell_circuit, m)?)?;
    m.add_function(wrap_pyfunction!(ghz_circuit, m)?)?;
    m.add_function(wrap_pyfunction!(teleport_circuit, m)?)?;
    m.add_function(wrap_pyfunction!(with_measurements, m)?)?;
    m.add_function(wrap_pyfunction!(prep_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(teleport_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(teleport_fidelity, m)?)?;
    Ok(())
}
