//! Python bindings: model Hamiltonians, single-state diagnostics, and full
//! ensemble experiments driven by the same TOML documents as the CLI.
//!
//! Matrices cross the boundary as nested lists of Python `complex`.

use std::collections::HashMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use scramble_core::cli::{parse_config, run_selftest};
use scramble_core::diagnostics::{
    mutual_information, operator_state, pauli_averaged_otoc, tripartite_mutual_information,
};
use scramble_core::dynamics::{evolve_lindblad, DecoherenceBasis, LindbladSpec};
use scramble_core::ensemble::{self, ExperimentConfig, TimeSeries};
use scramble_core::linalg::{DensityMatrix, Operator, SubsystemMask, C64};
use scramble_core::models::{build_lmg, build_syk, sample_syk_couplings, LmgSpec, SykSpec};
use scramble_core::ScrambleError;

type Rows = Vec<Vec<C64>>;

fn to_py(e: ScrambleError) -> PyErr {
    if e.is_validation() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn operator(rows: Rows) -> PyResult<Operator> {
    Operator::from_rows(&rows).map_err(to_py)
}

fn state(rows: Rows) -> PyResult<DensityMatrix> {
    DensityMatrix::new(operator(rows)?).map_err(to_py)
}

fn mask(indices: Vec<usize>) -> PyResult<SubsystemMask> {
    SubsystemMask::from_unsorted(indices).map_err(to_py)
}

fn rows(op: &Operator) -> Rows {
    let m = op.matrix();
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn basis(name: Option<&str>) -> PyResult<Option<DecoherenceBasis>> {
    name.map(|s| s.parse::<DecoherenceBasis>().map_err(to_py))
        .transpose()
}

/// SYK Hamiltonian on `n_majorana / 2` qubits for one disorder seed.
#[pyfunction]
#[pyo3(signature = (n_majorana, q=4, j_scale=1.0, seed=0))]
fn syk_hamiltonian(n_majorana: usize, q: usize, j_scale: f64, seed: u64) -> PyResult<Rows> {
    let spec = SykSpec::new(n_majorana, q, j_scale, seed).map_err(to_py)?;
    let couplings = sample_syk_couplings(&spec).map_err(to_py)?;
    Ok(rows(&build_syk(&spec, &couplings).map_err(to_py)?))
}

/// LMG Hamiltonian on `n_spins` qubits.
#[pyfunction]
#[pyo3(signature = (n_spins, j_scale=1.0))]
fn lmg_hamiltonian(n_spins: usize, j_scale: f64) -> PyResult<Rows> {
    let spec = LmgSpec::new(n_spins, j_scale).map_err(to_py)?;
    Ok(rows(&build_lmg(&spec).map_err(to_py)?))
}

/// State at time `t` under `h`, with optional dephasing of rate `gamma` in the
/// `"computational"` or `"energy"` basis.
#[pyfunction]
#[pyo3(signature = (rho, h, t, basis=None, gamma=0.0))]
fn evolve(rho: Rows, h: Rows, t: f64, basis: Option<&str>, gamma: f64) -> PyResult<Rows> {
    let rho = state(rho)?;
    let h = operator(h)?;
    let spec = match self::basis(basis)? {
        Some(b) => LindbladSpec::dephasing(h, b, gamma),
        None => LindbladSpec::unitary(h),
    }
    .map_err(to_py)?;
    Ok(rows(evolve_lindblad(&rho, &spec, t).map_err(to_py)?.operator()))
}

/// `I(A:B)` in nats.
#[pyfunction]
fn mutual_info(rho: Rows, a: Vec<usize>, b: Vec<usize>) -> PyResult<f64> {
    mutual_information(&state(rho)?, &mask(a)?, &mask(b)?).map_err(to_py)
}

/// `I(A:B) + I(A:C) - I(A:BC)` in nats.
#[pyfunction]
fn tripartite_info(rho: Rows, a: Vec<usize>, b: Vec<usize>, c: Vec<usize>) -> PyResult<f64> {
    tripartite_mutual_information(&state(rho)?, &mask(a)?, &mask(b)?, &mask(c)?).map_err(to_py)
}

/// Operator state of an `n`-qubit unitary on `2n` qubits (inputs `0..n`,
/// outputs `n..2n`); its tripartite information is the unitary's TMI.
#[pyfunction]
fn unitary_operator_state(u: Rows) -> PyResult<Rows> {
    let u = operator(u)?;
    Ok(rows(operator_state(u.matrix()).map_err(to_py)?.operator()))
}

/// Pauli-averaged OTOC between supports `a` and `b` at time `t`, returned as
/// `(value, stderr)`; the standard error is zero when the average is exact.
#[pyfunction]
#[pyo3(signature = (rho, h, a, b, t, include_identity=true))]
fn pauli_otoc(rho: Rows, h: Rows, a: Vec<usize>, b: Vec<usize>, t: f64, include_identity: bool) -> PyResult<(f64, f64)> {
    let avg = pauli_averaged_otoc(&state(rho)?, &mask(a)?, &mask(b)?, &operator(h)?, t, include_identity)
        .map_err(to_py)?;
    Ok((avg.value, avg.stderr))
}

/// Seed of realization `index` derived from `master_seed`.
#[pyfunction]
fn realization_seed(master_seed: u64, index: u64) -> u64 {
    ensemble::realization_seed(master_seed, index)
}

/// Built-in oracle checks as `(name, passed, detail)` triples.
#[pyfunction]
fn selftest() -> Vec<(String, bool, String)> {
    run_selftest()
        .into_iter()
        .map(|o| (o.name.to_string(), o.passed, o.detail))
        .collect()
}

/// Aggregated ensemble output.
#[pyclass(frozen, get_all)]
struct EnsembleResult {
    times: Vec<f64>,
    /// Trace name → per-time ensemble mean.
    mean: HashMap<String, Vec<f64>>,
    /// Trace name → per-time standard error of the mean.
    stderr: HashMap<String, Vec<f64>>,
    /// `(realization index, message)` for every realization that failed.
    failures: Vec<(usize, String)>,
}

#[pymethods]
impl EnsembleResult {
    fn trace_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.mean.keys().cloned().collect();
        names.sort();
        names
    }

    fn __repr__(&self) -> String {
        format!(
            "EnsembleResult(n_times={}, traces={:?}, failures={})",
            self.times.len(),
            self.trace_names(),
            self.failures.len()
        )
    }
}

impl From<TimeSeries> for EnsembleResult {
    fn from(series: TimeSeries) -> Self {
        EnsembleResult {
            mean: series.traces.iter().map(|t| (t.name.clone(), t.mean.clone())).collect(),
            stderr: series.traces.iter().map(|t| (t.name.clone(), t.stderr.clone())).collect(),
            failures: series.failures.into_iter().map(|f| (f.index, f.message)).collect(),
            times: series.times,
        }
    }
}

/// A validated experiment: model, dynamics, time grid, ensemble and
/// diagnostics.
#[pyclass]
struct Experiment {
    config: ExperimentConfig,
}

#[pymethods]
impl Experiment {
    /// Parses a TOML experiment document.
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        Ok(Experiment {
            config: parse_config(text).map_err(to_py)?,
        })
    }

    /// Restores an experiment from its JSON serialization.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let config = ExperimentConfig::from_json(text).map_err(to_py)?;
        config.validate().map_err(to_py)?;
        Ok(Experiment { config })
    }

    fn to_json(&self) -> String {
        self.config.to_json()
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.config.n_qubits()
    }

    #[getter]
    fn n_realizations(&self) -> usize {
        self.config.n_realizations
    }

    #[getter]
    fn times(&self) -> Vec<f64> {
        self.config.time_grid.times()
    }

    /// Runs every realization and aggregates them. The result does not depend
    /// on `threads`.
    #[pyo3(signature = (threads=None))]
    fn run(&self, py: Python<'_>, threads: Option<usize>) -> PyResult<EnsembleResult> {
        let config = self.config.clone();
        py.detach(move || ensemble::run_ensemble(&config, threads))
            .map(EnsembleResult::from)
            .map_err(to_py)
    }

    /// Traces of one realization, keyed by name.
    fn run_realization(&self, py: Python<'_>, index: usize) -> PyResult<HashMap<String, Vec<f64>>> {
        let config = self.config.clone();
        let traces = py
            .detach(move || ensemble::run_realization(&config, index))
            .map_err(to_py)?;
        Ok(traces.names.iter().cloned().zip(traces.values).collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Experiment(model={}, n_qubits={}, gamma_over_j={}, n_realizations={})",
            self.config.model.name(),
            self.config.n_qubits(),
            self.config.gamma_over_j,
            self.config.n_realizations
        )
    }
}

#[pymodule]
fn scramble(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(syk_hamiltonian, m)?)?;
    m.add_function(wrap_pyfunction!(lmg_hamiltonian, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_info, m)?)?;
    m.add_function(wrap_pyfunction!(tripartite_info, m)?)?;
    m.add_function(wrap_pyfunction!(unitary_operator_state, m)?)?;
    m.add_function(wrap_pyfunction!(pauli_otoc, m)?)?;
    m.add_function(wrap_pyfunction!(realization_seed, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    m.add_class::<Experiment>()?;
    m.add_class::<EnsembleResult>()?;
    Ok(())
}
