//! Python bindings. Bit words cross the boundary as strings of '0' and '1'.

use dsum_core::config::ExperimentConfig;
use dsum_core::decoder::{self, DecodeConfig, ListResult, Rounding};
use dsum_core::direct_sum::{self, ParityMode};
use dsum_core::gf2::{self, BaseCodeSpec, BitWord};
use dsum_core::spectral::{self, CayleyGraphSpec, RotationGraph};
use dsum_core::{pipeline, walks, Error};
use pyo3::exceptions::{PyOverflowError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: Error) -> PyErr {
    match e {
        Error::Cap { .. } => PyOverflowError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn word(s: &str) -> PyResult<BitWord> {
    s.parse().map_err(err)
}

fn json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string_pretty(v).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyclass(name = "LinearCode", module = "dsum", from_py_object)]
#[derive(Clone)]
struct PyLinearCode(gf2::LinearCode);

#[pymethods]
impl PyLinearCode {
    /// Rejection-samples a code whose nonzero codewords all have bias at most `epsilon0`.
    #[staticmethod]
    #[pyo3(signature = (epsilon0, dim, blocklength, seed=0, multiplicity=1, budget=100_000))]
    fn random_balanced(
        epsilon0: f64,
        dim: usize,
        blocklength: usize,
        seed: u64,
        multiplicity: usize,
        budget: usize,
    ) -> PyResult<Self> {
        let spec = BaseCodeSpec { epsilon0, dim, blocklength, multiplicity, seed };
        gf2::random_balanced_code(&spec, budget, gf2::DEFAULT_ENUM_CAP)
            .map(PyLinearCode)
            .map_err(err)
    }

    #[staticmethod]
    fn from_rows(rows: Vec<String>) -> PyResult<Self> {
        let rows = rows.iter().map(|r| word(r)).collect::<PyResult<Vec<_>>>()?;
        let n = rows.first().map_or(0, |r| r.len());
        gf2::LinearCode::new(rows, n, gf2::DEFAULT_ENUM_CAP)
            .map(PyLinearCode)
            .map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn blocklength(&self) -> usize {
        self.0.blocklength()
    }

    fn generator(&self) -> Vec<String> {
        self.0.generator().iter().map(|r| r.to_string()).collect()
    }

    fn message(&self, index: u64) -> String {
        self.0.message(index).to_string()
    }

    fn encode(&self, message: &str) -> PyResult<String> {
        Ok(self.0.encode(&word(message)?).map_err(err)?.to_string())
    }

    fn bias(&self) -> PyResult<f64> {
        gf2::code_bias_bruteforce(&self.0).map_err(err)
    }

    fn list_at_radius(&self, received: &str, radius: f64) -> PyResult<Vec<String>> {
        let list = gf2::list_messages_at_radius(&self.0, &word(received)?, radius).map_err(err)?;
        Ok(list.iter().map(|m| m.to_string()).collect())
    }
}

#[pyclass(name = "Graph", module = "dsum", from_py_object)]
#[derive(Clone)]
struct PyGraph(RotationGraph);

#[pymethods]
impl PyGraph {
    #[staticmethod]
    fn cycle(n: usize) -> PyResult<Self> {
        RotationGraph::cycle(n).map(PyGraph).map_err(err)
    }

    #[staticmethod]
    fn complete_with_loops(n: usize) -> PyResult<Self> {
        RotationGraph::complete_with_loops(n).map(PyGraph).map_err(err)
    }

    /// Cayley graph on F₂^m; generators are m-bit integers.
    #[staticmethod]
    fn cayley(m: usize, generators: Vec<u64>) -> PyResult<Self> {
        let spec = CayleyGraphSpec { m, generators };
        spec.validate().map_err(err)?;
        RotationGraph::cayley_f2(&spec).map(PyGraph).map_err(err)
    }

    #[staticmethod]
    fn random_cayley(m: usize, degree: usize, seed: u64) -> PyResult<Self> {
        let spec = CayleyGraphSpec::random(m, degree, seed).map_err(err)?;
        RotationGraph::cayley_f2(&spec).map(PyGraph).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (n, degree, seed=0, budget=10_000))]
    fn random_regular(n: usize, degree: usize, seed: u64, budget: usize) -> PyResult<Self> {
        RotationGraph::random_regular(n, degree, seed, budget)
            .map(PyGraph)
            .map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.0.degree()
    }

    fn rot(&self, v: usize, j: usize) -> PyResult<(usize, usize)> {
        if v >= self.0.n() || j >= self.0.degree() {
            return Err(PyValueError::new_err("vertex or port out of range"));
        }
        Ok(self.0.rot(v, j))
    }

    fn sigma2(&self) -> PyResult<f64> {
        spectral::sigma2(&spectral::normalized_adjacency(&self.0)).map_err(err)
    }

    fn second_eigenvalue(&self) -> PyResult<f64> {
        spectral::second_eigenvalue(&spectral::normalized_adjacency(&self.0)).map_err(err)
    }
}

#[pyclass(name = "Walks", module = "dsum", from_py_object)]
#[derive(Clone)]
struct PyWalks(walks::TupleCollection);

#[pymethods]
impl PyWalks {
    #[staticmethod]
    fn all_walks(graph: &PyGraph, k: usize) -> PyResult<Self> {
        walks::all_walks(&graph.0, k, walks::DEFAULT_TUPLE_CAP)
            .map(PyWalks)
            .map_err(err)
    }

    #[staticmethod]
    fn complete(n: usize, k: usize) -> PyResult<Self> {
        walks::complete(n, k, walks::DEFAULT_TUPLE_CAP)
            .map(PyWalks)
            .map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.ground_size()
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.arity()
    }

    fn tuple(&self, i: usize) -> PyResult<Vec<u32>> {
        if i >= self.0.len() {
            return Err(PyValueError::new_err("tuple index out of range"));
        }
        Ok(self.0.tuple(i).to_vec())
    }

    fn is_regular(&self) -> bool {
        self.0.is_regular()
    }

    /// Largest rescaled σ₂ over all split operators.
    fn tau(&self) -> PyResult<f64> {
        walks::splittability_tau(&self.0).map_err(err)
    }

    fn split_sigmas(&self) -> PyResult<Vec<((usize, usize, usize), f64)>> {
        walks::split_sigmas(&self.0).map_err(err)
    }

    fn lift_word(&self, z: &str) -> PyResult<String> {
        Ok(direct_sum::dsum_lift_word(&word(z)?, &self.0).map_err(err)?.to_string())
    }

    /// Largest lifted bias over words of bias at most `eps0`; exhaustive when `trials` is None.
    #[pyo3(signature = (eps0, trials=None, seed=0))]
    fn parity_sampling(&self, eps0: f64, trials: Option<usize>, seed: u64) -> PyResult<f64> {
        let mode = match trials {
            None => ParityMode::Exhaustive { cap: gf2::DEFAULT_ENUM_CAP },
            Some(trials) => ParityMode::Sampled { trials, seed },
        };
        Ok(direct_sum::measured_parity_sampling(&self.0, eps0, mode).map_err(err)?.epsilon)
    }
}

#[pyclass(name = "LiftedCode", module = "dsum", from_py_object)]
#[derive(Clone)]
struct PyLiftedCode(direct_sum::LiftedCode);

fn list_dict<'py>(py: Python<'py>, r: &ListResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let entries: Vec<(String, f64)> = r
        .entries
        .iter()
        .map(|e| (e.message.to_string(), e.distance))
        .collect();
    d.set_item("list", entries)?;
    d.set_item("radius", r.radius)?;
    d.set_item("certified", r.certified)?;
    d.set_item("atoms", r.atoms.clone())?;
    d.set_item("roundings_tried", r.roundings_tried)?;
    d.set_item("warnings", r.warnings.clone())?;
    Ok(d)
}

#[pymethods]
impl PyLiftedCode {
    #[new]
    fn new(base: &PyLinearCode, walks: &PyWalks) -> PyResult<Self> {
        direct_sum::dsum_lift_code(&base.0, &walks.0, gf2::DEFAULT_ENUM_CAP)
            .map(PyLiftedCode)
            .map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn blocklength(&self) -> usize {
        self.0.blocklength()
    }

    fn encode(&self, message: &str) -> PyResult<String> {
        Ok(self.0.encode(&word(message)?).map_err(err)?.to_string())
    }

    fn bias(&self) -> PyResult<f64> {
        direct_sum::lifted_code_bias(&self.0).map_err(err)
    }

    /// Messages within 1/2 − β of `received`. Rounding is "threshold" or "sampled".
    #[pyo3(signature = (received, beta, rounding="threshold", trials=4, seed=0))]
    fn list_decode<'py>(
        &self,
        py: Python<'py>,
        received: &str,
        beta: f64,
        rounding: &str,
        trials: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let mut cfg = DecodeConfig::new(beta);
        cfg.rounding = match rounding {
            "threshold" => Rounding::Threshold,
            "sampled" => Rounding::Sampled { trials, seed },
            other => return Err(PyValueError::new_err(format!("unknown rounding {other:?}"))),
        };
        let y = word(received)?;
        let r = py.detach(|| decoder::list_decode(&y, &self.0, &cfg)).map_err(err)?;
        list_dict(py, &r)
    }

    /// The decoded message (or None) and whether the decomposition was certified.
    fn unique_decode(&self, py: Python<'_>, received: &str) -> PyResult<(Option<String>, bool)> {
        let y = word(received)?;
        let (m, r) = py
            .detach(|| decoder::unique_decode(&y, &self.0, &DecodeConfig::new(0.25)))
            .map_err(err)?;
        Ok((m.map(|m| m.to_string()), r.certified))
    }

    fn nearest_bruteforce(&self, received: &str) -> PyResult<(String, f64)> {
        let (m, d) = decoder::nearest_codeword_bruteforce(&word(received)?, &self.0).map_err(err)?;
        Ok((m.to_string(), d))
    }
}

/// Flips ⌊rate·N⌋ positions chosen by a seeded stream.
#[pyfunction]
#[pyo3(signature = (word_, rate, seed=0, stream=0))]
fn corrupt(word_: &str, rate: f64, seed: u64, stream: u64) -> PyResult<String> {
    Ok(pipeline::corrupt_word(&word(word_)?, rate, seed, stream).to_string())
}

#[pyfunction]
fn bias(w: &str) -> PyResult<f64> {
    Ok(gf2::bias(&word(w)?))
}

/// Analyze report for a TOML config, as JSON.
#[pyfunction]
#[pyo3(signature = (config="", overrides=vec![]))]
fn analyze(py: Python<'_>, config: &str, overrides: Vec<String>) -> PyResult<String> {
    let cfg = ExperimentConfig::parse(config, &overrides).map_err(err)?;
    let report = py
        .detach(|| {
            let inst = pipeline::build_instance(&cfg)?;
            pipeline::analyze(&inst, &cfg)
        })
        .map_err(err)?;
    json(&report)
}

/// Deterministic run report for a TOML config, as JSON.
#[pyfunction]
#[pyo3(signature = (config="", overrides=vec![]))]
fn run(py: Python<'_>, config: &str, overrides: Vec<String>) -> PyResult<String> {
    let cfg = ExperimentConfig::parse(config, &overrides).map_err(err)?;
    let report = py.detach(|| pipeline::run_experiment(&cfg, true)).map_err(err)?;
    json(&report)
}

#[pymodule]
fn dsum(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLinearCode>()?;
    m.add_class::<PyGraph>()?;
    m.add_class::<PyWalks>()?;
    m.add_class::<PyLiftedCode>()?;
    m.add_function(wrap_pyfunction!(corrupt, m)?)?;
    m.add_function(wrap_pyfunction!(bias, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
