//! Python bindings. Structured results cross the boundary as JSON text.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use stabcert::nonlocality;
use stabcert::sim::{self, VerifyOptions};
use stabcert::stabilizer::{self, StabilizerGroup};
use stabcert::witness::{witness_map, WitnessCertificate};

fn py_err(e: stabcert::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn group(generators: Vec<String>) -> PyResult<StabilizerGroup> {
    StabilizerGroup::from_strs(&generators).map_err(py_err)
}

fn json<T: serde::Serialize>(value: &T) -> PyResult<String> {
    stabcert::io::to_json(value).map_err(py_err)
}

/// GME verdict and, if not GME, one side of a violating bipartition.
#[pyfunction]
fn is_gme(generators: Vec<String>) -> PyResult<(bool, Option<Vec<usize>>)> {
    let v = group(generators)?.is_gme().map_err(py_err)?;
    Ok((v.gme, v.violating))
}

#[pyfunction]
fn witness_certificate(generators: Vec<String>) -> PyResult<String> {
    let g = group(generators)?;
    let map = witness_map(&g).map_err(py_err)?;
    json(&WitnessCertificate::build(&g, &map).map_err(py_err)?)
}

#[pyfunction]
#[pyo3(signature = (generators, mode = "both", tol_fidelity = sim::DEFAULT_FIDELITY_TOLERANCE))]
fn verify(generators: Vec<String>, mode: &str, tol_fidelity: f64) -> PyResult<String> {
    let g = group(generators)?;
    let options = VerifyOptions { mode: mode.parse().map_err(py_err)?, fidelity_tolerance: tol_fidelity, ..VerifyOptions::default() };
    json(&sim::build_report(&g, &options).map_err(py_err)?)
}

#[pyfunction]
fn chained_minimum(n: usize) -> PyResult<f64> {
    Ok(nonlocality::quantum_chained_minimum(n, 2).map_err(py_err)?.value)
}

/// `(raw, clamped)` aggregate bound from the pair bounds of `n` parties.
#[pyfunction]
fn aggregate_bound(pair_bounds: Vec<f64>, n: usize) -> PyResult<(f64, f64)> {
    let b = nonlocality::theorem2_bound(&pair_bounds, n).map_err(py_err)?;
    Ok((b.raw, b.clamped))
}

#[pyfunction]
#[pyo3(signature = (n, d = 2))]
fn gmnl_threshold(n: usize, d: usize) -> PyResult<(f64, usize, usize)> {
    let t = nonlocality::gmnl_threshold(n, d, nonlocality::DEFAULT_SETTINGS_CAP).map_err(py_err)?;
    Ok((t.pair_requirement, t.n_min, t.m))
}

#[pyfunction]
fn max_gme_dimension(n: u64) -> PyResult<u64> {
    stabilizer::max_gme_dimension(n).map_err(py_err)
}

#[pymodule]
fn stabcert_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(is_gme, m)?)?;
    m.add_function(wrap_pyfunction!(witness_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(chained_minimum, m)?)?;
    m.add_function(wrap_pyfunction!(aggregate_bound, m)?)?;
    m.add_function(wrap_pyfunction!(gmnl_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(max_gme_dimension, m)?)?;
    Ok(())
}
