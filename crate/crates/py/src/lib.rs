//! Python bindings. Reports cross the boundary as JSON text.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use oddsym_core::config::ExperimentConfig;
use oddsym_core::eigen;
use oddsym_core::experiment;
use oddsym_core::solve1d::{self, Init, MinimizeOptions, Preset};
use oddsym_core::OddsymError;

fn err(e: OddsymError) -> PyErr {
    match e {
        OddsymError::InvalidInput(_) | OddsymError::Config(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

fn parse(config: &str) -> PyResult<ExperimentConfig> {
    ExperimentConfig::parse(config).map_err(err)
}

/// `(name, config text)` for every built-in config.
#[pyfunction]
fn preset_catalog() -> Vec<(String, String)> {
    experiment::preset_catalog()
        .into_iter()
        .map(|(n, t)| (n.to_string(), t.to_string()))
        .collect()
}

/// Runs a config in memory: `(exit code, message, {file name: contents})`.
#[pyfunction]
#[pyo3(signature = (config, seed=None, mesh=None))]
fn run(config: &str, seed: Option<u64>, mesh: Option<usize>) -> PyResult<(i32, Option<String>, Vec<(String, String)>)> {
    let mut cfg = parse(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(n) = mesh {
        cfg.mesh = n;
    }
    let out = experiment::execute(&cfg);
    Ok((
        out.status.exit_code(),
        out.message,
        out.artifacts.into_iter().map(|a| (a.name, a.contents)).collect(),
    ))
}

/// Hypothesis verdicts for the problem of a config, as JSON.
#[pyfunction]
fn check_hypotheses(config: &str) -> PyResult<String> {
    let p = parse(config)?.problem().map_err(err)?;
    to_json(&oddsym_core::check_hypotheses_lenient(&p, oddsym_core::weights::DEFAULT_GRID).map_err(err)?)
}

/// Minimizes from one preset: `(energy, nodes, values, diagnostics JSON)`.
#[pyfunction]
#[pyo3(signature = (config, preset="odd_tanh", mesh=None))]
fn minimize(config: &str, preset: &str, mesh: Option<usize>) -> PyResult<(f64, Vec<f64>, Vec<f64>, String)> {
    let cfg = parse(config)?;
    let p = cfg.problem().map_err(err)?;
    let preset = Preset::parse(preset).map_err(err)?;
    let opts = MinimizeOptions {
        seed: cfg.seed,
        ..MinimizeOptions::default()
    };
    let s = solve1d::minimize(&p, &Init::Preset(preset), mesh.unwrap_or(cfg.mesh), &opts).map_err(err)?;
    Ok((s.energy, s.u.mesh.nodes(), s.u.values.clone(), to_json(&s.diagnostics)?))
}

/// First weighted eigenvalue and its bracket, as JSON.
#[pyfunction]
#[pyo3(signature = (config, mesh=512))]
fn lambda1(config: &str, mesh: usize) -> PyResult<String> {
    let p = parse(config)?.problem().map_err(err)?;
    to_json(&eigen::lambda1(&p, mesh).map_err(err)?)
}

/// Spectral uniqueness certificate, as JSON.
#[pyfunction]
fn uniqueness_certificate(config: &str) -> PyResult<String> {
    let p = parse(config)?.problem().map_err(err)?;
    to_json(&eigen::uniqueness_certificate(&p).map_err(err)?)
}

#[pymodule]
fn oddsym(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(preset_catalog, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(check_hypotheses, m)?)?;
    m.add_function(wrap_pyfunction!(minimize, m)?)?;
    m.add_function(wrap_pyfunction!(lambda1, m)?)?;
    m.add_function(wrap_pyfunction!(uniqueness_certificate, m)?)?;
    Ok(())
}
