//! Python bindings for `grkhs`.
//!
//! Shapes are passed as rule strings (`"iso:1"`, `"powerlaw:1:2"`, ...) and
//! points as lists of floats. Invalid input raises `ValueError`; a hit size
//! guard raises `grkhs.ResourceLimitError`.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ::grkhs as core;
use core::algorithms::WorstCaseMethod;
use core::{Criterion, Design, ShapeSequence};

create_exception!(grkhs, ResourceLimitError, PyRuntimeError);

fn to_py(e: core::Error) -> PyErr {
    match e {
        core::Error::ResourceLimit { .. } => ResourceLimitError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn shape(rule: &str) -> PyResult<ShapeSequence> {
    rule.parse().map_err(to_py)
}

fn criterion(s: &str) -> PyResult<Criterion> {
    s.parse().map_err(to_py)
}

/// Closed-form univariate spectrum of the Gaussian kernel with shape `gamma`.
#[pyclass(name = "UnivariateSpectrum", frozen)]
struct PySpectrum {
    inner: core::UnivariateSpectrum,
}

#[pymethods]
impl PySpectrum {
    #[new]
    fn new(gamma: f64) -> PyResult<Self> {
        Ok(Self {
            inner: core::UnivariateSpectrum::new(gamma).map_err(to_py)?,
        })
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega
    }

    /// λ_j, j ≥ 1.
    fn eigenvalue(&self, j: usize) -> PyResult<f64> {
        if j == 0 {
            return Err(PyValueError::new_err("eigenvalue index starts at 1"));
        }
        Ok(self.inner.lambda(j))
    }

    /// λ_1, …, λ_k.
    fn eigenvalues(&self, k: usize) -> Vec<f64> {
        (1..=k).map(|j| self.inner.lambda(j)).collect()
    }

    fn eigenfunction(&self, j: usize, x: f64) -> PyResult<f64> {
        self.inner.eigenfunction(j, x).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("UnivariateSpectrum(gamma={}, omega={})", self.inner.gamma, self.inner.omega)
    }
}

/// Summary of an (ε, d) complexity sweep.
#[pyclass(name = "ComplexityReport", frozen, get_all)]
struct PyReport {
    shape: String,
    criterion: String,
    /// (d, eps, n, lower_bound) in grid order.
    cells: Vec<(usize, f64, u64, bool)>,
    p_hat: Option<f64>,
    p_hat_small_eps: Option<f64>,
    q_hat: Option<f64>,
    t_hat: Option<f64>,
    classification: String,
}

#[pymethods]
impl PyReport {
    fn __repr__(&self) -> String {
        format!(
            "ComplexityReport(shape={:?}, cells={}, classification={:?})",
            self.shape,
            self.cells.len(),
            self.classification
        )
    }
}

#[pyfunction]
fn shape_parameters(rule: &str, d: usize) -> PyResult<Vec<f64>> {
    shape(rule)?.gammas(d).map_err(to_py)
}

#[pyfunction]
fn kernel_eval(rule: &str, x: Vec<f64>, t: Vec<f64>) -> PyResult<f64> {
    core::kernel_eval(&shape(rule)?, x.len(), &x, &t).map_err(to_py)
}

#[pyfunction]
fn initial_error(rule: &str, d: usize) -> PyResult<f64> {
    core::initial_error(&shape(rule)?, d).map_err(to_py)
}

/// The k largest Nyström eigenvalues on an m-point Gauss-Hermite rule.
#[pyfunction]
fn nystrom_eigs(gamma: f64, m: usize, k: usize) -> PyResult<Vec<f64>> {
    core::nystrom_eigs(gamma, m, k).map_err(to_py)
}

/// The n largest d-variate eigenvalues as (value, multi-index) pairs.
#[pyfunction]
fn top_eigenvalues(rule: &str, d: usize, n: usize) -> PyResult<Vec<(f64, Vec<usize>)>> {
    let list = core::top_n_tensor_eigenvalues(&shape(rule)?, d, n).map_err(to_py)?;
    Ok(list.entries.iter().map(|e| (e.value, e.index.to_dense(d))).collect())
}

#[pyfunction]
fn minimal_error(rule: &str, d: usize, n: usize) -> PyResult<f64> {
    core::minimal_error_all(&shape(rule)?, d, n).map_err(to_py)
}

/// e(0), …, e(big_n).
#[pyfunction]
fn error_sequence(rule: &str, d: usize, big_n: usize) -> PyResult<Vec<f64>> {
    Ok(core::error_sequence_all(&shape(rule)?, d, big_n).map_err(to_py)?.values)
}

#[pyfunction]
#[pyo3(signature = (rule, d, eps, criterion="abs"))]
fn info_complexity(rule: &str, d: usize, eps: f64, criterion: &str) -> PyResult<u64> {
    core::info_complexity(&shape(rule)?, d, eps, self::criterion(criterion)?).map_err(to_py)
}

#[pyfunction]
fn quasipoly_exponent(gamma: f64) -> PyResult<f64> {
    core::quasipoly_exponent(gamma).map_err(to_py)
}

/// r(γ) of a shape rule; `inf` for geometric decay.
#[pyfunction]
fn decay_rate(rule: &str) -> PyResult<f64> {
    Ok(core::decay_rate_r(&shape(rule)?).map_err(to_py)?.value)
}

/// Worst-case error of the spline on `points` (a list of d-vectors);
/// `m` is the Nyström grid size per coordinate.
#[pyfunction]
#[pyo3(signature = (rule, points, d=None, m=None))]
fn spline_worst_case_error(rule: &str, points: Vec<Vec<f64>>, d: Option<usize>, m: Option<usize>) -> PyResult<f64> {
    let d = d
        .or_else(|| points.first().map(Vec::len))
        .ok_or_else(|| PyValueError::new_err("d is required for an empty design"))?;
    let design = Design::new(d, points).map_err(to_py)?;
    let m = m.unwrap_or(core::verify::spline_grid_size(d));
    core::spline_worst_case_error_with(&shape(rule)?, d, &design, m, WorstCaseMethod::Spectral).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (rule, eps, dims, criterion="abs"))]
fn tractability_probe(rule: &str, eps: Vec<f64>, dims: Vec<usize>, criterion: &str) -> PyResult<PyReport> {
    let r = core::tractability_probe(&shape(rule)?, &eps, &dims, self::criterion(criterion)?).map_err(to_py)?;
    Ok(PyReport {
        shape: r.shape.clone(),
        criterion: r.criterion.to_string(),
        cells: r.cells.iter().map(|c| (c.d, c.eps, c.n, c.lower_bound)).collect(),
        p_hat: r.p_hat,
        p_hat_small_eps: r.p_hat_small_eps,
        q_hat: r.q_hat,
        t_hat: r.t_hat,
        classification: r.classification.to_string(),
    })
}

/// Runs the self-check suite: (id, name, passed, detail) per check.
#[pyfunction]
fn verify(py: Python<'_>) -> Vec<(u32, String, bool, String)> {
    py.detach(core::verify::run_all)
        .into_iter()
        .map(|o| (o.id, o.name, o.passed, o.detail))
        .collect()
}

#[pymodule]
fn grkhs(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", core::VERSION)?;
    m.add("ResourceLimitError", m.py().get_type::<ResourceLimitError>())?;
    m.add_class::<PySpectrum>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(shape_parameters, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_eval, m)?)?;
    m.add_function(wrap_pyfunction!(initial_error, m)?)?;
    m.add_function(wrap_pyfunction!(nystrom_eigs, m)?)?;
    m.add_function(wrap_pyfunction!(top_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(minimal_error, m)?)?;
    m.add_function(wrap_pyfunction!(error_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(info_complexity, m)?)?;
    m.add_function(wrap_pyfunction!(quasipoly_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(decay_rate, m)?)?;
    m.add_function(wrap_pyfunction!(spline_worst_case_error, m)?)?;
    m.add_function(wrap_pyfunction!(tractability_probe, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
