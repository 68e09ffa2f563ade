//! Python bindings for `scrkernel`.
//!
//! Matrices cross the boundary as lists of rows; reports come back as plain
//! dicts built from their JSON form.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

use scrkernel::data::{file_dataset, synthetic_dataset, ColumnSelector, SynthKind, SynthSpec};
use scrkernel::forecast::{compare, FeatureKind, ForecastConfig};
use scrkernel::kernel::{self, complete_eigenbasis};
use scrkernel::numerics::DenseMatrix;
use scrkernel::reservoir::{self, FORECAST_INPUT_SCALE};
use scrkernel::spectral::{self, SweepMode};
use scrkernel::structure::canonicalize_symmetry;
use scrkernel::Error;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } | Error::Csv(_) => PyIOError::new_err(e.to_string()),
        Error::Config(_)
        | Error::Precondition(_)
        | Error::Structural(_)
        | Error::Data { .. }
        | Error::MissingColumn { .. }
        | Error::InsufficientData { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn rows(m: &DenseMatrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn json_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (None, Some(u)) => u.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn to_dict<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

/// Simple cycle reservoir `W = ρ·C` with input weights `r_in·s`.
#[pyclass(name = "CycleReservoir", module = "scrkernel_py", frozen)]
struct PyCycleReservoir {
    inner: reservoir::CycleReservoir,
}

#[pymethods]
impl PyCycleReservoir {
    /// Without `sign_pattern` the signs come from the binary digits of π.
    #[new]
    #[pyo3(signature = (n, rho = 1.0, input_scale = 1.0, sign_pattern = None))]
    fn new(n: usize, rho: f64, input_scale: f64, sign_pattern: Option<Vec<f64>>) -> PyResult<Self> {
        let inner = match sign_pattern {
            Some(s) => {
                if s.len() != n {
                    return Err(PyValueError::new_err(format!(
                        "sign pattern has {} entries, expected {n}",
                        s.len()
                    )));
                }
                reservoir::CycleReservoir::new(rho, s, input_scale)
            }
            None => reservoir::CycleReservoir::with_pi_pattern(n, rho, input_scale),
        }
        .map_err(to_py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.inner.rho()
    }

    #[getter]
    fn input_scale(&self) -> f64 {
        self.inner.input_scale()
    }

    #[getter]
    fn sign_pattern(&self) -> Vec<f64> {
        self.inner.sign_pattern().to_vec()
    }

    fn input_weights(&self) -> Vec<f64> {
        self.inner.input_weights()
    }

    fn coupling(&self) -> Vec<Vec<f64>> {
        rows(&self.inner.coupling())
    }

    /// States after each input, starting from `x0` (zero by default).
    #[pyo3(signature = (inputs, x0 = None))]
    fn drive(&self, inputs: Vec<f64>, x0: Option<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        let x0 = x0.unwrap_or_else(|| vec![0.0; self.inner.n()]);
        Ok(reservoir::drive(&self.inner, &inputs, &x0)
            .map_err(to_py_err)?
            .states)
    }

    fn feature_map(&self, u: Vec<f64>) -> Vec<f64> {
        reservoir::feature_map(&self.inner, &u)
    }

    /// Metric tensor for windows of length `tau` (default `n`).
    #[pyo3(signature = (tau = None))]
    fn metric_tensor(&self, tau: Option<usize>) -> PyResult<PyMetricTensor> {
        let tau = tau.unwrap_or(self.inner.n());
        let inner = kernel::metric_tensor(&self.inner, tau).map_err(to_py_err)?;
        Ok(PyMetricTensor { inner })
    }

    /// Structural check suite as a dict with a `passed` flag.
    #[pyo3(signature = (tau = None, seed = 0))]
    fn verify<'py>(
        &self,
        py: Python<'py>,
        tau: Option<usize>,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let tau = tau.unwrap_or(self.inner.n());
        let report = scrkernel::cli::run_verification(&self.inner, tau, seed).map_err(to_py_err)?;
        to_dict(py, &report)
    }

    fn __repr__(&self) -> String {
        format!(
            "CycleReservoir(n={}, rho={}, input_scale={})",
            self.inner.n(),
            self.inner.rho(),
            self.inner.input_scale()
        )
    }
}

#[pyclass(name = "MetricTensor", module = "scrkernel_py", frozen)]
struct PyMetricTensor {
    inner: kernel::MetricTensor,
}

#[pymethods]
impl PyMetricTensor {
    #[getter]
    fn tau(&self) -> usize {
        self.inner.tau
    }

    /// Rows and columns in chronological window order.
    #[getter]
    fn q(&self) -> Vec<Vec<f64>> {
        rows(&self.inner.q)
    }

    /// Same matrix indexed by lag (most recent sample first).
    fn lag_ordered(&self) -> Vec<Vec<f64>> {
        rows(&self.inner.lag_ordered())
    }

    fn kernel(&self, u: Vec<f64>, v: Vec<f64>) -> PyResult<f64> {
        kernel::kernel_eval(&self.inner, &u, &v).map_err(to_py_err)
    }

    /// Motifs with weight at least `threshold` times the largest.
    #[pyo3(signature = (threshold = 0.0))]
    fn motifs(&self, threshold: f64) -> PyResult<PyMotifBasis> {
        let inner = kernel::motif_decomposition(&self.inner, threshold).map_err(to_py_err)?;
        Ok(PyMotifBasis { inner })
    }

    /// Every eigenpair split into palindromic and anti-palindromic vectors;
    /// returns the basis and `(n_symmetric, n_skew)`.
    #[pyo3(signature = (tol = 1e-8))]
    fn symmetry_census(&self, tol: f64) -> PyResult<(PyMotifBasis, (usize, usize))> {
        let full = complete_eigenbasis(&self.inner).map_err(to_py_err)?;
        let (basis, report) = canonicalize_symmetry(&full, tol).map_err(to_py_err)?;
        let c = report
            .census
            .ok_or_else(|| PyRuntimeError::new_err("no census in report"))?;
        Ok((PyMotifBasis { inner: basis }, (c.n_symmetric, c.n_skew)))
    }

    /// Structure check of `Q` (Toeplitz, circulant, centrosymmetric).
    #[pyo3(signature = (tol = 1e-12))]
    fn structure<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let s = scrkernel::structure::matrix_structure(&self.inner.q, tol).map_err(to_py_err)?;
        to_dict(py, &s)
    }
}

#[pyclass(name = "MotifBasis", module = "scrkernel_py", frozen)]
struct PyMotifBasis {
    inner: kernel::MotifBasis,
}

#[pymethods]
impl PyMotifBasis {
    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights.clone()
    }

    /// Motifs as a list of vectors.
    #[getter]
    fn motifs(&self) -> Vec<Vec<f64>> {
        self.inner.motifs.columns()
    }

    #[getter]
    fn threshold_used(&self) -> f64 {
        self.inner.threshold_used
    }

    fn __len__(&self) -> usize {
        self.inner.n_m()
    }

    fn features(&self, u: Vec<f64>) -> PyResult<Vec<f64>> {
        kernel::rmm_features(&self.inner, &u).map_err(to_py_err)
    }

    /// `|DFT|` of each motif: one list of bin magnitudes per motif.
    fn fft_magnitudes(&self) -> PyResult<Vec<Vec<f64>>> {
        let f = spectral::motif_fft(&self.inner).map_err(to_py_err)?;
        Ok((0..f.cols())
            .map(|j| (0..f.rows()).map(|k| f[(k, j)].norm()).collect())
            .collect())
    }
}

#[pyfunction]
fn pi_sign_pattern(n: usize) -> PyResult<Vec<f64>> {
    reservoir::pi_sign_pattern(n).map_err(to_py_err)
}

/// Columns of the sampled real Fourier basis on `tau` points.
#[pyfunction]
#[pyo3(signature = (tau, n = None))]
fn real_fourier_basis(tau: usize, n: Option<usize>) -> PyResult<Vec<Vec<f64>>> {
    let f = spectral::real_fourier_basis(tau, n.unwrap_or(tau)).map_err(to_py_err)?;
    Ok(f.f.columns())
}

#[pyfunction]
fn periodic_extension_basis(n: usize, k: usize) -> PyResult<Vec<Vec<f64>>> {
    let f = spectral::periodic_extension_basis(n, k).map_err(to_py_err)?;
    Ok(f.f.columns())
}

/// Relative area at each spectral radius; `mode` is "scr" or "random".
#[pyfunction]
#[pyo3(signature = (n, rhos, mode = "scr", seed = 0))]
fn area_sweep<'py>(
    py: Python<'py>,
    n: usize,
    rhos: Vec<f64>,
    mode: &str,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let mode = match mode {
        "scr" => SweepMode::Scr,
        "random" => SweepMode::Random,
        other => return Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
    };
    let signs = reservoir::pi_sign_pattern(n).map_err(to_py_err)?;
    let reports = spectral::rho_sweep(&signs, &rhos, mode, seed).map_err(to_py_err)?;
    to_dict(py, &reports)
}

/// Runs the forecasting comparison on a CSV column or a synthetic series.
#[pyfunction]
#[pyo3(signature = (
    n = 97, rho = 1.0, tau = 194, horizon = 168, alpha = 1e-3, r_in = FORECAST_INPUT_SCALE,
    models = vec!["rmm-scr".to_string(), "rmm-fourier".to_string(), "scr-state".to_string()],
    data = None, column = None, synth = "sum-of-sines", length = 4000, seed = 0,
    splits = (0.6, 0.2, 0.2)
))]
#[allow(clippy::too_many_arguments)]
fn forecast<'py>(
    py: Python<'py>,
    n: usize,
    rho: f64,
    tau: usize,
    horizon: usize,
    alpha: f64,
    r_in: f64,
    models: Vec<String>,
    data: Option<PathBuf>,
    column: Option<String>,
    synth: &str,
    length: usize,
    seed: u64,
    splits: (f64, f64, f64),
) -> PyResult<Bound<'py, PyAny>> {
    let models = models
        .iter()
        .map(|m| m.parse::<FeatureKind>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(to_py_err)?;
    let cfg = ForecastConfig {
        n,
        rho,
        tau,
        horizon,
        alpha,
        r_in,
        seed,
        models,
        ..ForecastConfig::default()
    };
    let fractions = [splits.0, splits.1, splits.2];
    let dataset = match data {
        Some(path) => {
            let column =
                column.ok_or_else(|| PyValueError::new_err("column is required with data"))?;
            file_dataset(&path, &ColumnSelector(column), fractions)
        }
        None => {
            let kind: SynthKind = synth.parse().map_err(to_py_err)?;
            synthetic_dataset(&SynthSpec::default_for(kind), length, seed, fractions)
        }
    }
    .map_err(to_py_err)?;
    let report = compare(&cfg, &dataset).map_err(to_py_err)?;
    to_dict(py, &report)
}

#[pymodule]
fn scrkernel_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", scrkernel::VERSION)?;
    m.add_class::<PyCycleReservoir>()?;
    m.add_class::<PyMetricTensor>()?;
    m.add_class::<PyMotifBasis>()?;
    m.add_function(wrap_pyfunction!(pi_sign_pattern, m)?)?;
    m.add_function(wrap_pyfunction!(real_fourier_basis, m)?)?;
    m.add_function(wrap_pyfunction!(periodic_extension_basis, m)?)?;
    m.add_function(wrap_pyfunction!(area_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(forecast, m)?)?;
    Ok(())
}
