//! Python bindings: metric construction, the approximate median, and the
//! exact and baseline oracles.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyIndexError, PyValueError};
use pyo3::prelude::*;

use median_core::generate::{generate, InstanceKind, InstanceSpec};
use median_core::harness::{report_to_json, run_report};
use median_core::{Error, Params};

fn to_py(err: Error) -> PyErr {
    match err {
        Error::IndexOutOfRange { .. } => PyIndexError::new_err(err.to_string()),
        Error::Io { .. } => PyIOError::new_err(err.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

#[pyclass(name = "MetricSpace", module = "nonadaptive_median", frozen)]
struct PyMetricSpace {
    inner: median_core::MetricSpace,
}

#[pymethods]
impl PyMetricSpace {
    /// Tabulated metric from the strict lower triangle, row-major.
    #[staticmethod]
    fn from_lower_triangle(n: usize, lower: Vec<f64>) -> PyResult<Self> {
        median_core::MetricSpace::from_lower_triangle(n, &lower)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    fn from_points(points: Vec<Vec<f64>>) -> PyResult<Self> {
        let dim = points.first().map_or(0, Vec::len);
        median_core::MetricSpace::from_points(dim, &points)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    fn line(n: usize) -> Self {
        Self {
            inner: median_core::MetricSpace::line(n),
        }
    }

    #[staticmethod]
    fn uniform(n: usize) -> Self {
        Self {
            inner: median_core::MetricSpace::uniform(n),
        }
    }

    #[staticmethod]
    #[pyo3(signature = (kind, n, seed=0, dim=2, density=None, amplitude=0.9))]
    fn generate(
        kind: &str,
        n: usize,
        seed: u64,
        dim: usize,
        density: Option<f64>,
        amplitude: f64,
    ) -> PyResult<Self> {
        let kind: InstanceKind = kind.parse().map_err(PyValueError::new_err)?;
        let spec = InstanceSpec {
            kind,
            n,
            seed,
            dim,
            density,
            amplitude,
        };
        generate(&spec).map(|inner| Self { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        median_core::MetricSpace::load(&path)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save(&path).map_err(to_py)
    }

    fn dist(&self, x: usize, y: usize) -> PyResult<f64> {
        let n = self.inner.len();
        if x >= n || y >= n {
            return Err(PyIndexError::new_err(format!(
                "index out of range for metric of size {n}"
            )));
        }
        Ok(self.inner.dist(x, y))
    }

    fn cost(&self, x: usize) -> PyResult<f64> {
        self.dist(x, x)?;
        Ok(self.inner.cost(x))
    }

    /// Human-readable metric axiom violations; empty when valid.
    fn validate(&self) -> Vec<String> {
        median_core::validate_metric(&self.inner)
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        let storage = if self.inner.is_euclidean() {
            "euclidean"
        } else {
            "matrix"
        };
        format!("MetricSpace(n={}, storage={storage})", self.inner.len())
    }
}

#[pyclass(name = "Params", module = "nonadaptive_median", frozen, get_all)]
struct PyParams {
    n: usize,
    h: usize,
    t: u64,
    sigma: usize,
    /// Digits of `n - sigma - 1`, most significant first.
    sprime: Vec<u64>,
}

impl From<&Params> for PyParams {
    fn from(p: &Params) -> Self {
        Self {
            n: p.n,
            h: p.h,
            t: p.t,
            sigma: p.sigma,
            sprime: p.sprime.0.clone(),
        }
    }
}

#[pymethods]
impl PyParams {
    fn query_bound(&self) -> u64 {
        (self.n - self.sigma) as u64 * (self.t + 1)
    }

    fn __repr__(&self) -> String {
        format!(
            "Params(n={}, h={}, t={}, sigma={}, sprime={:?})",
            self.n, self.h, self.t, self.sigma, self.sprime
        )
    }
}

#[pyclass(name = "MedianRun", module = "nonadaptive_median", frozen, get_all)]
struct PyMedianRun {
    n: usize,
    h: usize,
    output: usize,
    output_cost: f64,
    distinct_queries: usize,
    query_bound: u64,
    transcript_hash: u64,
    t: Option<u64>,
    sigma: Option<usize>,
    alpha: Option<usize>,
    alpha_score: Option<f64>,
    last_score: Option<f64>,
}

#[pymethods]
impl PyMedianRun {
    fn __repr__(&self) -> String {
        format!(
            "MedianRun(n={}, h={}, output={}, output_cost={}, distinct_queries={})",
            self.n, self.h, self.output, self.output_cost, self.distinct_queries
        )
    }
}

#[pyfunction]
fn choose_params(n: usize, h: usize) -> PyResult<PyParams> {
    median_core::choose_params(n, h)
        .map(|p| PyParams::from(&p))
        .map_err(to_py)
}

#[pyfunction]
fn tary_digits(j: u64, t: u64, h: usize) -> PyResult<Vec<u64>> {
    median_core::tary_digits(j, t, h)
        .map(|d| d.0)
        .map_err(to_py)
}

/// Runs the approximate 1-median algorithm with depth `h`.
#[pyfunction]
fn approx_median(py: Python<'_>, metric: &PyMetricSpace, h: usize) -> PyResult<PyMedianRun> {
    let run = py
        .detach(|| median_core::approx_median(&metric.inner, h))
        .map_err(to_py)?;
    let sel = run.selection.as_ref();
    Ok(PyMedianRun {
        n: run.n,
        h: run.h,
        output: run.output,
        output_cost: run.output_cost,
        distinct_queries: run.distinct_queries,
        query_bound: run.query_bound,
        transcript_hash: run.transcript_hash,
        t: sel.map(|s| s.params.t),
        sigma: sel.map(|s| s.params.sigma),
        alpha: sel.map(|s| s.alpha),
        alpha_score: sel.map(|s| s.alpha_score),
        last_score: sel.map(|s| s.last_score),
    })
}

/// Exhaustive 1-median: `(index, cost, per-point costs)`.
#[pyfunction]
fn exact_median(py: Python<'_>, metric: &PyMetricSpace) -> PyResult<(usize, f64, Vec<f64>)> {
    let r = py
        .detach(|| median_core::exact_median(&metric.inner))
        .map_err(to_py)?;
    Ok((r.exact_index, r.exact_cost, r.costs))
}

/// Baseline pseudo-distance median: `(output, output_cost, distinct_queries)`.
#[pyfunction]
fn tilde_median(py: Python<'_>, metric: &PyMetricSpace, h: usize) -> PyResult<(usize, f64, usize)> {
    let r = py
        .detach(|| median_core::tilde_median_naive(&metric.inner, h))
        .map_err(to_py)?;
    Ok((r.output, r.output_cost, r.count_distinct))
}

/// The JSON report the `median run` command writes.
#[pyfunction]
#[pyo3(signature = (metric, h, exact=false, tilde=false))]
fn report_json(
    py: Python<'_>,
    metric: &PyMetricSpace,
    h: usize,
    exact: bool,
    tilde: bool,
) -> PyResult<String> {
    let report = py
        .detach(|| run_report(&metric.inner, h, exact, tilde))
        .map_err(to_py)?;
    report_to_json(&report).map_err(to_py)
}

#[pymodule]
fn nonadaptive_median(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMetricSpace>()?;
    m.add_class::<PyParams>()?;
    m.add_class::<PyMedianRun>()?;
    m.add_function(wrap_pyfunction!(choose_params, m)?)?;
    m.add_function(wrap_pyfunction!(tary_digits, m)?)?;
    m.add_function(wrap_pyfunction!(approx_median, m)?)?;
    m.add_function(wrap_pyfunction!(exact_median, m)?)?;
    m.add_function(wrap_pyfunction!(tilde_median, m)?)?;
    m.add_function(wrap_pyfunction!(report_json, m)?)?;
    Ok(())
}
