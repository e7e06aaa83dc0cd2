//! Python bindings: `import mvi`.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mvi_core::bench::{self, ExperimentConfig};
use mvi_core::problems::{example41_params, example42_params, verify_solution};
use mvi_core::{MviError, Point, SelectionContext};

fn to_py(e: MviError) -> PyErr {
    match e {
        MviError::Io(_)
        | MviError::BudgetExhausted { .. }
        | MviError::InfeasibleProblem { .. }
        | MviError::LineSearchStalled(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn point(v: Vec<f64>) -> PyResult<Point> {
    Point::new(v).map_err(to_py)
}

fn selection(name: &str, seed: u64) -> PyResult<mvi_core::SelectionStrategy> {
    bench::parse_selection(name, seed).map_err(to_py)
}

/// A built-in benchmark problem.
#[pyclass(name = "Problem", frozen)]
struct PyProblem {
    inner: mvi_core::VIProblem,
}

#[pymethods]
impl PyProblem {
    #[staticmethod]
    fn example41() -> Self {
        Self {
            inner: mvi_core::build_example41(),
        }
    }

    #[staticmethod]
    fn example42() -> Self {
        Self {
            inner: mvi_core::build_example42(),
        }
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim
    }

    #[getter]
    fn known_solution(&self) -> Option<Vec<f64>> {
        self.inner.known_solution.clone().map(Point::into_vec)
    }

    fn membership(&self, x: Vec<f64>) -> PyResult<bool> {
        let x = point(x)?;
        x.check_dim(self.inner.dim).map_err(to_py)?;
        Ok(self.inner.set.contains(&x))
    }

    fn project(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        let x = point(x)?;
        x.check_dim(self.inner.dim).map_err(to_py)?;
        self.inner.set.project(&x).map(Point::into_vec).map_err(to_py)
    }

    /// Returns `(point, steps)` after subgradient feasibility steps.
    #[pyo3(signature = (x, max_steps = 10_000))]
    fn repair(&self, x: Vec<f64>, max_steps: usize) -> PyResult<(Vec<f64>, usize)> {
        let r = mvi_core::procedure_a(&self.inner.set, &point(x)?, max_steps).map_err(to_py)?;
        Ok((r.output.into_vec(), r.steps))
    }

    #[pyo3(signature = (x, strategy = "midpoint", seed = 0, iteration = 0))]
    fn select(&self, x: Vec<f64>, strategy: &str, seed: u64, iteration: u64) -> PyResult<Vec<f64>> {
        let x = point(x)?;
        x.check_dim(self.inner.dim).map_err(to_py)?;
        let ctx = SelectionContext::new(selection(strategy, seed)?, iteration);
        Ok(self.inner.map.select(&x, &ctx).into_vec())
    }

    /// Norm of `x - P_C(x - mu w)`.
    #[pyo3(signature = (x, w, mu = 1.0))]
    fn residual(&self, x: Vec<f64>, w: Vec<f64>, mu: f64) -> PyResult<f64> {
        mvi_core::residual(&self.inner.set, &point(x)?, &point(w)?, mu)
            .map(|r| r.norm)
            .map_err(to_py)
    }

    /// Returns `(passed, worst_violation)`.
    #[pyo3(signature = (x, samples = 10_000))]
    fn verify(&self, x: Vec<f64>, samples: usize) -> PyResult<(bool, f64)> {
        verify_solution(&self.inner, &point(x)?, samples).map_err(to_py)
    }

    /// The parameters used for this example in the benchmarks.
    fn default_params(&self) -> PyResult<PySolverParams> {
        match self.inner.name.as_str() {
            "example41" => Ok(PySolverParams { inner: example41_params() }),
            "example42" => Ok(PySolverParams { inner: example42_params() }),
            other => Err(PyValueError::new_err(format!("no defaults for {other}"))),
        }
    }
}

#[pyclass(name = "SolverParams", skip_from_py_object)]
#[derive(Clone)]
struct PySolverParams {
    inner: mvi_core::SolverParams,
}

#[pymethods]
impl PySolverParams {
    #[new]
    #[pyo3(signature = (
        mu, gamma, alpha, epsilon, max_iters = 10_000, max_linesearch = 100,
        validation = "warn", selection = "midpoint", seed = 0,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        mu: f64,
        gamma: f64,
        alpha: f64,
        epsilon: f64,
        max_iters: usize,
        max_linesearch: u32,
        validation: &str,
        selection: &str,
        seed: u64,
    ) -> PyResult<Self> {
        let mut inner = mvi_core::SolverParams::new(mu, gamma, alpha, epsilon);
        inner.max_iters = max_iters;
        inner.max_linesearch = max_linesearch;
        inner.validation = bench::parse_validation(validation).map_err(to_py)?;
        inner.selection = self::selection(selection, seed)?;
        Ok(Self { inner })
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }

    #[setter]
    fn set_epsilon(&mut self, epsilon: f64) {
        self.inner.epsilon = epsilon;
    }

    /// Warnings about the inertia bound; raises in strict mode.
    fn validate(&self) -> PyResult<Vec<String>> {
        mvi_core::validate_params(&self.inner).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "SolverParams(mu={}, gamma={}, alpha={}, epsilon={})",
            self.inner.mu, self.inner.gamma, self.inner.alpha, self.inner.epsilon
        )
    }
}

#[pyclass(name = "SolveReport", frozen)]
struct PySolveReport {
    inner: mvi_core::SolveReport,
}

#[pymethods]
impl PySolveReport {
    #[getter]
    fn status(&self) -> &'static str {
        self.inner.status.as_str()
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged()
    }

    #[getter]
    fn solution(&self) -> Vec<f64> {
        self.inner.solution.clone().into_vec()
    }

    #[getter]
    fn final_residual(&self) -> f64 {
        self.inner.final_residual
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings.clone()
    }

    /// Number of failed invariant checks across the run.
    #[getter]
    fn failed_checks(&self) -> usize {
        self.inner.failed_checks().len()
    }

    /// One dict per iteration.
    fn trace<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner
            .trace
            .iter()
            .map(|r| {
                let d = PyDict::new(py);
                d.set_item("n", r.n)?;
                d.set_item("x", r.x.coords().to_vec())?;
                d.set_item("w", r.w.coords().to_vec())?;
                d.set_item("u", r.u.coords().to_vec())?;
                d.set_item("lambda", r.lambda)?;
                d.set_item("m", r.m)?;
                d.set_item("residual_norm", r.residual_norm)?;
                d.set_item("repair_steps", r.repair_steps)?;
                d.set_item("wallclock", r.wallclock)?;
                let checks = PyDict::new(py);
                for c in &r.checks {
                    checks.set_item(c.name, (c.passed, c.slack))?;
                }
                d.set_item("checks", checks)?;
                Ok(d)
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "SolveReport(status={:?}, iterations={}, final_residual={:e})",
            self.inner.status.as_str(),
            self.inner.iterations,
            self.inner.final_residual
        )
    }
}

#[pyfunction]
#[pyo3(signature = (problem, params, x0, x1 = None))]
fn solve(
    problem: &PyProblem,
    params: &PySolverParams,
    x0: Vec<f64>,
    x1: Option<Vec<f64>>,
) -> PyResult<PySolveReport> {
    let x0 = point(x0)?;
    let x1 = match x1 {
        Some(v) => point(v)?,
        None => x0.clone(),
    };
    mvi_core::solve(&problem.inner, &params.inner, &x0, &x1)
        .map(|inner| PySolveReport { inner })
        .map_err(to_py)
}

#[pyfunction]
fn alpha_bound(mu: f64) -> PyResult<f64> {
    mvi_core::alpha_bound(mu).map_err(to_py)
}

#[pyfunction]
fn project_box(lo: Vec<f64>, hi: Vec<f64>, x: Vec<f64>) -> PyResult<Vec<f64>> {
    mvi_core::project_box(&point(lo)?, &point(hi)?, &point(x)?)
        .map(Point::into_vec)
        .map_err(to_py)
}

#[pyfunction]
fn project_hyperplane_box(lo: Vec<f64>, hi: Vec<f64>, rhs: f64, x: Vec<f64>) -> PyResult<Vec<f64>> {
    mvi_core::project_hyperplane_box(&point(lo)?, &point(hi)?, rhs, &point(x)?)
        .map(Point::into_vec)
        .map_err(to_py)
}

#[pyfunction]
fn inertial_step(x_n: Vec<f64>, x_prev: Vec<f64>, alpha: f64) -> PyResult<Vec<f64>> {
    mvi_core::inertial_step(&point(x_n)?, &point(x_prev)?, alpha)
        .map(Point::into_vec)
        .map_err(to_py)
}

#[pyfunction]
fn tseng_step(y: Vec<f64>, nu: Vec<f64>, u: Vec<f64>, lam: f64) -> PyResult<Vec<f64>> {
    mvi_core::tseng_step(&point(y)?, &point(nu)?, &point(u)?, lam)
        .map(Point::into_vec)
        .map_err(to_py)
}

/// Runs the sweep in a TOML config, writes its CSV files and returns the
/// summary as CSV text.
#[pyfunction]
fn run_bench(config_path: PathBuf) -> PyResult<String> {
    let cfg: ExperimentConfig = bench::load_config(&config_path).map_err(to_py)?;
    bench::run_bench(&cfg).map(|o| o.summary_csv()).map_err(to_py)
}

#[pymodule]
fn mvi(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProblem>()?;
    m.add_class::<PySolverParams>()?;
    m.add_class::<PySolveReport>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_bound, m)?)?;
    m.add_function(wrap_pyfunction!(project_box, m)?)?;
    m.add_function(wrap_pyfunction!(project_hyperplane_box, m)?)?;
    m.add_function(wrap_pyfunction!(inertial_step, m)?)?;
    m.add_function(wrap_pyfunction!(tseng_step, m)?)?;
    m.add_function(wrap_pyfunction!(run_bench, m)?)?;
    Ok(())
}
