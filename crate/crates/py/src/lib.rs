//! Python bindings: a thin veneer over the solver toolkit for notebook use.
//! Problems are built with `Problem.on_interval / on_rectangle / on_ball`,
//! solved with `solve` (box domains) or `solve_radial` (balls), and priced
//! with `simulate`; module-level helpers expose the Hamiltonian formulas and
//! the expression evaluator. Results come back as plain dicts and lists.

// The #[pyfunction]/#[pymethods] macros insert `.into()` conversions that
// clippy flags as useless when the types already match; not our code.
#![allow(clippy::useless_conversion)]

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyAny, PyDict};

use hjb_core::{
    expr, grid_for_domain, iterate, simulate_cost, solve_radial, DomainSpec, IterateOptions,
    MCReport, Policy, Problem as CoreProblem, Solved, SourceFn,
};

fn to_py(e: hjb_core::Error) -> PyErr {
    use hjb_core::Error::*;
    match &e {
        Config(_) | Parse { .. } | Eval(_) | Shape(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// "manufactured", a constant, or an expression in x1..xN and r.
fn source_from(h: &Bound<'_, PyAny>, n_vars: usize) -> PyResult<SourceFn> {
    if let Ok(c) = h.extract::<f64>() {
        return Ok(SourceFn::Constant(c));
    }
    let s: String = h.extract().map_err(|_| {
        PyValueError::new_err("h must be a number or a string (\"manufactured\" or an expression)")
    })?;
    if s == "manufactured" {
        return Ok(SourceFn::ManufacturedRadial);
    }
    Ok(SourceFn::Expr(expr::parse(&s, n_vars).map_err(to_py)?))
}

#[pyclass(frozen)]
struct Problem {
    inner: CoreProblem,
}

impl Problem {
    fn build(alpha: f64, sigma: f64, g: f64, h: &Bound<'_, PyAny>, domain: DomainSpec) -> PyResult<Problem> {
        let h = source_from(h, domain.ndim())?;
        Ok(Problem {
            inner: CoreProblem::new(alpha, sigma, domain, h, g).map_err(to_py)?,
        })
    }

    fn default_nodes(&self) -> Vec<usize> {
        match &self.inner.domain {
            DomainSpec::Interval { .. } => vec![401],
            DomainSpec::Rectangle { lo, .. } => vec![65; lo.len()],
            DomainSpec::Ball { .. } => vec![201],
        }
    }

    fn options(eps: Option<f64>) -> IterateOptions {
        IterateOptions {
            eps: eps.unwrap_or(1e-8),
            ..IterateOptions::default()
        }
    }

    fn solved(&self, nodes: &[usize], eps: Option<f64>) -> PyResult<Solved> {
        let opts = Self::options(eps);
        if matches!(self.inner.domain, DomainSpec::Ball { .. }) {
            let sol = solve_radial(&self.inner, nodes[0], &opts).map_err(to_py)?;
            Solved::from_radial(sol).map_err(to_py)
        } else {
            let grid = grid_for_domain(&self.inner.domain, nodes).map_err(to_py)?;
            let report = iterate(&self.inner, &grid, &opts).map_err(to_py)?;
            Solved::from_iteration(&report).map_err(to_py)
        }
    }
}

fn report_dict<'py>(py: Python<'py>, r: &MCReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new_bound(py);
    d.set_item("mean_cost", r.mean_cost)?;
    d.set_item("std_error", r.std_error)?;
    d.set_item("n_paths", r.n_paths)?;
    d.set_item("dt", r.dt)?;
    d.set_item("mean_exit_time", r.mean_exit_time)?;
    d.set_item("max_exit_time", r.max_exit_time)?;
    d.set_item("seed", r.seed)?;
    d.set_item("capped_paths", r.capped_paths)?;
    d.set_item("valid", r.is_valid())?;
    Ok(d)
}

#[pymethods]
impl Problem {
    #[staticmethod]
    #[pyo3(signature = (alpha, sigma, g, h, a, b))]
    fn on_interval(
        alpha: f64,
        sigma: f64,
        g: f64,
        h: &Bound<'_, PyAny>,
        a: f64,
        b: f64,
    ) -> PyResult<Problem> {
        Self::build(alpha, sigma, g, h, DomainSpec::Interval { a, b })
    }

    #[staticmethod]
    #[pyo3(signature = (alpha, sigma, g, h, lo, hi))]
    fn on_rectangle(
        alpha: f64,
        sigma: f64,
        g: f64,
        h: &Bound<'_, PyAny>,
        lo: Vec<f64>,
        hi: Vec<f64>,
    ) -> PyResult<Problem> {
        Self::build(alpha, sigma, g, h, DomainSpec::Rectangle { lo, hi })
    }

    #[staticmethod]
    #[pyo3(signature = (alpha, sigma, g, h, center, radius))]
    fn on_ball(
        alpha: f64,
        sigma: f64,
        g: f64,
        h: &Bound<'_, PyAny>,
        center: Vec<f64>,
        radius: f64,
    ) -> PyResult<Problem> {
        Self::build(alpha, sigma, g, h, DomainSpec::Ball { center, radius })
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma
    }

    #[getter]
    fn g(&self) -> f64 {
        self.inner.g
    }

    #[getter]
    fn p(&self) -> f64 {
        self.inner.p()
    }

    #[getter]
    fn c_alpha(&self) -> f64 {
        self.inner.c_alpha()
    }

    /// Monotone-iteration solve on a box domain. Returns a dict with the
    /// trajectory diagnostics and the nodal values in row-major order.
    #[pyo3(signature = (nodes, eps=None))]
    fn solve<'py>(
        &self,
        py: Python<'py>,
        nodes: Vec<usize>,
        eps: Option<f64>,
    ) -> PyResult<Bound<'py, PyDict>> {
        if matches!(self.inner.domain, DomainSpec::Ball { .. }) {
            return Err(PyValueError::new_err(
                "solve works on intervals and rectangles; use solve_radial for balls",
            ));
        }
        let grid = grid_for_domain(&self.inner.domain, &nodes).map_err(to_py)?;
        let report = iterate(&self.inner, &grid, &Self::options(eps)).map_err(to_py)?;
        let d = PyDict::new_bound(py);
        d.set_item("steps", report.steps)?;
        d.set_item("converged", report.converged)?;
        d.set_item(
            "final_sup_diff",
            report.per_step.last().map_or(0.0, |s| s.sup_diff),
        )?;
        d.set_item(
            "max_residual",
            report.per_step.last().map_or(0.0, |s| s.max_residual),
        )?;
        d.set_item("tol_mono", report.tol_mono)?;
        d.set_item("max_ascent", report.max_ascent)?;
        d.set_item("dims", grid.dims().to_vec())?;
        d.set_item("spacing", grid.spacing().to_vec())?;
        d.set_item("origin", grid.origin().to_vec())?;
        d.set_item("values", report.v.values().to_vec())?;
        Ok(d)
    }

    /// Radial solve on a ball; returns the profile arrays and diagnostics.
    #[pyo3(signature = (nodes, eps=None))]
    fn solve_radial<'py>(
        &self,
        py: Python<'py>,
        nodes: usize,
        eps: Option<f64>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let sol = solve_radial(&self.inner, nodes, &Self::options(eps)).map_err(to_py)?;
        let d = PyDict::new_bound(py);
        d.set_item("steps", sol.report.steps)?;
        d.set_item("converged", sol.report.converged)?;
        d.set_item("origin_slope", sol.origin_slope)?;
        d.set_item("r", sol.r.clone())?;
        d.set_item("u", sol.u.clone())?;
        Ok(d)
    }

    /// Monte Carlo pricing of a policy. `policy` is "zero", "optimal",
    /// a list of floats (constant drift), or a list of expression strings
    /// (one per axis). "optimal" solves first on `nodes` (defaults per
    /// domain kind) and also reports the PDE value and the gap.
    #[pyo3(signature = (policy, x0=None, dt=1e-3, n_paths=1000, seed=0, nodes=None, eps=None))]
    #[allow(clippy::too_many_arguments)]
    fn simulate<'py>(
        &self,
        py: Python<'py>,
        policy: &Bound<'py, PyAny>,
        x0: Option<Vec<f64>>,
        dt: f64,
        n_paths: usize,
        seed: u64,
        nodes: Option<Vec<usize>>,
        eps: Option<f64>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let x0 = x0.unwrap_or_else(|| self.inner.domain.center());
        let n = self.inner.domain.ndim();

        let mut solved_value: Option<f64> = None;
        let policy = if let Ok(name) = policy.extract::<String>() {
            match name.as_str() {
                "zero" => Policy::Zero,
                "optimal" => {
                    let nodes = nodes.unwrap_or_else(|| self.default_nodes());
                    let solved = self.solved(&nodes, eps)?;
                    solved_value = Some(solved.value_at(&x0).map_err(to_py)?);
                    Policy::Optimal(solved)
                }
                other => {
                    return Err(PyValueError::new_err(format!(
                        "unknown policy {other:?}; expected \"zero\", \"optimal\", \
                         a list of floats, or a list of expressions"
                    )))
                }
            }
        } else if let Ok(drift) = policy.extract::<Vec<f64>>() {
            Policy::ConstantDrift(drift)
        } else if let Ok(exprs) = policy.extract::<Vec<String>>() {
            let parsed = exprs
                .iter()
                .map(|s| expr::parse(s, n))
                .collect::<hjb_core::Result<Vec<_>>>()
                .map_err(to_py)?;
            Policy::Custom(parsed)
        } else {
            return Err(PyValueError::new_err(
                "policy must be a string, a list of floats, or a list of expressions",
            ));
        };

        let report = simulate_cost(&self.inner, &policy, &x0, dt, n_paths, seed).map_err(to_py)?;
        let d = report_dict(py, &report)?;
        if let Some(v) = solved_value {
            d.set_item("value_at_x0", v)?;
            d.set_item("gap", report.mean_cost - v)?;
        }
        Ok(d)
    }
}

/// p = α/(α−1) for α ∈ (1, 2].
#[pyfunction]
fn conjugate_exponent(alpha: f64) -> PyResult<f64> {
    hjb_core::conjugate_exponent(alpha).map_err(to_py)
}

/// C_α = (α−1)/α^p ∈ (0, 1/4].
#[pyfunction]
fn cost_constant(alpha: f64) -> PyResult<f64> {
    hjb_core::cost_constant(alpha).map_err(to_py)
}

/// inf over v of ξ·v + |v|^α = −C_α|ξ|^p.
#[pyfunction]
fn hamiltonian_min(xi: Vec<f64>, alpha: f64) -> PyResult<f64> {
    hjb_core::hamiltonian_min(&xi, alpha).map_err(to_py)
}

/// The minimizing control, antiparallel to ξ.
#[pyfunction]
fn optimal_control(xi: Vec<f64>, alpha: f64) -> PyResult<Vec<f64>> {
    hjb_core::optimal_control(&xi, alpha).map_err(to_py)
}

/// Evaluate an expression at x; r is the distance to `center` (origin by
/// default).
#[pyfunction]
#[pyo3(signature = (src, x, center=None))]
fn eval_expr(src: &str, x: Vec<f64>, center: Option<Vec<f64>>) -> PyResult<f64> {
    let e = expr::parse(src, x.len()).map_err(to_py)?;
    let center = center.unwrap_or_else(|| vec![0.0; x.len()]);
    if center.len() != x.len() {
        return Err(PyValueError::new_err("x and center must share a length"));
    }
    expr::eval(&e, &x, &center).map_err(to_py)
}

#[pymodule]
fn hjb_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Problem>()?;
    m.add_function(wrap_pyfunction!(conjugate_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(cost_constant, m)?)?;
    m.add_function(wrap_pyfunction!(hamiltonian_min, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_control, m)?)?;
    m.add_function(wrap_pyfunction!(eval_expr, m)?)?;
    Ok(())
}
