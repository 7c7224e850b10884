use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use canetoad::action::{self, ActionOptions, Endpoints};
use canetoad::config::RunConfig;
use canetoad::geometry::Metric as CoreMetric;
use canetoad::{fronts, pde, spectral, Error, PhiProfile};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Domain(_)
        | Error::EtaUndefined
        | Error::Config(_)
        | Error::Parse(_)
        | Error::InvalidNormalization(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// A trade-off function `m` with its trait lower bound.
#[pyclass(name = "TradeoffSpec", frozen, from_py_object)]
#[derive(Clone)]
struct PyTradeoff {
    inner: canetoad::TradeoffSpec,
}

#[pymethods]
impl PyTradeoff {
    #[staticmethod]
    fn power_law(c: f64, p: f64, theta_min: f64) -> PyResult<Self> {
        canetoad::TradeoffSpec::power_law(c, p, theta_min)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    fn log_power(c: f64, p: f64, theta_min: f64) -> PyResult<Self> {
        canetoad::TradeoffSpec::log_power(c, p, theta_min)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    fn linear(mu: f64, theta_min: f64) -> PyResult<Self> {
        canetoad::TradeoffSpec::linear_plus(mu, None, theta_min)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    fn zero(theta_min: f64) -> PyResult<Self> {
        canetoad::TradeoffSpec::zero(theta_min)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    fn tabulated(knots: Vec<(f64, f64)>, theta_min: f64) -> PyResult<Self> {
        canetoad::TradeoffSpec::tabulated(knots, theta_min)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[getter]
    fn theta_min(&self) -> f64 {
        self.inner.theta_min()
    }

    fn m(&self, theta: f64) -> PyResult<f64> {
        self.inner.eval_m(theta).map_err(to_py)
    }

    fn phi(&self, theta: f64) -> PyResult<f64> {
        PhiProfile::new(self.inner.clone()).eval_phi(theta).map_err(to_py)
    }

    fn eta(&self, a: f64, t: f64) -> PyResult<f64> {
        PhiProfile::new(self.inner.clone()).eta(a, t).map_err(to_py)
    }

    /// `extinction`, `linear` or `accelerating` for a given `γ∞`.
    fn regime(&self, gamma_inf: f64) -> String {
        canetoad::classify_regime(&self.inner, gamma_inf).to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "TradeoffSpec({:?}, theta_min={})",
            self.inner.kind(),
            self.inner.theta_min()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (spec, tol=1e-6))]
fn gamma_infinity(py: Python<'_>, spec: &PyTradeoff, tol: f64) -> PyResult<f64> {
    let spec = spec.inner.clone();
    py.detach(|| spectral::gamma_infinity(&spec, tol)).map_err(to_py)
}

/// Principal eigenvalue and `Q` (sup-normalized) on `[θ̲, θ̲ + b]`.
#[pyfunction]
fn ground_state(py: Python<'_>, spec: &PyTradeoff, b: f64, n: usize) -> PyResult<(f64, Vec<f64>, Vec<f64>)> {
    let spec = spec.inner.clone();
    let pair = py
        .detach(|| spectral::ground_state_q(&spec, b, n, spectral::Normalization::SupOne))
        .map_err(to_py)?;
    Ok((pair.eigenvalue, pair.grid, pair.eigenfunction))
}

#[pyfunction]
fn dispersion_speed(spec: &PyTradeoff, lam: f64, b: f64, n: usize) -> PyResult<f64> {
    spectral::dispersion_c_lambda(&spec.inner, lam, b, n).map_err(to_py)
}

/// `(c*, λ*)` of the truncated dispersion relation.
#[pyfunction]
fn minimal_speed(py: Python<'_>, spec: &PyTradeoff, b: f64, n: usize) -> PyResult<(f64, f64)> {
    let spec = spec.inner.clone();
    let curve = py.detach(|| spectral::minimal_speed(&spec, b, n)).map_err(to_py)?;
    Ok((curve.c_star, curve.lambda_star))
}

/// Minimal action from `(0, θ̲)` to `(x, theta)` in time `t`.
#[pyfunction]
#[pyo3(signature = (spec, t, x, theta, nodes=200))]
fn minimize_action<'py>(
    py: Python<'py>,
    spec: &PyTradeoff,
    t: f64,
    x: f64,
    theta: f64,
    nodes: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = spec.inner.clone();
    let opts = ActionOptions {
        nodes,
        ..ActionOptions::default()
    };
    let sol = py
        .detach(|| action::minimize_action(&spec, &Endpoints::from_origin(&spec, t, x, theta), &opts))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("zeta", sol.zeta)?;
    d.set_item("first_integral_spread", sol.best.first_integral_spread())?;
    d.set_item("times", sol.best.times)?;
    d.set_item("z1", sol.best.z1)?;
    d.set_item("z2", sol.best.z2)?;
    Ok(d)
}

#[pyclass(name = "Metric", frozen)]
struct PyMetric {
    inner: CoreMetric,
}

#[pymethods]
impl PyMetric {
    #[new]
    fn new(theta_min: f64) -> PyResult<Self> {
        CoreMetric::new(theta_min).map(|inner| Self { inner }).map_err(to_py)
    }

    /// `Γ[c][a][b]`.
    fn christoffel(&self, theta: f64) -> PyResult<[[[f64; 2]; 2]; 2]> {
        self.inner.christoffel(theta).map(|c| c.symbols).map_err(to_py)
    }

    fn scalar_curvature(&self, theta: f64) -> PyResult<f64> {
        self.inner.scalar_curvature(theta).map_err(to_py)
    }

    #[pyo3(signature = (p, q, segments=200))]
    fn distance(&self, p: (f64, f64), q: (f64, f64), segments: usize) -> PyResult<f64> {
        self.inner
            .geodesic_distance(p, q, segments)
            .map(|g| g.distance)
            .map_err(to_py)
    }
}

/// A parsed TOML run configuration.
#[pyclass(name = "RunConfig", frozen)]
struct PyRunConfig {
    inner: RunConfig,
}

#[pymethods]
impl PyRunConfig {
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        RunConfig::parse(text).map(|inner| Self { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        RunConfig::load(&path).map(|inner| Self { inner }).map_err(to_py)
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    fn hash(&self) -> String {
        self.inner.hash()
    }

    fn tradeoff(&self) -> PyResult<PyTradeoff> {
        self.inner
            .tradeoff_spec()
            .map(|inner| PyTradeoff { inner })
            .map_err(to_py)
    }

    /// Runs the simulation; returns front traces and bound monitors.
    fn simulate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let cfg = self.inner.sim_config().map_err(to_py)?;
        let out = py.detach(|| pde::run(&cfg)).map_err(to_py)?;
        let window = self.inner.fit_window();
        let d = PyDict::new(py);
        d.set_item("times", out.fronts.times.clone())?;
        d.set_item("x_front", out.fronts.x_front.clone())?;
        d.set_item("theta_front", out.fronts.theta_front.clone())?;
        d.set_item("sup_n", out.monitors.iter().map(|m| m.sup_n).collect::<Vec<_>>())?;
        d.set_item("sup_rho", out.monitors.iter().map(|m| m.sup_rho).collect::<Vec<_>>())?;
        d.set_item("valid", out.invalid_after.is_none())?;
        d.set_item("speed", fronts::fit_speed(&out.fronts, window).ok().map(|f| f.value))?;
        d.set_item(
            "exponent",
            fronts::fit_exponent(&out.fronts, window).ok().map(|f| f.value),
        )?;
        d.set_item(
            "trait_exponent",
            fronts::fit_trait_exponent(&out.fronts, window).ok().map(|f| f.value),
        )?;
        Ok(d)
    }
}

#[pymodule]
fn canetoad_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyTradeoff>()?;
    m.add_class::<PyMetric>()?;
    m.add_class::<PyRunConfig>()?;
    m.add_function(wrap_pyfunction!(gamma_infinity, m)?)?;
    m.add_function(wrap_pyfunction!(ground_state, m)?)?;
    m.add_function(wrap_pyfunction!(dispersion_speed, m)?)?;
    m.add_function(wrap_pyfunction!(minimal_speed, m)?)?;
    m.add_function(wrap_pyfunction!(minimize_action, m)?)?;
    Ok(())
}
