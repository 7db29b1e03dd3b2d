//! Python bindings for `varwork`.
//!
//! Models and trial states are small frozen classes; structured results come
//! back as plain dicts and lists (decoded from the same canonical JSON the
//! command line prints).

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;

use varwork::cli;
use varwork::fd;
use varwork::formulas;
use varwork::moments;
use varwork::optimize::{self, Functional, TrialFamily};
use varwork::quadrature::{self, Observable};
use varwork::report;
use varwork::ritz;
use varwork::validation::{self, SuiteCouplings};
use varwork::{Complex64, FormulaId, ModelSpec, TrialParams};

create_exception!(pyvarwork, VarworkError, PyException, "A computation in varwork failed.");

fn to_py(e: varwork::Error) -> PyErr {
    use varwork::Error as E;
    match e {
        E::InvalidModel(_) | E::InvalidParameter(_) | E::Unsupported(_) | E::FormulaMismatch { .. } => {
            PyValueError::new_err(e.to_string())
        }
        other => VarworkError::new_err(other.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = varwork::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(to_py)
}

/// Canonical JSON of `value`, decoded into Python objects.
fn to_python<T: serde::Serialize + ?Sized>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = report::to_canonical_json(value).map_err(to_py)?;
    let json = PyModule::import(py, "json")?;
    Ok(json.call_method1("loads", (text,))?.unbind())
}

/// A one-dimensional oscillator model, optionally in `d` identical modes.
#[pyclass(frozen, from_py_object, module = "pyvarwork")]
#[derive(Clone, Copy)]
struct Model {
    inner: ModelSpec,
}

#[pymethods]
impl Model {
    #[staticmethod]
    fn harmonic() -> Self {
        Model { inner: ModelSpec::harmonic() }
    }

    #[staticmethod]
    fn quartic(lam: f64) -> PyResult<Self> {
        Ok(Model { inner: ModelSpec::quartic(lam).map_err(to_py)? })
    }

    #[staticmethod]
    fn power(n: u32, lam: f64) -> PyResult<Self> {
        Ok(Model { inner: ModelSpec::power(n, lam).map_err(to_py)? })
    }

    #[staticmethod]
    fn cubic_quartic(lam: f64, mu: f64) -> PyResult<Self> {
        Ok(Model { inner: ModelSpec::cubic_quartic(lam, mu).map_err(to_py)? })
    }

    fn with_dim(&self, d: u32) -> PyResult<Self> {
        Ok(Model { inner: self.inner.with_dim(d).map_err(to_py)? })
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.inner.family().as_str()
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.inner.lambda()
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu()
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }

    #[getter]
    fn d(&self) -> u32 {
        self.inner.d()
    }

    /// Single-mode potential `V(x)`.
    fn potential(&self, x: f64) -> f64 {
        varwork::models::potential_value(&self.inner, x)
    }

    fn as_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_python(py, &self.inner)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(family='{}', lam={}, mu={}, n={}, d={})",
            self.inner.family(),
            self.inner.lambda(),
            self.inner.mu(),
            self.inner.n(),
            self.inner.d()
        )
    }
}

/// A trial state: position Gaussian or a Bargmann-space function.
#[pyclass(frozen, from_py_object, module = "pyvarwork")]
#[derive(Clone, Copy)]
struct Trial {
    inner: TrialParams,
}

#[pymethods]
impl Trial {
    /// `exp(-alpha (x - beta)^2 / 2)`
    #[staticmethod]
    #[pyo3(signature = (alpha, beta = 0.0))]
    fn gaussian(alpha: f64, beta: f64) -> Self {
        Trial { inner: TrialParams::PositionGaussian { alpha, beta } }
    }

    /// `exp(gamma z)`
    #[staticmethod]
    #[pyo3(signature = (re, im = 0.0))]
    fn coherent(re: f64, im: f64) -> Self {
        Trial { inner: TrialParams::Coherent { gamma: Complex64::new(re, im) } }
    }

    /// `exp(alpha z^2)`
    #[staticmethod]
    fn squeezed(alpha: f64) -> Self {
        Trial { inner: TrialParams::squeezed(alpha) }
    }

    /// `z^n`
    #[staticmethod]
    fn monomial(n: u32) -> Self {
        Trial { inner: TrialParams::Monomial { n } }
    }

    /// `(z - conj(gamma))^n exp(gamma z)`
    #[staticmethod]
    #[pyo3(signature = (n, re, im = 0.0))]
    fn displaced_monomial(n: u32, re: f64, im: f64) -> Self {
        Trial { inner: TrialParams::DisplacedMonomial { n, gamma: Complex64::new(re, im) } }
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.inner.family_name()
    }

    fn is_admissible(&self) -> bool {
        varwork::trial::check_admissible(&self.inner).admissible
    }

    /// `<x^k>` from closed forms where available, quadrature otherwise.
    fn moment(&self, k: u32) -> PyResult<f64> {
        moments::trial_moment(&self.inner, k).map_err(to_py)
    }

    /// Single-mode energy from first principles.
    fn energy(&self, model: Model) -> PyResult<f64> {
        moments::trial_energy(&model.inner, &self.inner).map_err(to_py)
    }

    fn as_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_python(py, &self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Trial({:?})", self.inner)
    }
}

/// Positive root of `a^3 - a - 6 lam = 0`.
#[pyfunction]
fn cardano_root(lam: f64) -> PyResult<f64> {
    optimize::cardano_root(lam).map_err(to_py)
}

/// Optimal Gaussian width for `x^(2n)` at coupling `lam`.
#[pyfunction]
fn stationary_width(n: u32, lam: f64) -> PyResult<f64> {
    optimize::stationary_width(n, lam).map_err(to_py)
}

/// Printed closed-form energy `formula` evaluated at `trial` for `model`.
#[pyfunction]
fn paper_energy(formula: &str, trial: Trial, model: Model) -> PyResult<f64> {
    let id: FormulaId = parse(formula)?;
    formulas::paper_energy(id, &trial.inner, &model.inner).map_err(to_py)
}

/// Minimize a trial family; returns a dict with the optimum and diagnostics.
#[pyfunction]
#[pyo3(signature = (model, family = "gaussian", degree = 0, printed = false, tol = 1e-10))]
fn minimize(py: Python<'_>, model: Model, family: &str, degree: u32, printed: bool, tol: f64) -> PyResult<Py<PyAny>> {
    let family: TrialFamily = parse(family)?;
    let functional = if printed { Functional::Printed } else { Functional::Moments };
    let r = py
        .detach(|| optimize::minimize_family(&model.inner, family, degree, functional, tol))
        .map_err(to_py)?;
    to_python(py, &r)
}

/// Lowest `k` levels by Fock-basis Ritz with truncation doubling.
#[pyfunction]
#[pyo3(signature = (model, k = 1, tol = 1e-10))]
fn spectrum(py: Python<'_>, model: Model, k: usize, tol: f64) -> PyResult<Vec<f64>> {
    let s = py.detach(|| ritz::converged_spectrum(&model.inner, k, tol)).map_err(to_py)?;
    Ok(s.values)
}

/// Converged single-mode ground energy.
#[pyfunction]
#[pyo3(signature = (model, tol = 1e-10))]
fn ground_energy(py: Python<'_>, model: Model, tol: f64) -> PyResult<f64> {
    py.detach(|| ritz::ground_energy(&model.inner, tol)).map_err(to_py)
}

/// Finite-difference levels on `[-half_width, half_width]`.
#[pyfunction]
#[pyo3(signature = (model, k = 1, half_width = fd::DEFAULT_HALF_WIDTH, points = fd::DEFAULT_POINTS, refine = true))]
fn fd_levels(py: Python<'_>, model: Model, k: usize, half_width: f64, points: usize, refine: bool) -> PyResult<Vec<f64>> {
    let r = py
        .detach(|| fd::fd_spectrum(&model.inner, half_width, points, k, refine))
        .map_err(to_py)?;
    Ok(r.iter().map(|x| x.energy).collect())
}

fn observable(name: &str, model: Option<Model>) -> PyResult<Observable> {
    Ok(match name.to_ascii_lowercase().as_str() {
        "number" => Observable::Number,
        "x" => Observable::X,
        "x2" => Observable::X2,
        "x3" => Observable::X3,
        "x4" => Observable::X4,
        "p2" => Observable::P2,
        "hamiltonian" => {
            let m = model.ok_or_else(|| PyValueError::new_err("the hamiltonian observable needs a model"))?;
            Observable::ModelHamiltonian(m.inner)
        }
        other => return Err(PyValueError::new_err(format!("unknown observable '{other}'"))),
    })
}

/// `<obs>` by 2D Gauss-Hermite quadrature over the complex plane.
///
/// Returns `(value, stable)`; `stable` is the order-doubling check.
#[pyfunction]
#[pyo3(signature = (obs, trial, order = quadrature::DEFAULT_ORDER, model = None))]
fn bargmann_expectation(obs: &str, trial: Trial, order: usize, model: Option<Model>) -> PyResult<(f64, bool)> {
    let o = observable(obs, model)?;
    let r = quadrature::bargmann_expectation(&o, &trial.inner, order).map_err(to_py)?;
    Ok((r.value, r.stable))
}

/// Printed formulas against oracles: list of record dicts.
#[pyfunction]
#[pyo3(signature = (lam = 0.1, mu = 0.1, order = quadrature::DEFAULT_ORDER))]
fn validate_all(py: Python<'_>, lam: f64, mu: f64, order: usize) -> PyResult<Py<PyAny>> {
    let rows = py.detach(|| validation::validate_all(SuiteCouplings { lambda: lam, mu }, order)).map_err(to_py)?;
    to_python(py, &rows)
}

/// Small-coupling series fits next to their analytic and printed values.
#[pyfunction]
#[pyo3(signature = (mu = 0.1))]
fn series_checks(py: Python<'_>, mu: f64) -> PyResult<Py<PyAny>> {
    let rows = py.detach(|| validation::series_checks(mu)).map_err(to_py)?;
    to_python(py, &rows)
}

/// Run the command line in-process: `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> (i32, String, String) {
    py.detach(|| {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let argv = std::iter::once("varwork".to_string()).chain(args);
        let code = cli::run_with_io(argv, &mut out, &mut err);
        (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&err).into_owned())
    })
}

#[pymodule]
fn pyvarwork(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("VarworkError", m.py().get_type::<VarworkError>())?;
    m.add("FORMULAS", FormulaId::ALL.iter().map(|f| f.name()).collect::<Vec<_>>())?;
    m.add("FAMILIES", TrialFamily::ALL.iter().map(|f| f.as_str()).collect::<Vec<_>>())?;
    m.add_class::<Model>()?;
    m.add_class::<Trial>()?;
    m.add_function(wrap_pyfunction!(cardano_root, m)?)?;
    m.add_function(wrap_pyfunction!(stationary_width, m)?)?;
    m.add_function(wrap_pyfunction!(paper_energy, m)?)?;
    m.add_function(wrap_pyfunction!(minimize, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(ground_energy, m)?)?;
    m.add_function(wrap_pyfunction!(fd_levels, m)?)?;
    m.add_function(wrap_pyfunction!(bargmann_expectation, m)?)?;
    m.add_function(wrap_pyfunction!(validate_all, m)?)?;
    m.add_function(wrap_pyfunction!(series_checks, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
