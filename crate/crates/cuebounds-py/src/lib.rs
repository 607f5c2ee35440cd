//! Python bindings. Reports come back as plain dicts decoded from the same
//! JSON the command line prints; LogReal values are {sign, log10_mag}.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use cuebounds::analysis;
use cuebounds::bounds;
use cuebounds::cli::{run_suite, SuiteParams};
use cuebounds::montecarlo;
use cuebounds::spectral;
use cuebounds::{Error, LogReal as CoreLogReal, XiVector as CoreXi};

create_exception!(cuebounds_py, ApplicabilityError, PyException, "A theorem hypothesis does not hold.");
create_exception!(cuebounds_py, ConvergenceError, PyException, "A computation did not converge.");
create_exception!(cuebounds_py, NumericalError, PyException, "A numerical routine failed.");

fn err(e: Error) -> PyErr {
    match e {
        Error::Domain(m) => PyValueError::new_err(m),
        Error::Applicability(m) => ApplicabilityError::new_err(m),
        Error::Convergence(m) => ConvergenceError::new_err(m),
        Error::Numerical(m) => NumericalError::new_err(m),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

/// ξ ∈ R^{2m}, with ζ_k = ξ_{2k−1} − iξ_{2k}.
#[pyclass(name = "XiVector", module = "cuebounds_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct XiVector {
    inner: CoreXi,
}

#[pymethods]
impl XiVector {
    #[new]
    fn new(coords: Vec<f64>) -> PyResult<Self> {
        CoreXi::new(coords).map(|inner| XiVector { inner }).map_err(err)
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn coords(&self) -> Vec<f64> {
        self.inner.coords().to_vec()
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    fn zeta(&self) -> Vec<Complex64> {
        self.inner.zeta()
    }

    fn __repr__(&self) -> String {
        format!("XiVector({:?})", self.inner.coords())
    }
}

/// A signed real stored as a log magnitude.
#[pyclass(name = "LogReal", module = "cuebounds_py", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct LogReal {
    inner: CoreLogReal,
}

#[pymethods]
impl LogReal {
    #[staticmethod]
    fn from_float(x: f64) -> Self {
        LogReal { inner: CoreLogReal::from_real(x) }
    }

    #[staticmethod]
    fn from_log10(log10_mag: f64) -> Self {
        LogReal { inner: CoreLogReal::from_log10(log10_mag) }
    }

    #[getter]
    fn sign(&self) -> &'static str {
        self.inner.sign().as_str()
    }

    #[getter]
    fn log10_mag(&self) -> f64 {
        self.inner.log10_abs()
    }

    fn __float__(&self) -> f64 {
        self.inner.to_real()
    }

    fn __mul__(&self, other: &LogReal) -> LogReal {
        LogReal { inner: self.inner * other.inner }
    }

    fn __add__(&self, other: &LogReal) -> LogReal {
        LogReal { inner: self.inner + other.inner }
    }

    fn __repr__(&self) -> String {
        format!("LogReal(sign={}, log10_mag={})", self.sign(), self.log10_mag())
    }
}

fn xi_of(coords: Vec<f64>) -> PyResult<CoreXi> {
    CoreXi::new(coords).map_err(err)
}

/// F_{n,m}(ξ) = E e^{i⟨ξ, X⟩} by the Toeplitz determinant.
#[pyfunction]
fn char_fn(xi: Vec<f64>, n: usize) -> PyResult<Complex64> {
    Ok(spectral::char_fn(&xi_of(xi)?, n).map_err(err)?.value)
}

/// (Toeplitz value, Borodin–Okounkov value, |difference|).
#[pyfunction]
fn char_fn_both(xi: Vec<f64>, n: usize) -> PyResult<(Complex64, Complex64, f64)> {
    let (t, b) = spectral::char_fn_both(&xi_of(xi)?, n).map_err(err)?;
    Ok((t.value, b.value, t.residual.unwrap_or(f64::NAN)))
}

/// (E_n[e^{⟨ξ, X⟩}], exp(A(f))) as LogReals.
#[pyfunction]
fn laplace_transform(xi: Vec<f64>, n: usize) -> PyResult<(LogReal, LogReal)> {
    let f = cuebounds::trigpoly::poly_from_xi(&xi_of(xi)?);
    let r = spectral::laplace_transform(&f, n).map_err(err)?;
    Ok((LogReal { inner: r.value }, LogReal { inner: r.bound }))
}

/// The bound chain at (n, m) as a dict.
#[pyfunction]
fn bounds_report<'py>(py: Python<'py>, n: usize, m: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &bounds::delta_chain(n, m).map_err(err)?)
}

#[pyfunction]
fn theta(py: Python<'_>, n: usize, m: usize) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &bounds::theta(n, m).map_err(err)?)
}

#[pyfunction]
fn constants(py: Python<'_>, m: usize) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &bounds::constants(m).map_err(err)?)
}

#[pyfunction]
fn table_cm(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &bounds::table_cm().map_err(err)?)
}

#[pyfunction]
fn gamma_table(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &bounds::gamma_table_certify().map_err(err)?)
}

/// Normalised traces T_k, k = 1..m, of `reps` Haar samples.
#[pyfunction]
#[pyo3(signature = (n, m, reps, seed=0))]
fn sample_traces(py: Python<'_>, n: usize, m: usize, reps: usize, seed: u64) -> PyResult<Vec<Vec<Complex64>>> {
    let s = py.detach(|| montecarlo::sample_traces(n, m, reps, seed)).map_err(err)?;
    Ok(s.into_iter().map(|t| t.traces).collect())
}

/// Δ⁽²⁾ for m = 1 with its error estimate.
#[pyfunction]
fn delta2_m1(py: Python<'_>, n: usize) -> PyResult<Bound<'_, PyAny>> {
    let q = py.detach(|| analysis::delta2_numeric_m1(n)).map_err(err)?;
    to_py(py, &q)
}

#[pyfunction]
#[pyo3(signature = (n, m, xi_samples=3, seed=0))]
fn tail_suite(py: Python<'_>, n: usize, m: usize, xi_samples: usize, seed: u64) -> PyResult<Bound<'_, PyAny>> {
    let r = py.detach(|| analysis::tail_inequality_suite(n, m, xi_samples, seed)).map_err(err)?;
    to_py(py, &r)
}

/// One verification suite by name; the dict has `passed`, `gates` and `details`.
#[pyfunction]
#[pyo3(signature = (name, seed=0, reps=None))]
fn verify<'py>(py: Python<'py>, name: &str, seed: u64, reps: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let p = SuiteParams { seed, reps, ..Default::default() };
    let o = py.detach(|| run_suite(name, &p)).map_err(err)?;
    let d = to_py(py, &o)?;
    d.cast::<PyDict>()?.set_item("seconds", o.seconds)?;
    Ok(d)
}

#[pymodule]
fn cuebounds_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<XiVector>()?;
    m.add_class::<LogReal>()?;
    m.add("ApplicabilityError", m.py().get_type::<ApplicabilityError>())?;
    m.add("ConvergenceError", m.py().get_type::<ConvergenceError>())?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_function(wrap_pyfunction!(char_fn, m)?)?;
    m.add_function(wrap_pyfunction!(char_fn_both, m)?)?;
    m.add_function(wrap_pyfunction!(laplace_transform, m)?)?;
    m.add_function(wrap_pyfunction!(bounds_report, m)?)?;
    m.add_function(wrap_pyfunction!(theta, m)?)?;
    m.add_function(wrap_pyfunction!(constants, m)?)?;
    m.add_function(wrap_pyfunction!(table_cm, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_table, m)?)?;
    m.add_function(wrap_pyfunction!(sample_traces, m)?)?;
    m.add_function(wrap_pyfunction!(delta2_m1, m)?)?;
    m.add_function(wrap_pyfunction!(tail_suite, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
