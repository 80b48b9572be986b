//! Python bindings. Matrices cross the boundary as lists of rows of
//! Python `complex` (plain floats are accepted on input).

use std::cell::RefCell;

use num_complex::Complex64;
use pyo3::call::PyCallArgs;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyString;

use opcalc::besov;
use opcalc::counterexample::{self, EpsilonRule, ExperimentRecord, SurrogateContext};
use opcalc::linalg::{self, DEFAULT_GROUP_TOL};
use opcalc::moi;
use opcalc::{ComplexMatrix, HermitianOperator, SchattenIndex};

type Rows = Vec<Vec<Complex64>>;

fn value_error(e: opcalc::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Row lists to a matrix; ragged or empty input is rejected.
pub fn matrix_from_rows(rows: &[Vec<Complex64>]) -> opcalc::Result<ComplexMatrix> {
    let cols = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
        return Err(opcalc::Error::EntryCount {
            expected: cols,
            actual: bad.len(),
        });
    }
    let flat: Vec<Complex64> = rows.iter().flatten().copied().collect();
    linalg::matrix_from_row_major(rows.len(), cols, &flat)
}

pub fn matrix_to_rows(m: &ComplexMatrix) -> Rows {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

fn hermitian(rows: &[Vec<Complex64>]) -> PyResult<HermitianOperator> {
    matrix_from_rows(rows)
        .and_then(HermitianOperator::from_matrix)
        .map_err(value_error)
}

/// Accepts a number or the strings `"inf"` / `"∞"`.
fn schatten_index(p: &Bound<'_, PyAny>) -> PyResult<SchattenIndex> {
    let parsed = if let Ok(s) = p.cast::<PyString>() {
        s.to_str()?.parse::<SchattenIndex>()
    } else {
        SchattenIndex::new(p.extract::<f64>()?)
    };
    parsed.map_err(value_error)
}

/// Holds the first exception raised by a Python callback so it can be
/// re-raised once the Rust computation returns.
#[derive(Default)]
struct CallbackError(RefCell<Option<PyErr>>);

impl CallbackError {
    fn call<'py>(&self, f: &Bound<'py, PyAny>, args: impl PyCallArgs<'py>) -> Complex64 {
        if self.0.borrow().is_some() {
            return Complex64::new(f64::NAN, 0.0);
        }
        match f.call1(args).and_then(|v| v.extract::<Complex64>()) {
            Ok(z) => z,
            Err(e) => {
                *self.0.borrow_mut() = Some(e);
                Complex64::new(f64::NAN, 0.0)
            }
        }
    }

    fn finish<T>(self, result: opcalc::Result<T>) -> PyResult<T> {
        match self.0.into_inner() {
            Some(e) => Err(e),
            None => result.map_err(value_error),
        }
    }
}

/// One row of a growth experiment.
#[pyclass(name = "ExperimentRecord", frozen, get_all, skip_from_py_object)]
#[derive(Debug, Clone)]
pub struct PyExperimentRecord {
    #[pyo3(name = "N")]
    pub n: usize,
    pub p: f64,
    pub lhs: f64,
    pub perturbation: f64,
    pub besov_surrogate: f64,
    pub ratio: f64,
}

impl From<ExperimentRecord> for PyExperimentRecord {
    fn from(r: ExperimentRecord) -> Self {
        Self {
            n: r.n,
            p: r.p.value(),
            lhs: r.lhs,
            perturbation: r.perturbation,
            besov_surrogate: r.besov_surrogate,
            ratio: r.ratio,
        }
    }
}

#[pymethods]
impl PyExperimentRecord {
    fn sqrt_n(&self) -> f64 {
        (self.n as f64).sqrt()
    }

    fn __repr__(&self) -> String {
        format!(
            "ExperimentRecord(N={}, p={}, lhs={}, perturbation={}, ratio={})",
            self.n, self.p, self.lhs, self.perturbation, self.ratio
        )
    }
}

/// The construction at size `N`: operators `A`, `B`, `C` and coefficients.
#[pyclass(name = "CounterexampleInstance", frozen)]
pub struct PyInstance {
    inner: counterexample::CounterexampleInstance,
}

#[pymethods]
impl PyInstance {
    #[getter(N)]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn a(&self) -> Rows {
        matrix_to_rows(self.inner.a.matrix())
    }

    #[getter]
    fn b(&self) -> Rows {
        matrix_to_rows(self.inner.b.matrix())
    }

    #[getter]
    fn c(&self) -> Rows {
        matrix_to_rows(self.inner.c.matrix())
    }

    #[getter]
    fn u(&self) -> Rows {
        matrix_to_rows(&self.inner.u)
    }

    #[getter]
    fn theta(&self) -> Rows {
        matrix_to_rows(&self.inner.theta)
    }

    fn phi(&self, x: f64, y: f64) -> Complex64 {
        moi::Symbol2::eval(self.inner.phi(), x, y)
    }

    fn f(&self, x: f64, y: f64, z: f64) -> Complex64 {
        moi::Symbol3::eval(&self.inner.f, x, y, z)
    }

    /// Grid sup of `|φ|` on `[0, 2π(N+1)]²`.
    #[pyo3(signature = (points_per_period = counterexample::DEFAULT_POINTS_PER_PERIOD))]
    fn phi_grid_sup(&self, points_per_period: usize) -> f64 {
        self.inner.phi().grid_sup(points_per_period)
    }

    /// `‖f(A, B, C) − f(A, B, 0)‖_{S_p}` and friends.
    fn growth(&self, p: &Bound<'_, PyAny>) -> PyResult<PyExperimentRecord> {
        let p = schatten_index(p)?;
        let analysis =
            counterexample::analyze_growth(&self.inner, 1.0, &SurrogateContext::default())
                .map_err(value_error)?;
        Ok(analysis.record(p).into())
    }

    fn __repr__(&self) -> String {
        format!("CounterexampleInstance(N={})", self.inner.n)
    }
}

#[pyfunction]
fn schatten_norm(m: Rows, p: &Bound<'_, PyAny>) -> PyResult<f64> {
    let m = matrix_from_rows(&m).map_err(value_error)?;
    linalg::schatten_norm(&m, schatten_index(p)?).map_err(value_error)
}

#[pyfunction]
fn singular_values(m: Rows) -> PyResult<Vec<f64>> {
    let m = matrix_from_rows(&m).map_err(value_error)?;
    linalg::singular_values(&m).map_err(value_error)
}

/// `[(eigenvalue, projection), ...]` in increasing eigenvalue order.
#[pyfunction]
#[pyo3(signature = (a, group_tol = DEFAULT_GROUP_TOL))]
fn spectral_atoms(a: Rows, group_tol: f64) -> PyResult<Vec<(f64, Rows)>> {
    let e = hermitian(&a)?
        .spectral_measure(group_tol)
        .map_err(value_error)?;
    Ok(e.atoms()
        .iter()
        .map(|atom| (atom.eigenvalue(), matrix_to_rows(&atom.projection())))
        .collect())
}

/// `f(A)` for a Python callable `f(t) -> complex`.
#[pyfunction]
fn apply_function(f: &Bound<'_, PyAny>, a: Rows) -> PyResult<Rows> {
    let a = hermitian(&a)?;
    let guard = CallbackError::default();
    let out = moi::apply_function(&|t: f64| guard.call(f, (t,)), &a);
    guard.finish(out).map(|m| matrix_to_rows(&m))
}

#[pyfunction]
fn apply_function_pair(f: &Bound<'_, PyAny>, a: Rows, b: Rows) -> PyResult<Rows> {
    let (a, b) = (hermitian(&a)?, hermitian(&b)?);
    let guard = CallbackError::default();
    let out = moi::apply_function_pair(&|x: f64, y: f64| guard.call(f, (x, y)), &a, &b);
    guard.finish(out).map(|m| matrix_to_rows(&m))
}

#[pyfunction]
fn apply_function_triple(f: &Bound<'_, PyAny>, a: Rows, b: Rows, c: Rows) -> PyResult<Rows> {
    let (a, b, c) = (hermitian(&a)?, hermitian(&b)?, hermitian(&c)?);
    let guard = CallbackError::default();
    let out = moi::apply_function_triple(
        &|x: f64, y: f64, z: f64| guard.call(f, (x, y, z)),
        &a,
        &b,
        &c,
    );
    guard.finish(out).map(|m| matrix_to_rows(&m))
}

/// `f(A) − f(B)` through the divided-difference double integral.
#[pyfunction]
fn perturbation_via_divided_difference(f: &Bound<'_, PyAny>, a: Rows, b: Rows) -> PyResult<Rows> {
    let (a, b) = (hermitian(&a)?, hermitian(&b)?);
    let guard = CallbackError::default();
    let out = moi::perturbation_via_divided_difference(&|t: f64| guard.call(f, (t,)), &a, &b);
    guard.finish(out).map(|m| matrix_to_rows(&m))
}

#[pyfunction]
fn eta(x: f64) -> f64 {
    counterexample::eta(x)
}

#[pyfunction]
fn window_w(s: f64) -> f64 {
    besov::window_w(s)
}

#[pyfunction]
fn partition_check(s: f64) -> PyResult<f64> {
    besov::partition_check(s).map_err(value_error)
}

#[pyfunction]
fn psi(t: f64) -> f64 {
    besov::psi_reference().value(t)
}

/// `tensor_bound_kappa(phi_sup, ψ)` with `ψ` sampled on `[−L, L]` at `2^m` points.
#[pyfunction]
#[pyo3(signature = (phi_sup, half_width = besov::DEFAULT_HALF_WIDTH, grid_m = besov::DEFAULT_GRID_M))]
fn tensor_bound_kappa(phi_sup: f64, half_width: f64, grid_m: u32) -> PyResult<f64> {
    let psi = besov::psi_reference()
        .sample(half_width, grid_m)
        .map_err(value_error)?;
    besov::tensor_bound_kappa(phi_sup, &psi).map_err(value_error)
}

#[pyfunction]
fn dft_unitary(n: usize) -> PyResult<Rows> {
    counterexample::dft_unitary(n)
        .map(|m| matrix_to_rows(&m))
        .map_err(value_error)
}

#[pyfunction]
fn build_instance(n: usize) -> PyResult<PyInstance> {
    counterexample::build_instance(n)
        .map(|inner| PyInstance { inner })
        .map_err(value_error)
}

#[pyfunction]
fn verify_growth(n: usize, p: &Bound<'_, PyAny>) -> PyResult<PyExperimentRecord> {
    counterexample::verify_growth(n, schatten_index(p)?)
        .map(Into::into)
        .map_err(value_error)
}

/// Growth records with `C` scaled by `ε = N^{−power}`, or by the constant
/// `epsilon` when that is given instead.
#[pyfunction]
#[pyo3(signature = (n_list, p, power = None, epsilon = None))]
fn epsilon_scaling_run(
    n_list: Vec<usize>,
    p: &Bound<'_, PyAny>,
    power: Option<f64>,
    epsilon: Option<f64>,
) -> PyResult<Vec<PyExperimentRecord>> {
    let rule = match (power, epsilon) {
        (Some(a), None) => EpsilonRule::InversePower(a),
        (None, Some(e)) => EpsilonRule::Constant(e),
        _ => return Err(PyValueError::new_err("give exactly one of power, epsilon")),
    };
    counterexample::epsilon_scaling_run(
        &n_list,
        rule,
        schatten_index(p)?,
        &SurrogateContext::default(),
    )
    .map(|v| v.into_iter().map(Into::into).collect())
    .map_err(value_error)
}

#[pymodule(name = "opcalc")]
fn opcalc_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyExperimentRecord>()?;
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(schatten_norm, m)?)?;
    m.add_function(wrap_pyfunction!(singular_values, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_atoms, m)?)?;
    m.add_function(wrap_pyfunction!(apply_function, m)?)?;
    m.add_function(wrap_pyfunction!(apply_function_pair, m)?)?;
    m.add_function(wrap_pyfunction!(apply_function_triple, m)?)?;
    m.add_function(wrap_pyfunction!(perturbation_via_divided_difference, m)?)?;
    m.add_function(wrap_pyfunction!(eta, m)?)?;
    m.add_function(wrap_pyfunction!(window_w, m)?)?;
    m.add_function(wrap_pyfunction!(partition_check, m)?)?;
    m.add_function(wrap_pyfunction!(psi, m)?)?;
    m.add_function(wrap_pyfunction!(tensor_bound_kappa, m)?)?;
    m.add_function(wrap_pyfunction!(dft_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(build_instance, m)?)?;
    m.add_function(wrap_pyfunction!(verify_growth, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon_scaling_run, m)?)?;
    Ok(())
}
