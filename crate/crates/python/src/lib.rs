//! Python bindings for `hyperex`.

use hyperex::extension::{self, ExpProfile};
use hyperex::functionals::{self, Method, SheetCount};
use hyperex::geometry::{self, HyperboloidParams, LorentzMap, SpacetimePoint};
use hyperex::measures::{self, ConvClosedForm, MeasureSpec, SupportCase};
use hyperex::quad::QuadSpec;
use hyperex::specfun::{self, BranchedComplex};
use pyo3::exceptions::{PyOverflowError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyComplex;

fn to_py(e: hyperex::Error) -> PyErr {
    match e {
        hyperex::Error::Overflow(_) => PyOverflowError::new_err(e.to_string()),
        hyperex::Error::Budget(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn sheet_count(sheet: &str) -> PyResult<SheetCount> {
    match sheet {
        "one" => Ok(SheetCount::One),
        "two" => Ok(SheetCount::Two),
        _ => Err(PyValueError::new_err(format!("sheet must be 'one' or 'two', got '{sheet}'"))),
    }
}

fn method(name: &str) -> PyResult<Method> {
    match name {
        "closed" => Ok(Method::Closed),
        "quadrature" => Ok(Method::Quadrature),
        _ => Err(PyValueError::new_err(format!("method must be 'closed' or 'quadrature', got '{name}'"))),
    }
}

/// The hyperboloid `τ = √(s² + |y|²)` in `ℝ^{d+1}`.
#[pyclass(name = "Hyperboloid", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyHyperboloid(HyperboloidParams);

#[pymethods]
impl PyHyperboloid {
    #[new]
    #[pyo3(signature = (d, s = 1.0))]
    fn new(d: usize, s: f64) -> PyResult<Self> {
        HyperboloidParams::new(d, s).map(PyHyperboloid).map_err(to_py)
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    #[getter]
    fn s(&self) -> f64 {
        self.0.s()
    }

    fn psi(&self, y: Vec<f64>) -> f64 {
        self.0.psi_vec(&y)
    }

    /// `(y, ψ_s(y))` as `(xi, tau)`.
    fn lift(&self, y: Vec<f64>) -> (Vec<f64>, f64) {
        let p = self.0.lift(&y);
        (p.xi, p.tau)
    }

    fn ds_metric(&self, x: Vec<f64>, y: Vec<f64>) -> f64 {
        geometry::ds_metric(&self.0, &x, &y)
    }

    fn __repr__(&self) -> String {
        format!("Hyperboloid(d={}, s={})", self.0.d(), self.0.s())
    }
}

/// An element of the Lorentz group acting on `(ξ₁, …, ξ_d, τ)`.
#[pyclass(name = "LorentzMap", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyLorentzMap(LorentzMap);

#[pymethods]
impl PyLorentzMap {
    #[new]
    fn new(d: usize, rows: Vec<Vec<f64>>) -> PyResult<Self> {
        LorentzMap::from_matrix(d, &rows).map(PyLorentzMap).map_err(to_py)
    }

    #[staticmethod]
    fn identity(d: usize) -> Self {
        PyLorentzMap(LorentzMap::identity(d))
    }

    #[staticmethod]
    fn boost(t: f64, d: usize) -> PyResult<Self> {
        LorentzMap::boost(t, d).map(PyLorentzMap).map_err(to_py)
    }

    #[staticmethod]
    fn rotation(a: Vec<Vec<f64>>) -> PyResult<Self> {
        LorentzMap::rotation_embed(&a).map(PyLorentzMap).map_err(to_py)
    }

    #[staticmethod]
    fn swap(i: usize, j: usize, d: usize) -> PyResult<Self> {
        LorentzMap::coord_swap(i, j, d).map(PyLorentzMap).map_err(to_py)
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.dim()
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        self.0.rows()
    }

    fn apply(&self, xi: Vec<f64>, tau: f64) -> (Vec<f64>, f64) {
        let p = self.0.apply(&SpacetimePoint::new(xi, tau));
        (p.xi, p.tau)
    }

    /// `self ∘ other`.
    fn compose(&self, other: &PyLorentzMap) -> Self {
        PyLorentzMap(self.0.compose(&other.0))
    }

    fn inverse(&self) -> Self {
        PyLorentzMap(self.0.inverse())
    }

    fn form_defect(&self) -> f64 {
        self.0.form_defect()
    }
}

/// Returns `(L, m)` with `L(ξ, τ) = (0, m)`.
#[pyfunction]
fn normal_form(xi: Vec<f64>, tau: f64) -> PyResult<(PyLorentzMap, f64)> {
    let (l, m) = geometry::normal_form(&SpacetimePoint::new(xi, tau)).map_err(to_py)?;
    Ok((PyLorentzMap(l), m))
}

#[pyfunction]
#[pyo3(signature = (z))]
fn principal_sqrt<'py>(py: Python<'py>, z: &Bound<'py, PyComplex>) -> PyResult<Bound<'py, PyComplex>> {
    let w = specfun::principal_sqrt(BranchedComplex::new(z.real(), z.imag())).map_err(to_py)?;
    Ok(PyComplex::from_doubles(py, w.re, w.im))
}

#[pyfunction]
fn exp_integral_ei(x: f64) -> PyResult<f64> {
    specfun::exp_integral_ei(x).map_err(to_py)
}

#[pyfunction]
fn bessel_j0(x: f64) -> f64 {
    specfun::bessel_j0(x)
}

/// `σ_s^{(∗n)}(ξ, τ)` in closed form.
#[pyfunction]
#[pyo3(signature = (d, n, xi, tau, s = 1.0))]
fn conv_closed(d: usize, n: usize, xi: Vec<f64>, tau: f64, s: f64) -> PyResult<f64> {
    let form = ConvClosedForm::new(d, n, s).map_err(to_py)?;
    Ok(form.eval(&SpacetimePoint::new(xi, tau)))
}

/// `(value, attained)` with `attained` either `"support-boundary"` or `"infinity"`.
#[pyfunction]
#[pyo3(signature = (d, n, s = 1.0))]
fn conv_sup_norm(d: usize, n: usize, s: f64) -> PyResult<(f64, String)> {
    let sup = ConvClosedForm::new(d, n, s).map_err(to_py)?.sup_norm();
    Ok((sup.value, sup.attained.to_string()))
}

/// `(value, error)` of the quadrature oracle for `σ_s ∗ σ_s(ξ, τ)`.
#[pyfunction]
#[pyo3(signature = (d, xi, tau, s = 1.0))]
fn conv_point_oracle(d: usize, xi: Vec<f64>, tau: f64, s: f64) -> PyResult<(f64, f64)> {
    let spec = MeasureSpec::upper(HyperboloidParams::new(d, s).map_err(to_py)?);
    let o =
        measures::conv_point_oracle(&spec, 2, &SpacetimePoint::new(xi, tau), &QuadSpec::default()).map_err(to_py)?;
    Ok((o.value, o.error))
}

/// Number of sampled sums outside the region asserted for `case`, e.g. `"++-"`.
#[pyfunction]
#[pyo3(signature = (d, case, samples, seed = 0, s = 1.0))]
fn support_violations(d: usize, case: &str, samples: usize, seed: u64, s: f64) -> PyResult<usize> {
    let params = HyperboloidParams::new(d, s).map_err(to_py)?;
    let case: SupportCase = case.parse().map_err(to_py)?;
    Ok(measures::sum_support_predicates(&params, case, samples, seed))
}

/// `T_s f_a(x, t)` for d = 2 as a Python complex.
#[pyfunction]
#[pyo3(signature = (a, x, t, s = 1.0))]
fn extension_closed<'py>(py: Python<'py>, a: f64, x: Vec<f64>, t: f64, s: f64) -> PyResult<Bound<'py, PyComplex>> {
    let profile = ExpProfile::new(a, HyperboloidParams::new(2, s).map_err(to_py)?).map_err(to_py)?;
    let v = extension::extension_closed(&profile, &x, t).map_err(to_py)?;
    Ok(PyComplex::from_doubles(py, v.re, v.im))
}

/// `‖(f_aσ_s)^{(∗k)}‖²₂` by quadrature, as `(value, error)`.
#[pyfunction]
#[pyo3(signature = (d, a, k, s = 1.0))]
fn conv_power_l2_sq(d: usize, a: f64, k: usize, s: f64) -> PyResult<(f64, f64)> {
    let profile = ExpProfile::new(a, HyperboloidParams::new(d, s).map_err(to_py)?).map_err(to_py)?;
    let e = extension::conv_power_l2_sq(&profile, k, &QuadSpec::default()).map_err(to_py)?;
    Ok((e.value, e.error))
}

/// `(value, symbolic)` for the sharp constant.
#[pyfunction]
#[pyo3(signature = (d, p, s = 1.0, sheet = "one"))]
fn best_constant(d: usize, p: u32, s: f64, sheet: &str) -> PyResult<(f64, String)> {
    let c = functionals::best_constant(d, p, s, sheet_count(sheet)?).map_err(to_py)?;
    Ok((c.value, c.symbolic))
}

type ConstantRow = (usize, u32, String, f64, String);

/// Rows `(d, p, sheet, value, symbolic)` of the constants table.
#[pyfunction]
#[pyo3(signature = (s = 1.0))]
fn constants_table(s: f64) -> PyResult<Vec<ConstantRow>> {
    let rows = functionals::constants_table(s).map_err(to_py)?;
    Ok(rows.into_iter().map(|c| (c.d, c.p, c.sheet.to_string(), c.value, c.symbolic)).collect())
}

/// `(Q_{d,p}(a, s), error)`.
#[pyfunction]
#[pyo3(signature = (d, p, a, s = 1.0, method = "closed"))]
fn q_value(d: usize, p: u32, a: f64, s: f64, method: &str) -> PyResult<(f64, f64)> {
    let pt = functionals::q_point(d, p, a, s, self::method(method)?, &QuadSpec::default()).map_err(to_py)?;
    Ok((pt.q_value, pt.error))
}

#[pyfunction]
#[pyo3(signature = (d, a, radius, s = 1.0))]
fn mass_fraction(d: usize, a: f64, radius: f64, s: f64) -> PyResult<f64> {
    functionals::mass_fraction(d, s, a, radius).map_err(to_py)
}

/// `(violations, equality_mismatches)` of the two-sheet combiner inequality.
#[pyfunction]
#[pyo3(signature = (samples, seed = 0))]
fn combiner_check(samples: usize, seed: u64) -> (usize, usize) {
    let r = functionals::two_sheeted_combiner_check(samples, seed);
    (r.violations, r.equality_mismatches)
}

#[pymodule]
#[pyo3(name = "hyperex")]
fn hyperex_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHyperboloid>()?;
    m.add_class::<PyLorentzMap>()?;
    m.add_function(wrap_pyfunction!(normal_form, m)?)?;
    m.add_function(wrap_pyfunction!(principal_sqrt, m)?)?;
    m.add_function(wrap_pyfunction!(exp_integral_ei, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_j0, m)?)?;
    m.add_function(wrap_pyfunction!(conv_closed, m)?)?;
    m.add_function(wrap_pyfunction!(conv_sup_norm, m)?)?;
    m.add_function(wrap_pyfunction!(conv_point_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(support_violations, m)?)?;
    m.add_function(wrap_pyfunction!(extension_closed, m)?)?;
    m.add_function(wrap_pyfunction!(conv_power_l2_sq, m)?)?;
    m.add_function(wrap_pyfunction!(best_constant, m)?)?;
    m.add_function(wrap_pyfunction!(constants_table, m)?)?;
    m.add_function(wrap_pyfunction!(q_value, m)?)?;
    m.add_function(wrap_pyfunction!(mass_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(combiner_check, m)?)?;
    Ok(())
}
