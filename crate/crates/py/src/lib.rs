//! Python bindings: `import weylbound`.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use weylbound::chern::{chern_all_bands, chern_on_sphere, DEFAULT_GRID};
use weylbound::formulas::{self, gn_hilbert_sequence, jozefiak_sequence};
use weylbound::localdim;
use weylbound::matfam::{self, build_band_family, build_diagonal_linear, build_spin_family};
use weylbound::poly::parse_rational;
use weylbound::spectral::{self, WeylOptions};
use weylbound::{Coeff, Poly, SymmetryClass};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Serializable value to plain Python objects via `json.loads`.
fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn constant(s: &str) -> PyResult<Coeff> {
    let p = Poly::parse(s).map_err(err)?;
    if !p.is_constant() {
        return Err(err(format!("expected a constant, got {s}")));
    }
    Ok(p.coeff(&[0; 5]))
}

fn rationals(v: &[String]) -> PyResult<Vec<num_rational::BigRational>> {
    v.iter().map(|s| parse_rational(s).map_err(err)).collect()
}

/// Polynomial matrix family in (x, y, z) with perturbation parameter t.
#[pyclass(name = "MatrixFamily", module = "weylbound", frozen)]
pub struct PyFamily {
    inner: matfam::MatrixFamily,
}

#[pymethods]
impl PyFamily {
    /// `rows` are entry strings such as `"x + i*y"`, `"sqrt(2)*z"`.
    #[new]
    #[pyo3(signature = (rows, class_ = "hermitian"))]
    fn new(rows: Vec<Vec<String>>, class_: &str) -> PyResult<Self> {
        let class = SymmetryClass::parse(class_).map_err(err)?;
        let inner = matfam::MatrixFamily::parse(class, &rows).map_err(err)?;
        Ok(Self { inner })
    }

    /// Spin-s family `x·Sx + y·Sy + z·Sz`, `two_s = 2s`.
    #[staticmethod]
    fn spin(two_s: u32) -> PyResult<Self> {
        Ok(Self { inner: build_spin_family(two_s).map_err(err)? })
    }

    #[staticmethod]
    fn spin1_scaled() -> Self {
        Self { inner: matfam::build_spin1_scaled() }
    }

    /// Perturbation direction 1 or 2 of the scaled spin-1 family.
    #[staticmethod]
    fn spin1_perturbation(k: u8) -> PyResult<Self> {
        match k {
            1 => Ok(Self { inner: matfam::spin1_perturbation_1() }),
            2 => Ok(Self { inner: matfam::spin1_perturbation_2() }),
            _ => Err(err(format!("no perturbation {k}"))),
        }
    }

    #[staticmethod]
    fn band(alpha: Vec<String>) -> PyResult<Self> {
        let a = rationals(&alpha)?;
        let a: [_; 3] = a.try_into().map_err(|_| err("alpha needs three values"))?;
        Ok(Self { inner: build_band_family(&a) })
    }

    /// `diag(s₁x, …, s_nx)`.
    #[staticmethod]
    fn diagonal(slopes: Vec<String>) -> PyResult<Self> {
        Ok(Self { inner: build_diagonal_linear(&rationals(&slopes)?).map_err(err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    #[getter]
    fn symmetry(&self) -> &'static str {
        self.inner.class().name()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.inner.rows_as_strings()
    }

    /// `self + t·dir`.
    fn perturb(&self, dir: &PyFamily) -> PyResult<Self> {
        Ok(Self { inner: self.inner.perturb(&dir.inner).map_err(err)? })
    }

    #[pyo3(signature = (point, t = 0.0))]
    fn evaluate(&self, point: Vec<Complex64>, t: f64) -> PyResult<Vec<Vec<Complex64>>> {
        if point.len() != self.inner.arity() {
            return Err(err(format!("point needs {} coordinates", self.inner.arity())));
        }
        let m = self.inner.numeric(t).at_complex(&point);
        Ok((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect())
    }

    fn __repr__(&self) -> String {
        format!("MatrixFamily(n={}, class={}, rows={:?})", self.inner.n(), self.inner.class().name(), self.rows())
    }
}

/// Local multiplicity of the degeneracy at the origin.
#[pyfunction]
#[pyo3(signature = (family, lambda0 = "0", cap = None))]
fn count_cwp<'py>(py: Python<'py>, family: &PyFamily, lambda0: &str, cap: Option<u32>) -> PyResult<Bound<'py, PyAny>> {
    let l0 = constant(lambda0)?;
    let res = py.detach(|| localdim::count_cwp(&family.inner, &l0, cap)).map_err(err)?;
    to_py(py, &res)
}

fn weyl_options(seed: u64, seeds: Option<usize>, expected: Option<usize>) -> WeylOptions {
    WeylOptions { seed, seeds, expected, ..Default::default() }
}

/// Real Weyl points of the family at perturbation size `t`.
#[pyfunction]
#[pyo3(signature = (family, t, box_size = 1.0, seed = 0, seeds = None, expected = None))]
fn find_real_weyl_points<'py>(
    py: Python<'py>,
    family: &PyFamily,
    t: f64,
    box_size: f64,
    seed: u64,
    seeds: Option<usize>,
    expected: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = weyl_options(seed, seeds, expected);
    let res = py.detach(|| spectral::find_real_weyl_points(&family.inner, t, box_size, &opts)).map_err(err)?;
    to_py(py, &res)
}

/// Complex Weyl points of the family at perturbation size `t`.
#[pyfunction]
#[pyo3(signature = (family, t, box_size = 1.0, seed = 0, seeds = None, expected = None))]
fn find_complex_weyl_points<'py>(
    py: Python<'py>,
    family: &PyFamily,
    t: f64,
    box_size: f64,
    seed: u64,
    seeds: Option<usize>,
    expected: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = weyl_options(seed, seeds, expected);
    let res = py.detach(|| spectral::find_complex_weyl_points(&family.inner, t, box_size, &opts)).map_err(err)?;
    to_py(py, &res)
}

/// Chern numbers on a sphere; all bands when `bands` is absent.
#[pyfunction]
#[pyo3(signature = (family, t = 0.0, center = [0.0; 3], radius = 1.0, bands = None, grid = DEFAULT_GRID))]
fn chern_numbers<'py>(
    py: Python<'py>,
    family: &PyFamily,
    t: f64,
    center: [f64; 3],
    radius: f64,
    bands: Option<Vec<usize>>,
    grid: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let num = family.inner.numeric(t);
    let res = py
        .detach(|| match &bands {
            Some(b) => chern_on_sphere(&num, center, radius, b, grid),
            None => chern_all_bands(&num, center, radius, grid),
        })
        .map_err(err)?;
    to_py(py, &res)
}

/// Closed-form count for a generic k-fold degeneracy.
#[pyfunction]
#[pyo3(signature = (k, class_ = "hermitian"))]
fn multiplicity_formula(k: u32, class_: &str) -> PyResult<u64> {
    let class = SymmetryClass::parse(class_).map_err(err)?;
    formulas::multiplicity_formula(k, class).map_err(err)
}

/// Hilbert sequence of the resolution for the class.
#[pyfunction]
#[pyo3(signature = (k, class_ = "hermitian"))]
fn hilbert_sequence(k: u32, class_: &str) -> PyResult<Vec<u64>> {
    let seq = match SymmetryClass::parse(class_).map_err(err)? {
        SymmetryClass::Symmetric => jozefiak_sequence(k),
        SymmetryClass::Hermitian | SymmetryClass::General => gn_hilbert_sequence(k),
        SymmetryClass::Diagonal => return Err(err("no resolution for the diagonal class")),
    };
    Ok(seq.map_err(err)?.dims)
}

/// `(bound, warning)` from band Chern numbers.
#[pyfunction]
fn lower_bound_from_cherns(cherns: Vec<i64>) -> (u64, Option<String>) {
    formulas::lower_bound_from_cherns(&cherns)
}

#[pyfunction]
fn parity_consistent(n_real: u64, n_complex: u64) -> bool {
    formulas::parity_consistent(n_real, n_complex)
}

#[pymodule]
#[pyo3(name = "weylbound")]
fn weylbound_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", weylbound::VERSION)?;
    m.add_class::<PyFamily>()?;
    m.add_function(wrap_pyfunction!(count_cwp, m)?)?;
    m.add_function(wrap_pyfunction!(find_real_weyl_points, m)?)?;
    m.add_function(wrap_pyfunction!(find_complex_weyl_points, m)?)?;
    m.add_function(wrap_pyfunction!(chern_numbers, m)?)?;
    m.add_function(wrap_pyfunction!(multiplicity_formula, m)?)?;
    m.add_function(wrap_pyfunction!(hilbert_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound_from_cherns, m)?)?;
    m.add_function(wrap_pyfunction!(parity_consistent, m)?)?;
    Ok(())
}
