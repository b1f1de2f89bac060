//! Python bindings for `abvar-core`.
//!
//! Rationals come back as `fractions.Fraction`, counts as Python ints.
//! Domain errors raise `ValueError`, failed integrality checks raise
//! `ArithmeticError`.

use abvar_core::census::{self, CensusResult};
use abvar_core::genus::CmAlgebraSpec;
use abvar_core::quadratic_forms::{self, ImaginaryOrderSpec};
use abvar_core::record::{self, OutputRecord, Query};
use abvar_core::{quaternion, real_units, zeta, Error, ExactRational};
use num_bigint::BigInt;
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyList;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Cache(_) => PyValueError::new_err(e.to_string()),
        Error::Integrality(_) => PyArithmeticError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
    }
}

fn fraction<'py>(py: Python<'py>, r: &ExactRational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((r.numerator().clone(), r.denominator().clone()))
}

/// A discriminant `D = 0, 1 mod 4`.
#[pyclass(frozen, name = "Discriminant", module = "abvar")]
struct PyDiscriminant(abvar_core::Discriminant);

#[pymethods]
impl PyDiscriminant {
    #[new]
    fn new(value: i64) -> PyResult<Self> {
        abvar_core::Discriminant::new(value)
            .map(Self)
            .map_err(to_py_err)
    }

    #[getter]
    fn value(&self) -> i64 {
        self.0.value()
    }

    #[getter]
    fn is_fundamental(&self) -> bool {
        self.0.is_fundamental()
    }

    /// `(D0, f)` with `D = f^2 D0`.
    fn fundamental_part(&self) -> PyResult<(i64, u64)> {
        let (d0, f) = self.0.fundamental_part().map_err(to_py_err)?;
        Ok((d0.value(), f))
    }

    fn __repr__(&self) -> String {
        format!("Discriminant({})", self.0.value())
    }
}

/// An exact count with its derivation.
#[pyclass(frozen, name = "CensusResult", module = "abvar")]
struct PyCensusResult(CensusResult);

#[pymethods]
impl PyCensusResult {
    #[getter]
    fn count(&self) -> BigInt {
        self.0.count.clone()
    }

    #[getter]
    fn sp_count(&self) -> Option<u64> {
        self.0.sp_count
    }

    #[getter]
    fn mass<'py>(&self, py: Python<'py>) -> PyResult<Option<Bound<'py, PyAny>>> {
        self.0.mass.as_ref().map(|m| fraction(py, m)).transpose()
    }

    #[getter]
    fn breakdown<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        let items = self
            .0
            .breakdown
            .iter()
            .map(|(label, v)| Ok((label.clone(), fraction(py, v)?)))
            .collect::<PyResult<Vec<_>>>()?;
        PyList::new(py, items)
    }

    #[getter]
    fn case(&self) -> String {
        self.0.case.clone()
    }

    fn __int__(&self) -> BigInt {
        self.0.count.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "CensusResult(count={}, case={:?})",
            self.0.count, self.0.case
        )
    }
}

fn wrap(r: abvar_core::Result<CensusResult>) -> PyResult<PyCensusResult> {
    r.map(PyCensusResult).map_err(to_py_err)
}

/// `|A_π|` for `π = ±sqrt(p^a)`, `a` odd.
#[pyfunction]
fn census_sqrt_q(p: u64, a: u32) -> PyResult<PyCensusResult> {
    wrap(census::census_sqrt_q(p, a))
}

/// `|A_π|` for `π = ±sqrt(p^a)`, `a` even.
#[pyfunction]
fn census_even(p: u64, a: u32) -> PyResult<PyCensusResult> {
    wrap(census::census_even(p, a))
}

/// `|A_π|` for `π = sqrt(-p)`.
#[pyfunction]
fn census_sqrt_minus_p(p: u64) -> PyResult<PyCensusResult> {
    wrap(census::census_sqrt_minus_p(p))
}

#[pyfunction]
#[pyo3(name = "census_divisor_chain", signature = (p, d0, big_d, n, a_list))]
fn census_divisor_chain(
    p: u64,
    d0: i64,
    big_d: u64,
    n: u32,
    a_list: Vec<u32>,
) -> PyResult<PyCensusResult> {
    wrap(census::census_divisor_chain(p, d0, big_d, n, &a_list))
}

/// Class number of the discriminant, or of the order of the given conductor
/// in the field of fundamental discriminant `disc`.
#[pyfunction]
#[pyo3(signature = (disc, conductor = None))]
fn class_number(disc: i64, conductor: Option<u64>) -> PyResult<BigInt> {
    let d = abvar_core::Discriminant::new(disc).map_err(to_py_err)?;
    match conductor {
        Some(f) => {
            let spec = ImaginaryOrderSpec::new(d, f).map_err(to_py_err)?;
            quadratic_forms::class_number_order(&spec).map_err(to_py_err)
        }
        None if d.is_negative() => quadratic_forms::class_number_imaginary(&d)
            .map(BigInt::from)
            .map_err(to_py_err),
        None => quadratic_forms::class_number_real(&d)
            .map(BigInt::from)
            .map_err(to_py_err),
    }
}

#[pyfunction]
fn kronecker(a: BigInt, n: BigInt) -> PyResult<i8> {
    abvar_core::kronecker_symbol(&a, &n).map_err(to_py_err)
}

/// `ζ_F(-1)` for the real quadratic field of discriminant `disc`.
#[pyfunction]
fn zeta_minus_one<'py>(py: Python<'py>, disc: i64) -> PyResult<Bound<'py, PyAny>> {
    let d = abvar_core::Discriminant::new(disc).map_err(to_py_err)?;
    fraction(py, &zeta::zeta_minus_one(&d).map_err(to_py_err)?)
}

/// Fundamental unit `(x + y sqrt p) / denom` of `Q(sqrt p)` as `(x, y, denom, norm)`.
#[pyfunction]
fn fundamental_unit(p: u64) -> PyResult<(BigInt, BigInt, u8, i8)> {
    let u = real_units::fundamental_unit(p).map_err(to_py_err)?;
    Ok((u.x, u.y, u.denom, u.norm))
}

/// `(varpi_p, delta, beta_p)` for `p = 1 mod 4`.
#[pyfunction]
fn unit_symbols(p: u64) -> PyResult<(u8, u8, i64)> {
    let s = real_units::unit_symbols(p).map_err(to_py_err)?;
    Ok((s.varpi_p, s.delta_1_varpi, s.beta_p))
}

#[pyfunction]
fn h_maximal(p: u64) -> PyResult<u64> {
    quaternion::h_maximal(p).map_err(to_py_err)
}

#[pyfunction]
fn h_o8(p: u64) -> PyResult<u64> {
    quaternion::h_o8(p).map_err(to_py_err)
}

#[pyfunction]
fn h_o16(p: u64) -> PyResult<u64> {
    quaternion::h_o16(p).map_err(to_py_err)
}

#[pyfunction]
fn superspecial_count(p: u64) -> PyResult<u64> {
    quaternion::superspecial_count(p).map_err(to_py_err)
}

#[pyfunction]
fn mass_superspecial<'py>(py: Python<'py>, p: u64) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &quaternion::mass_superspecial(p).map_err(to_py_err)?)
}

#[pyfunction]
fn deuring_class_number(p: u64) -> PyResult<u64> {
    quaternion::deuring_class_number(p).map_err(to_py_err)
}

/// Principal genus count for a product of imaginary quadratic fields.
#[pyfunction]
fn principal_genus_count(discs: Vec<i64>) -> PyResult<u64> {
    let spec = CmAlgebraSpec::from_values(&discs).map_err(to_py_err)?;
    abvar_core::genus::principal_genus_count(&spec).map_err(to_py_err)
}

/// Evaluates a JSON query (the CLI's `query` object) and returns the JSON record.
#[pyfunction]
fn evaluate_json(query: &str) -> PyResult<String> {
    let q: Query = serde_json::from_str(query)
        .map_err(|e| PyValueError::new_err(format!("invalid query: {e}")))?;
    let rec: OutputRecord = record::evaluate(&q).map_err(to_py_err)?;
    Ok(rec.to_json().to_string())
}

/// Adds every binding to `m`.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDiscriminant>()?;
    m.add_class::<PyCensusResult>()?;
    m.add_function(wrap_pyfunction!(census_sqrt_q, m)?)?;
    m.add_function(wrap_pyfunction!(census_even, m)?)?;
    m.add_function(wrap_pyfunction!(census_sqrt_minus_p, m)?)?;
    m.add_function(wrap_pyfunction!(census_divisor_chain, m)?)?;
    m.add_function(wrap_pyfunction!(class_number, m)?)?;
    m.add_function(wrap_pyfunction!(kronecker, m)?)?;
    m.add_function(wrap_pyfunction!(zeta_minus_one, m)?)?;
    m.add_function(wrap_pyfunction!(fundamental_unit, m)?)?;
    m.add_function(wrap_pyfunction!(unit_symbols, m)?)?;
    m.add_function(wrap_pyfunction!(h_maximal, m)?)?;
    m.add_function(wrap_pyfunction!(h_o8, m)?)?;
    m.add_function(wrap_pyfunction!(h_o16, m)?)?;
    m.add_function(wrap_pyfunction!(superspecial_count, m)?)?;
    m.add_function(wrap_pyfunction!(mass_superspecial, m)?)?;
    m.add_function(wrap_pyfunction!(deuring_class_number, m)?)?;
    m.add_function(wrap_pyfunction!(principal_genus_count, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_json, m)?)?;
    Ok(())
}

#[pymodule]
fn abvar(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}
