//! Python bindings for `qss-core`.
//!
//! ```python
//! import qss
//! s = qss.AccessStructure.parse("N1=1 N2=2\nminimal: Y1 Q1\nminimal: Q1 Q2\n")
//! report = qss.Scheme.general(s).audit()
//! assert report.overall
//! ```

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyTuple;

use qss_core::access::{canonical_catalog, parse_structure, AccessError, ShareLabel, ShareSet};
use qss_core::schemes::{
    build_general, build_otp, build_t3, build_t4, build_twin, default_twin_field, in_region, parse_rate, region_of,
    Rational, RegionFamily, SchemeError,
};
use qss_core::verify::{self, SubsetRecord as CoreRecord};

create_exception!(qss, QssError, PyValueError, "Invalid input to a qss operation.");
create_exception!(qss, InfeasibleError, QssError, "The access structure admits no scheme.");

fn scheme_err(e: SchemeError) -> PyErr {
    match e {
        SchemeError::Infeasible(..) => InfeasibleError::new_err(e.to_string()),
        other => QssError::new_err(other.to_string()),
    }
}

fn access_err(e: AccessError) -> PyErr {
    QssError::new_err(e.to_string())
}

fn share_set(tokens: &[String]) -> PyResult<ShareSet> {
    tokens
        .iter()
        .map(|t| t.parse::<ShareLabel>().map_err(access_err))
        .collect()
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((*r.numer(), *r.denom()))
}

/// Monotone access structure on classical shares `Y1..Yn1` and quantum shares `Q1..Qn2`.
#[pyclass(module = "qss", name = "AccessStructure", frozen)]
struct PyAccessStructure {
    inner: qss_core::AccessStructure,
}

#[pymethods]
impl PyAccessStructure {
    /// Builds a structure from its minimal qualified sets, e.g. `[["Y1", "Q1"], ["Q1", "Q2"]]`.
    #[new]
    fn new(n1: usize, n2: usize, minimal: Vec<Vec<String>>) -> PyResult<Self> {
        let sets = minimal.iter().map(|m| share_set(m)).collect::<PyResult<Vec<_>>>()?;
        let inner = qss_core::AccessStructure::new(n1, n2, sets).map_err(access_err)?;
        Ok(Self { inner })
    }

    /// Parses the text file format (`N1=.. N2=..` header, `minimal:` lines).
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self { inner: parse_structure(text).map_err(access_err)? })
    }

    #[staticmethod]
    fn twin(k1: usize, n1: usize, k2: usize, n2: usize) -> PyResult<Self> {
        Ok(Self { inner: qss_core::AccessStructure::twin(k1, n1, k2, n2).map_err(access_err)? })
    }

    #[getter]
    fn n1(&self) -> usize {
        self.inner.num_classical()
    }

    #[getter]
    fn n2(&self) -> usize {
        self.inner.num_quantum()
    }

    fn minimal_sets(&self) -> Vec<Vec<String>> {
        self.inner.minimal_sets().iter().map(|s| s.iter().map(|l| l.to_string()).collect()).collect()
    }

    fn is_qualified(&self, shares: Vec<String>) -> PyResult<bool> {
        self.inner.is_qualified(share_set(&shares)?).map_err(access_err)
    }

    fn is_feasible(&self) -> bool {
        self.inner.check_feasible()
    }

    /// Two qualified sets whose intersection holds no quantum share, or `None`.
    fn witness(&self) -> Option<(String, String)> {
        self.inner.infeasibility_witness().map(|(a, b)| (a.to_string(), b.to_string()))
    }

    /// `(K1, K2)` when the structure is a twin threshold structure.
    fn twin_parameters(&self) -> Option<(usize, usize)> {
        self.inner.twin_parameters()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("AccessStructure({})", self.inner)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// One line of an audit report.
#[pyclass(module = "qss", name = "SubsetRecord", frozen, get_all)]
struct PySubsetRecord {
    subset: String,
    qualified: bool,
    mutual_information: f64,
    target: f64,
    passed: bool,
}

impl From<&CoreRecord> for PySubsetRecord {
    fn from(r: &CoreRecord) -> Self {
        Self {
            subset: r.subset.to_string(),
            qualified: r.qualified,
            mutual_information: r.mutual_information,
            target: r.target,
            passed: r.pass,
        }
    }
}

#[pymethods]
impl PySubsetRecord {
    fn __repr__(&self) -> String {
        format!(
            "SubsetRecord({} qualified={} I={} target={} pass={})",
            self.subset,
            self.qualified,
            verify::format_value(self.mutual_information),
            verify::format_value(self.target),
            self.passed
        )
    }
}

/// Entropic audit over every nonempty share subset.
#[pyclass(module = "qss", name = "AuditReport", frozen)]
struct PyAuditReport {
    inner: verify::AuditReport,
}

#[pymethods]
impl PyAuditReport {
    #[getter]
    fn overall(&self) -> bool {
        self.inner.overall
    }

    #[getter]
    fn reference_entropy(&self) -> f64 {
        self.inner.reference_entropy
    }

    #[getter]
    fn tolerance(&self) -> f64 {
        self.inner.tolerance
    }

    #[getter]
    fn records(&self) -> Vec<PySubsetRecord> {
        self.inner.records.iter().map(PySubsetRecord::from).collect()
    }

    fn failures(&self) -> Vec<PySubsetRecord> {
        self.inner.failures().map(PySubsetRecord::from).collect()
    }

    fn render(&self) -> String {
        self.inner.render()
    }

    fn summary(&self) -> String {
        self.inner.summary()
    }

    fn __len__(&self) -> usize {
        self.inner.records.len()
    }

    fn __bool__(&self) -> bool {
        self.inner.overall
    }
}

/// A constructed hybrid secret sharing scheme.
#[pyclass(module = "qss", name = "Scheme", frozen)]
struct PyScheme {
    inner: qss_core::Scheme,
}

#[pymethods]
impl PyScheme {
    /// Classical one-time pad on a teleported qudit.
    #[staticmethod]
    #[pyo3(signature = (q=2))]
    fn otp(q: u32) -> PyResult<Self> {
        Ok(Self { inner: build_otp(q).map_err(scheme_err)? })
    }

    /// Twin threshold scheme; `q` defaults to the smallest admissible prime.
    #[staticmethod]
    #[pyo3(signature = (k1, n1, k2, n2, q=None))]
    fn twin(k1: usize, n1: usize, k2: usize, n2: usize, q: Option<u32>) -> PyResult<Self> {
        let q = q.unwrap_or_else(|| default_twin_field(n1, k2));
        Ok(Self { inner: build_twin(k1, n1, k2, n2, q).map_err(scheme_err)? })
    }

    /// Extreme point 1 or 2 for `{{Y1,Q1},{Q1,Q2}}`.
    #[staticmethod]
    #[pyo3(signature = (extreme, q=3))]
    fn t3(extreme: u8, q: u32) -> PyResult<Self> {
        Ok(Self { inner: build_t3(extreme, q).map_err(scheme_err)? })
    }

    /// Structure 1..5 on two classical and two quantum shares, extreme point 1 or 2.
    #[staticmethod]
    fn t4(structure: u8, extreme: u8) -> PyResult<Self> {
        Ok(Self { inner: build_t4(structure, extreme).map_err(scheme_err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (structure, q=3))]
    fn general(structure: &PyAccessStructure, q: u32) -> PyResult<Self> {
        Ok(Self { inner: build_general(&structure.inner, q).map_err(scheme_err)? })
    }

    #[getter]
    fn family(&self) -> String {
        self.inner.family().to_string()
    }

    #[getter]
    fn q(&self) -> u32 {
        self.inner.q()
    }

    #[getter]
    fn structure(&self) -> PyAccessStructure {
        PyAccessStructure { inner: self.inner.structure().clone() }
    }

    #[getter]
    fn randomness(&self) -> Vec<String> {
        self.inner.randomness().to_vec()
    }

    #[getter]
    fn branch_count(&self) -> usize {
        self.inner.branch_count()
    }

    #[getter]
    fn classical_sizes(&self) -> Vec<usize> {
        self.inner.classical_sizes().to_vec()
    }

    #[getter]
    fn quantum_sizes(&self) -> Vec<usize> {
        self.inner.quantum_sizes().to_vec()
    }

    /// Share rates as `fractions.Fraction`, classical shares first.
    fn rates<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyTuple>> {
        let items = self.inner.rates().coordinates().iter().map(|r| fraction(py, r)).collect::<PyResult<Vec<_>>>()?;
        PyTuple::new(py, items)
    }

    /// Position of the achieved rates in the optimal region, or `None` if no region is known.
    fn region_membership(&self) -> PyResult<Option<String>> {
        let Some(fam) = self.inner.family().region() else {
            return Ok(None);
        };
        let m = self.inner.rates().membership(&region_of(fam)).map_err(scheme_err)?;
        Ok(Some(m.to_string()))
    }

    fn audit(&self, py: Python<'_>) -> PyResult<PyAuditReport> {
        let report = py.detach(|| verify::audit(&self.inner)).map_err(scheme_err)?;
        Ok(PyAuditReport { inner: report })
    }

    fn __repr__(&self) -> String {
        format!("Scheme({}, q={})", self.inner.family(), self.inner.q())
    }
}

fn region_family(family: &str, n1: Option<usize>, n2: Option<usize>) -> PyResult<RegionFamily> {
    match family {
        "otp" => Ok(RegionFamily::Twin { n1: 1, n2: 1 }),
        "t3" => Ok(RegionFamily::T3),
        "t4" => Ok(RegionFamily::T4),
        "twin" => match (n1, n2) {
            (Some(n1), Some(n2)) if n1 > 0 && n2 > 0 => Ok(RegionFamily::Twin { n1, n2 }),
            _ => Err(QssError::new_err("twin regions need n1 >= 1 and n2 >= 1")),
        },
        other => Err(QssError::new_err(format!("no rate region for family `{other}`"))),
    }
}

/// Inequalities of the optimal rate region, one rendered string each.
#[pyfunction]
#[pyo3(signature = (family, n1=None, n2=None))]
fn region(family: &str, n1: Option<usize>, n2: Option<usize>) -> PyResult<Vec<String>> {
    let r = region_of(region_family(family, n1, n2)?);
    Ok(r.inequalities.iter().map(|i| r.render(i)).collect())
}

/// `"in"`, `"in (boundary)"` or `"out"` for a rate tuple; entries may be ints, floats or strings like `"3/2"`.
#[pyfunction]
#[pyo3(signature = (family, rates, n1=None, n2=None))]
fn region_membership(family: &str, rates: Vec<Bound<'_, PyAny>>, n1: Option<usize>, n2: Option<usize>) -> PyResult<String> {
    let point = rates
        .iter()
        .map(|r| parse_rate(&r.str()?.to_string()).map_err(scheme_err))
        .collect::<PyResult<Vec<_>>>()?;
    let r = region_of(region_family(family, n1, n2)?);
    Ok(in_region(&r, &point).map_err(scheme_err)?.to_string())
}

/// One structure per relabelling orbit on `n1` classical and `n2` quantum shares.
#[pyfunction]
fn enumerate(n1: usize, n2: usize) -> PyResult<Vec<(PyAccessStructure, bool, bool)>> {
    if n1 + n2 == 0 || n1 + n2 > 6 {
        return Err(QssError::new_err("enumerate supports 1 <= n1 + n2 <= 6"));
    }
    Ok(canonical_catalog(n1, n2)
        .into_iter()
        .map(|e| {
            let hybrid = e.is_hybrid();
            (PyAccessStructure { inner: e.structure }, e.feasible, hybrid)
        })
        .collect())
}

#[pymodule]
pub fn qss(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("QssError", m.py().get_type::<QssError>())?;
    m.add("InfeasibleError", m.py().get_type::<InfeasibleError>())?;
    m.add_class::<PyAccessStructure>()?;
    m.add_class::<PyScheme>()?;
    m.add_class::<PyAuditReport>()?;
    m.add_class::<PySubsetRecord>()?;
    m.add_function(wrap_pyfunction!(region, m)?)?;
    m.add_function(wrap_pyfunction!(region_membership, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate, m)?)?;
    m.add("TAU", qss_core::qcore::TAU)?;
    Ok(())
}
