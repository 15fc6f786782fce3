//! Python bindings. Structured results (verdicts, reports, certificates)
//! come back as plain dicts with the same fields as the CLI's JSON output.

use std::time::Duration;

use blockset::algebra::{Field, Mat};
use blockset::blocking::{self, PointKind};
use blockset::codes::{self, TrifferenceMode};
use blockset::constructions::{self, IntegrityMode, Strategy};
use blockset::{bounds, exact, geometry, io};
use num_bigint::BigUint;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use serde::Serialize;

create_exception!(blockset, BlocksetError, PyException);

fn py_err(e: blockset::Error) -> PyErr {
    BlocksetError::new_err(e.to_string())
}

/// Converts a serializable value to Python objects through JSON.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| BlocksetError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn field(q: u32) -> PyResult<Field> {
    Field::new(q).map_err(py_err)
}

/// A set of points in F_q^k (affine) or PG(k−1, q) (projective).
#[pyclass(name = "PointSet", module = "blockset", frozen)]
struct PyPointSet {
    inner: blocking::PointSet,
}

#[pymethods]
impl PyPointSet {
    #[new]
    #[pyo3(signature = (q, k, points, kind = "affine"))]
    fn new(q: u32, k: usize, points: Vec<Vec<u8>>, kind: &str) -> PyResult<Self> {
        let kind: PointKind = kind.parse().map_err(py_err)?;
        let inner = blocking::PointSet::new(&field(q)?, k, kind, points).map_err(py_err)?;
        Ok(PyPointSet { inner })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyPointSet { inner: io::parse_points(text).map_err(py_err)? })
    }

    fn dumps(&self) -> String {
        io::write_points(&self.inner)
    }

    #[getter]
    fn q(&self) -> u32 {
        self.inner.field().q()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn kind(&self) -> String {
        self.inner.kind().to_string()
    }

    #[getter]
    fn points(&self) -> Vec<Vec<u8>> {
        self.inner.points().to_vec()
    }

    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, p: Vec<u8>) -> bool {
        self.inner.contains(&p)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("PointSet(q={}, k={}, kind={}, len={})", self.q(), self.k(), self.kind(), self.inner.len())
    }

    /// Whether the set meets every affine subspace of codimension `s`.
    /// With `samples`, checks that many random subspaces instead.
    #[pyo3(signature = (s, samples = None, seed = 0))]
    fn is_affine_blocking<'py>(&self, py: Python<'py>, s: usize, samples: Option<u64>, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let v = match samples {
            Some(n) => blocking::is_affine_blocking_sampled(&self.inner, s, n, seed),
            None => blocking::is_affine_blocking(&self.inner, s),
        }
        .map_err(py_err)?;
        to_py(py, &v)
    }

    /// Whether the set meets every codimension-t subspace in a spanning set.
    #[pyo3(signature = (t = 1, samples = None, seed = 0))]
    fn is_strong_blocking<'py>(&self, py: Python<'py>, t: usize, samples: Option<u64>, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let v = match samples {
            Some(n) => blocking::is_strong_blocking_sampled(&self.inner, t, n, seed),
            None => blocking::is_strong_blocking(&self.inner, t),
        }
        .map_err(py_err)?;
        to_py(py, &v)
    }

    /// `{0} ∪ ⋃ F_q·p` as an affine set.
    fn lift(&self) -> Self {
        PyPointSet { inner: blocking::lift_to_affine(&self.inner) }
    }

    /// The projective points of the nonzero vectors.
    fn projectivize(&self) -> Self {
        PyPointSet { inner: blocking::projectivize(&self.inner) }
    }
}

/// A linear code given by a generator matrix.
#[pyclass(name = "LinearCode", module = "blockset", frozen)]
struct PyLinearCode {
    inner: codes::LinearCode,
}

#[pymethods]
impl PyLinearCode {
    #[new]
    fn new(q: u32, rows: Vec<Vec<u8>>) -> PyResult<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let g = Mat::from_rows(&field(q)?, cols, &rows).map_err(py_err)?;
        Ok(PyLinearCode { inner: codes::LinearCode::new(g).map_err(py_err)? })
    }

    #[staticmethod]
    fn from_points(points: &PyPointSet) -> PyResult<Self> {
        Ok(PyLinearCode { inner: codes::code_from_points(&points.inner).map_err(py_err)? })
    }

    #[getter]
    fn q(&self) -> u32 {
        self.inner.field().q()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn generator(&self) -> Vec<Vec<u8>> {
        self.inner.generator().row_vecs()
    }

    fn codewords(&self) -> PyResult<Vec<Vec<u8>>> {
        self.inner.codewords().map_err(py_err)
    }

    fn min_distance(&self) -> PyResult<usize> {
        self.inner.min_distance().map_err(py_err)
    }

    fn distance_via_hyperplanes(&self) -> PyResult<usize> {
        codes::distance_via_hyperplanes(&self.inner).map_err(py_err)
    }

    fn is_minimal<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &codes::is_minimal(&self.inner).map_err(py_err)?)
    }

    /// `mode` is "direct" or "equivalence".
    #[pyo3(signature = (mode = "direct"))]
    fn is_trifferent<'py>(&self, py: Python<'py>, mode: &str) -> PyResult<Bound<'py, PyAny>> {
        let mode = match mode {
            "direct" => TrifferenceMode::Direct,
            "equivalence" => TrifferenceMode::Equivalence,
            other => return Err(BlocksetError::new_err(format!("unknown trifference mode {other:?}"))),
        };
        to_py(py, &codes::is_trifferent(&self.inner, mode).map_err(py_err)?)
    }

    fn is_perfect_hash<'py>(&self, py: Python<'py>, t: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &codes::is_perfect_hash(&self.inner, t).map_err(py_err)?)
    }

    /// The column points in PG(k−1, q).
    fn points(&self) -> PyResult<PyPointSet> {
        Ok(PyPointSet { inner: codes::points_from_code(&self.inner).map_err(py_err)?.set })
    }

    /// `{0} ∪ columns ∪ −columns` for a ternary code.
    fn blocking_set(&self) -> PyResult<PyPointSet> {
        Ok(PyPointSet { inner: codes::blocking_from_code(&self.inner).map_err(py_err)? })
    }

    fn __repr__(&self) -> String {
        format!("LinearCode([{}, {}]_{})", self.n(), self.k(), self.q())
    }
}

/// Number of s-dimensional subspaces of F_q^k.
#[pyfunction]
fn qbin(k: i64, s: i64, q: u32) -> BigUint {
    geometry::qbin(k, s, q)
}

/// Number of affine subspaces of dimension s in F_q^k.
#[pyfunction]
fn count_affine(k: i64, s: i64, q: u32) -> BigUint {
    geometry::count_affine(k, s, q)
}

#[pyfunction]
fn n_q(k: i64, s: i64, q: u32) -> BigUint {
    geometry::n_q_formula(k, s, q)
}

/// Counts the same quantity as `n_q` by enumeration.
#[pyfunction]
fn n_q_oracle(k: usize, s: usize, q: u32) -> PyResult<u128> {
    geometry::n_q_oracle(&field(q)?, k, s, None).map_err(py_err)
}

#[pyfunction]
fn count_report<'py>(py: Python<'py>, k: i64, s: i64, q: u32) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &geometry::check_estimates(k, s, q))
}

#[pyfunction]
#[pyo3(name = "bounds", signature = (q, k, s = None))]
fn bounds_report<'py>(py: Python<'py>, q: u32, k: usize, s: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &bounds::bounds(q, k, s).map_err(py_err)?)
}

#[pyfunction]
fn trifferent_bounds<'py>(py: Python<'py>, n: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &bounds::trifferent_bounds(n).map_err(py_err)?)
}

#[pyfunction]
#[pyo3(signature = (q, tol = bounds::DEFAULT_TOLERANCE))]
fn compute_cq<'py>(py: Python<'py>, q: u32, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &bounds::compute_cq(q, tol).map_err(py_err)?)
}

#[pyfunction]
fn mrrw(q: u32, delta: f64) -> PyResult<f64> {
    bounds::mrrw(q, delta).map_err(py_err)
}

/// Solves b'_3(k, 2) exactly and returns the certificate.
#[pyfunction]
#[pyo3(signature = (k, time_limit = None, mode = "bnb", threads = 1))]
fn solve_bprime<'py>(py: Python<'py>, k: usize, time_limit: Option<f64>, mode: &str, threads: usize) -> PyResult<Bound<'py, PyAny>> {
    let inst = exact::build_instance(k).map_err(py_err)?;
    let opts = exact::SolveOptions {
        mode: mode.parse().map_err(py_err)?,
        time_limit: time_limit.map(Duration::from_secs_f64),
        threads: threads.max(1),
    };
    let cert = py.detach(|| exact::solve_with(&inst, &opts)).map_err(py_err)?;
    to_py(py, &cert)
}

/// T_L(n) for n = 1..=n_max, from b'_3(k, 2) solved for k <= 4 and the
/// known values above.
#[pyfunction]
fn tl_table<'py>(py: Python<'py>, n_max: usize) -> PyResult<Bound<'py, PyAny>> {
    let values = blockset::cli::bprime_values(4, None, 1).map_err(py_err)?;
    let map = values.iter().map(|(k, b, _)| (*k, *b)).collect();
    let rows = exact::tl_table(n_max, &map).map_err(py_err)?;
    let out: Vec<_> = rows
        .iter()
        .map(|r| serde_json::json!({ "n": r.n, "k_min": r.k_min, "k_max": r.k_max, "t_l_min": r.size_min(), "t_l_max": r.size_max() }))
        .collect();
    to_py(py, &out)
}

/// Random affine s-blocking set; `dim = None` draws points instead of
/// subspaces. Returns the set and the run record.
#[pyfunction]
#[pyo3(signature = (q, k, s, seed = 0, dim = Some(2), m = None, max_attempts = 5))]
fn random_blocking_set<'py>(
    py: Python<'py>,
    q: u32,
    k: usize,
    s: usize,
    seed: u64,
    dim: Option<usize>,
    m: Option<usize>,
    max_attempts: usize,
) -> PyResult<(PyPointSet, Bound<'py, PyAny>)> {
    let strategy = match dim {
        Some(dim) => Strategy::Subspaces { dim },
        None => Strategy::Points,
    };
    let r = constructions::random_subspace_blocking(q, k, s, seed, strategy, m, max_attempts).map_err(py_err)?;
    let info = serde_json::json!({ "m": r.m, "attempts": r.attempts, "verified": r.verified, "seed": r.seed });
    Ok((PyPointSet { inner: r.set }, to_py(py, &info)?))
}

#[pyfunction]
fn tetrahedron(q: u32, k: usize) -> PyResult<PyPointSet> {
    Ok(PyPointSet { inner: constructions::tetrahedron(&field(q)?, k).map_err(py_err)? })
}

/// Union of the lines joining the points at the ends of each edge.
#[pyfunction]
#[pyo3(signature = (points, edges, verify = true))]
fn graph_construction<'py>(
    py: Python<'py>,
    points: &PyPointSet,
    edges: Vec<(usize, usize)>,
    verify: bool,
) -> PyResult<(PyPointSet, Bound<'py, PyAny>)> {
    let g = constructions::Graph::new(points.inner.len(), &edges).map_err(py_err)?;
    let c = constructions::graph_lines_construction(&points.inner, &g, verify).map_err(py_err)?;
    let info = serde_json::json!({ "d": c.d, "integrity": c.integrity, "condition": c.condition, "verified": c.verified });
    Ok((PyPointSet { inner: c.set }, to_py(py, &info)?))
}

/// Returns (value, lexicographically smallest optimal deletion set).
#[pyfunction]
fn vertex_integrity(n: usize, edges: Vec<(usize, usize)>) -> PyResult<(usize, Vec<usize>)> {
    let g = constructions::Graph::new(n, &edges).map_err(py_err)?;
    let i = constructions::vertex_integrity(&g, IntegrityMode::Auto).map_err(py_err)?;
    Ok((i.value, i.set))
}

#[pymodule]
#[pyo3(name = "blockset")]
pub fn blockset_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BlocksetError", m.py().get_type::<BlocksetError>())?;
    m.add_class::<PyPointSet>()?;
    m.add_class::<PyLinearCode>()?;
    m.add_function(wrap_pyfunction!(qbin, m)?)?;
    m.add_function(wrap_pyfunction!(count_affine, m)?)?;
    m.add_function(wrap_pyfunction!(n_q, m)?)?;
    m.add_function(wrap_pyfunction!(n_q_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(count_report, m)?)?;
    m.add_function(wrap_pyfunction!(bounds_report, m)?)?;
    m.add_function(wrap_pyfunction!(trifferent_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(compute_cq, m)?)?;
    m.add_function(wrap_pyfunction!(mrrw, m)?)?;
    m.add_function(wrap_pyfunction!(solve_bprime, m)?)?;
    m.add_function(wrap_pyfunction!(tl_table, m)?)?;
    m.add_function(wrap_pyfunction!(random_blocking_set, m)?)?;
    m.add_function(wrap_pyfunction!(tetrahedron, m)?)?;
    m.add_function(wrap_pyfunction!(graph_construction, m)?)?;
    m.add_function(wrap_pyfunction!(vertex_integrity, m)?)?;
    Ok(())
}
