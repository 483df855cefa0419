//! Python bindings for `fiwalk`.
//!
//! Exact values cross the boundary as `fractions.Fraction`; closed forms in
//! `n` are wrapped in [`PyRationalFunc`]. Failures raise `ValueError`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use fiwalk::exactnum::{parse_ratfunc, rat_to_f64, Rational, RationalFunc};
use fiwalk::fispec::{builtin_family, default_families, instantiate as build, FiGraphSpec};
use fiwalk::hitting::{build_roofed_chain, default_sweep, moments_symbolic};
use fiwalk::mixing::{adjacency_relation, eigenvalues_at, laplacian_relation, tv_profile, Epsilon, CLUSTER_TOL};
use fiwalk::walks::{parse_walk, TransitionRelation};

fn err(e: fiwalk::Error) -> PyErr {
    PyValueError::new_err(format!("{}: {e}", e.kind()))
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((r.to_string(),))
}

fn from_json<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.getattr("loads")?.call1((v.to_string(),))
}

/// A built-in family selector or a spec given as JSON text.
fn load_spec(family: &str) -> PyResult<FiGraphSpec> {
    if family.trim_start().starts_with('{') {
        FiGraphSpec::from_json(family).map_err(err)
    } else {
        builtin_family(family).map_err(err)
    }
}

fn load(family: &str, walk: &str) -> PyResult<(FiGraphSpec, TransitionRelation)> {
    let spec = load_spec(family)?;
    let p = parse_walk(&spec, walk).map_err(err)?;
    Ok((spec, p))
}

fn roof_index(spec: &FiGraphSpec, roof: Option<&str>) -> PyResult<usize> {
    match roof {
        None => Ok(0),
        Some(name) => spec
            .vertex_orbits
            .iter()
            .position(|o| o.name == name)
            .ok_or_else(|| PyValueError::new_err(format!("no vertex orbit named `{name}`"))),
    }
}

/// A rational function of `n` with exact rational coefficients.
#[pyclass(name = "RationalFunc", module = "fiwalk_py", frozen, eq, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PyRationalFunc {
    inner: RationalFunc,
}

#[pymethods]
impl PyRationalFunc {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyRationalFunc { inner: parse_ratfunc(text).map_err(err)? })
    }

    /// Exact value at an integer `n`.
    fn eval<'py>(&self, py: Python<'py>, n: i64) -> PyResult<Bound<'py, PyAny>> {
        let v = self.inner.eval(n).map_err(err)?;
        fraction(py, &v)
    }

    fn eval_float(&self, x: f64) -> f64 {
        self.inner.eval_f64(x)
    }

    fn is_polynomial(&self) -> bool {
        self.inner.is_polynomial()
    }

    /// Degree of the numerator minus degree of the denominator.
    fn growth(&self) -> isize {
        -self.inner.decay_order()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("RationalFunc('{}')", self.inner)
    }
}

fn wrap(f: &RationalFunc) -> PyRationalFunc {
    PyRationalFunc { inner: f.clone() }
}

/// Names of the built-in families.
#[pyfunction]
fn families() -> Vec<String> {
    default_families()
}

/// Smallest `n` from which counts are polynomial.
#[pyfunction]
fn stabilization_bound(family: &str) -> PyResult<i64> {
    Ok(load_spec(family)?.stabilization_bound())
}

/// Vertex, edge and per-orbit counts of `G_n`.
#[pyfunction]
fn instantiate<'py>(py: Python<'py>, family: &str, n: i64) -> PyResult<Bound<'py, PyDict>> {
    let spec = load_spec(family)?;
    let g = build(&spec, n).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("vertices", g.vertex_count())?;
    d.set_item("edges", g.edge_count())?;
    d.set_item("connected", g.is_connected())?;
    let per = PyDict::new(py);
    for (i, o) in spec.vertex_orbits.iter().enumerate() {
        per.set_item(&o.name, g.orbit_vertices(i).len())?;
    }
    d.set_item("orbits", per)?;
    Ok(d)
}

/// Expected hitting time of the roof orbit's base vertex from every pair
/// pattern, as closed forms in `n`.
#[pyfunction]
#[pyo3(signature = (family, walk = "simple", roof = None))]
fn hitting_times(family: &str, walk: &str, roof: Option<&str>) -> PyResult<Vec<(String, PyRationalFunc)>> {
    let (spec, p) = load(family, walk)?;
    let roof = roof_index(&spec, roof)?;
    let chain = build_roofed_chain(&spec, &p, roof, &default_sweep(&spec, &p)).map_err(err)?;
    let t = moments_symbolic(&chain, 1).map_err(err)?;
    Ok(t.states.iter().zip(&t.raw[0]).map(|(s, q)| (spec.fmt_pattern(s.clone()), wrap(q))).collect())
}

/// Raw moments, central moments and cumulants up to `order`, keyed by
/// pattern.
#[pyfunction]
#[pyo3(signature = (family, walk = "simple", order = 2, roof = None))]
fn moments<'py>(py: Python<'py>, family: &str, walk: &str, order: usize, roof: Option<&str>) -> PyResult<Bound<'py, PyDict>> {
    let (spec, p) = load(family, walk)?;
    let roof = roof_index(&spec, roof)?;
    let chain = build_roofed_chain(&spec, &p, roof, &default_sweep(&spec, &p)).map_err(err)?;
    let t = moments_symbolic(&chain, order).map_err(err)?;
    let out = PyDict::new(py);
    for (kind, table) in [("raw", &t.raw), ("central", &t.central), ("cumulants", &t.cumulants)] {
        let d = PyDict::new(py);
        for (i, s) in t.states.iter().enumerate() {
            let col: Vec<PyRationalFunc> = table.iter().map(|row| wrap(&row[i])).collect();
            d.set_item(spec.fmt_pattern(s.clone()), col)?;
        }
        out.set_item(kind, d)?;
    }
    Ok(out)
}

/// Worst-case total-variation distance `d(t)` and the mixing times at the
/// given thresholds. `d` is exact over the first steps, `d_float` covers
/// every computed step.
#[pyfunction]
#[pyo3(signature = (family, n, t_max = 64, walk = "simple", eps = vec!["1/4".to_string()]))]
fn mixing_profile<'py>(py: Python<'py>, family: &str, n: i64, t_max: usize, walk: &str, eps: Vec<String>) -> PyResult<Bound<'py, PyDict>> {
    let (spec, p) = load(family, walk)?;
    let eps: Vec<Epsilon> = eps.iter().map(|e| Epsilon::parse(e)).collect::<fiwalk::Result<_>>().map_err(err)?;
    let prof = tv_profile(&spec, &p, n, t_max, &eps).map_err(err)?;
    let d = PyList::empty(py);
    for v in &prof.d {
        d.append(fraction(py, v)?)?;
    }
    let out = PyDict::new(py);
    out.set_item("d", d)?;
    out.set_item("d_float", prof.d_float.clone())?;
    let tm = PyDict::new(py);
    for (label, t) in &prof.t_mix {
        tm.set_item(label, *t)?;
    }
    out.set_item("t_mix", tm)?;
    Ok(out)
}

/// `rho(n)`, the smallest edge-flow ratio against the weighted walk, fitted
/// over `ns`.
#[pyfunction]
#[pyo3(signature = (family, ns, walk = "simple"))]
fn rho(family: &str, ns: Vec<i64>, walk: &str) -> PyResult<PyRationalFunc> {
    let (spec, p) = load(family, walk)?;
    let r = fiwalk::walks::rho(&spec, &p, &ns).map_err(err)?;
    Ok(wrap(&r.fitted))
}

/// Sorted eigenvalues of the adjacency or normalized Laplacian at `n`.
#[pyfunction]
#[pyo3(signature = (family, n, relation = "adjacency"))]
fn spectrum(family: &str, n: i64, relation: &str) -> PyResult<Vec<f64>> {
    let spec = load_spec(family)?;
    let r = match relation {
        "adjacency" => adjacency_relation(&spec),
        "laplacian" => laplacian_relation(&spec),
        other => return Err(PyValueError::new_err(format!("unknown relation `{other}`"))),
    };
    eigenvalues_at(&spec, &r, n, CLUSTER_TOL).map_err(err)
}

/// Symbolic moments against full-graph solves on `n0..=n0+3`, one dict per
/// walk.
#[pyfunction]
fn verify<'py>(py: Python<'py>, family: &str) -> PyResult<Bound<'py, PyAny>> {
    let spec = load_spec(family)?;
    let cells = py.detach(|| fiwalk::cli::verify_suite(std::slice::from_ref(&spec))).map_err(err)?;
    from_json(py, &serde_json::to_value(cells).map_err(|e| PyValueError::new_err(e.to_string()))?)
}

/// Runs a command-line invocation and returns its JSON report.
#[pyfunction]
fn run<'py>(py: Python<'py>, args: Vec<String>) -> PyResult<Bound<'py, PyAny>> {
    use fiwalk::cli::{execute, Cli};
    use pyo3::exceptions::PyRuntimeError;

    let cli = <Cli as clap::Parser>::try_parse_from(std::iter::once("fiwalk".to_string()).chain(args))
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let report = py.detach(|| execute(&cli)).map_err(err)?;
    if !report.failures.is_empty() {
        let msgs: Vec<&str> = report.failures.iter().map(|f| f.message.as_str()).collect();
        return Err(PyRuntimeError::new_err(msgs.join("; ")));
    }
    from_json(py, &report.json)
}

/// Float value of an exact fraction string, for quick inspection.
#[pyfunction]
fn to_float(text: &str) -> PyResult<f64> {
    fiwalk::exactnum::parse_rational(text).map(|r| rat_to_f64(&r)).map_err(err)
}

#[pymodule]
fn fiwalk_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRationalFunc>()?;
    m.add_function(wrap_pyfunction!(families, m)?)?;
    m.add_function(wrap_pyfunction!(stabilization_bound, m)?)?;
    m.add_function(wrap_pyfunction!(instantiate, m)?)?;
    m.add_function(wrap_pyfunction!(hitting_times, m)?)?;
    m.add_function(wrap_pyfunction!(moments, m)?)?;
    m.add_function(wrap_pyfunction!(mixing_profile, m)?)?;
    m.add_function(wrap_pyfunction!(rho, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(to_float, m)?)?;
    Ok(())
}
