//! Python bindings: graphs, polynomials, slices, Hopf algebra characters
//! and the numerical regularization routines.
//!
//! Exact rationals cross the boundary as `"num/den"` strings; structured
//! reports come back as plain dicts and lists.

use std::sync::Arc;

use feynpar_core::formats::{case_table_json, milnor_json, momenta_from, quotient_json, series_json, subspace_json, CharacterSpec};
use feynpar_core::graph::{builders, AllOnePi, DivergencePredicate, FeynmanGraph, PowerCounting};
use feynpar_core::graph_poly::{
    case_table_affine, case_table_sliced, display_poly, exact_invariants, psi, second_symanzik, variable_names,
    MomentumData, PMethod,
};
use feynpar_core::hopf::{birkhoff as birkhoff_factor, connection_data, mu_prefactored, renormalized_value, Grading, HopfAlgebra};
use feynpar_core::integration::{
    asymptotic_fit as fit_samples, dimreg_series, feynman_identity, feynman_identity_sliced, feynman_u, gelfand_leray_j,
    leray_i_epsilon, log_zeta_coeffs, mellin_transform, standard_simplex, Domain, FeynmanOptions, GlOptions, LogKind,
    QuadOptions,
};
use feynpar_core::poly::{finite_field_point_count, MultiPoly};
use feynpar_core::rational::{fmt_q, parse_q, Q};
use feynpar_core::slicing::{feynman_subspace_dim, make_slice, milnor_number, milnor_report, restrict, LinearSlice, SliceSpec};
use feynpar_core::{Error, Result as CoreResult};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use serde_json::{json, Value};

create_exception!(feynpar, FeynparError, PyException, "Base class for feynpar errors.");
create_exception!(feynpar, ValidationError, FeynparError, "Malformed input.");
create_exception!(feynpar, ToleranceError, FeynparError, "A numeric tolerance was not reached.");
create_exception!(feynpar, PreconditionError, FeynparError, "An operation's precondition does not hold.");

fn to_py_err(e: Error) -> PyErr {
    use Error::*;
    let msg = e.to_string();
    match e {
        MalformedGraph(_) | UnknownEdge(_) | NotASubgraph(_) | ArityMismatch { .. } | MomentumNotConserved(_)
        | BadLegConfiguration(_) | OddDimension(_) | Parse(_) => ValidationError::new_err(msg),
        ToleranceNotReached { .. } | FitUnstable(_) | Timeout { .. } => ToleranceError::new_err(msg),
        _ => PreconditionError::new_err(msg),
    }
}

fn ok<T>(r: CoreResult<T>) -> PyResult<T> {
    r.map_err(to_py_err)
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(py.import("json")?.call_method1("loads", (v.to_string(),))?.unbind())
}

fn report<T: serde::Serialize>(py: Python<'_>, x: &T) -> PyResult<Py<PyAny>> {
    to_py(py, &serde_json::to_value(x).expect("reports serialize"))
}

fn momenta(p2: Option<&str>, m2: Option<&str>, gram: Option<&str>) -> PyResult<MomentumData> {
    ok(momenta_from(gram, p2, m2))
}

fn quad(tol: f64, max_evals: usize, seed: u64) -> QuadOptions {
    QuadOptions { max_evals, seed, ..QuadOptions::tolerance(tol) }
}

/// A validated Feynman graph.
#[pyclass(name = "Graph", module = "feynpar", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: FeynmanGraph,
}

#[pymethods]
impl PyGraph {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: ok(FeynmanGraph::from_json(text))? })
    }

    /// One of the bundled graphs, by name (`bubble`, `banana-3`, ...).
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        builders::corpus()
            .into_iter()
            .find(|g| g.name() == name)
            .map(|inner| Self { inner })
            .ok_or_else(|| ValidationError::new_err(format!("no bundled graph named `{name}`")))
    }

    #[staticmethod]
    fn corpus() -> Vec<Self> {
        builders::corpus().into_iter().map(|inner| Self { inner }).collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    #[getter]
    fn loops(&self) -> usize {
        self.inner.loop_number()
    }

    /// The Kirchhoff polynomial.
    fn psi(&self) -> PyPoly {
        PyPoly { inner: psi(&self.inner) }
    }

    /// The second Symanzik polynomial; symbolic `p2` when no momenta are given.
    #[pyo3(signature = (p2=None, m2=None, gram=None))]
    fn second_symanzik(&self, p2: Option<&str>, m2: Option<&str>, gram: Option<&str>) -> PyResult<PyPoly> {
        let mom = momenta(p2, m2, gram)?;
        Ok(PyPoly { inner: ok(second_symanzik(&self.inner, &mom, PMethod::CutSets))? })
    }

    /// Display form of `P` with the symbolic `p2` printed first.
    #[pyo3(signature = (p2=None, m2=None, gram=None))]
    fn second_symanzik_str(&self, p2: Option<&str>, m2: Option<&str>, gram: Option<&str>) -> PyResult<String> {
        let mom = momenta(p2, m2, gram)?;
        let p = ok(second_symanzik(&self.inner, &mom, PMethod::CutSets))?;
        Ok(display_poly(&p, &variable_names(self.inner.num_edges(), &mom)))
    }

    /// Exact invariant checks as a list of dicts.
    #[pyo3(signature = (seed=0, points=20))]
    fn invariants(&self, py: Python<'_>, seed: u64, points: usize) -> PyResult<Py<PyAny>> {
        let checks = ok(exact_invariants(&self.inner, seed, points))?;
        report(py, &checks)
    }

    fn __repr__(&self) -> String {
        format!("Graph({:?}, edges={}, loops={})", self.inner.name(), self.inner.num_edges(), self.inner.loop_number())
    }
}

/// A polynomial with rational coefficients.
#[pyclass(name = "Poly", module = "feynpar", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyPoly {
    inner: MultiPoly,
}

#[pymethods]
impl PyPoly {
    /// Parse the `coef num/den : e1 ... en` line format.
    #[staticmethod]
    fn from_lines(text: &str, arity: usize) -> PyResult<Self> {
        Ok(Self { inner: ok(MultiPoly::deserialize(text, arity))? })
    }

    /// `sum c_i * prod u_j^e_ij` from `[(coef, [e1, ...]), ...]`.
    #[staticmethod]
    fn from_terms(arity: usize, terms: Vec<(String, Vec<u32>)>) -> PyResult<Self> {
        let mut out = Vec::new();
        for (c, e) in terms {
            if e.len() != arity {
                return Err(to_py_err(Error::ArityMismatch { left: arity, right: e.len() }));
            }
            out.push((e, ok(parse_q(&c))?));
        }
        Ok(Self { inner: MultiPoly::from_terms(arity, out) })
    }

    fn serialize(&self) -> String {
        self.inner.serialize()
    }

    #[pyo3(signature = (prefix="t"))]
    fn display(&self, prefix: &str) -> String {
        self.inner.display_with(&MultiPoly::default_names(self.inner.arity(), prefix))
    }

    #[getter]
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn total_degree(&self) -> Option<u32> {
        self.inner.total_degree()
    }

    fn is_homogeneous(&self) -> bool {
        self.inner.is_homogeneous()
    }

    fn derivative(&self, i: usize) -> PyResult<Self> {
        if i >= self.inner.arity() {
            return Err(ValidationError::new_err(format!("variable index {i} out of range")));
        }
        Ok(Self { inner: self.inner.derivative(i) })
    }

    /// Exact value at a rational point, as `"num/den"`.
    fn eval(&self, point: Vec<String>) -> PyResult<String> {
        let p = point.iter().map(|s| parse_q(s)).collect::<CoreResult<Vec<Q>>>();
        Ok(fmt_q(&ok(self.inner.try_eval(&ok(p)?))?))
    }

    fn eval_f64(&self, point: Vec<f64>) -> PyResult<f64> {
        if point.len() != self.inner.arity() {
            return Err(to_py_err(Error::ArityMismatch { left: self.inner.arity(), right: point.len() }));
        }
        Ok(self.inner.eval_f64(&point))
    }

    #[pyo3(signature = (q, projective=false))]
    fn count_points(&self, q: u64, projective: bool) -> PyResult<u64> {
        ok(finite_field_point_count(&self.inner, q, projective))
    }

    /// Local Milnor number at a rational point: an int, or `"infinite"`.
    fn milnor_number(&self, py: Python<'_>, point: Vec<String>) -> PyResult<Py<PyAny>> {
        let p = ok(point.iter().map(|s| parse_q(s)).collect::<CoreResult<Vec<Q>>>())?;
        to_py(py, &quotient_json(&ok(milnor_number(&self.inner, &p))?))
    }

    fn __str__(&self) -> String {
        self.display("t")
    }

    fn __repr__(&self) -> String {
        format!("Poly({})", self.display("t"))
    }
}

/// A rational linear subspace of parameter space.
#[pyclass(name = "Slice", module = "feynpar", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySlice {
    inner: LinearSlice,
}

#[pymethods]
impl PySlice {
    #[staticmethod]
    #[pyo3(signature = (n, k, seed=0))]
    fn make(n: usize, k: usize, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: ok(make_slice(n, k, seed))? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let spec: SliceSpec =
            serde_json::from_str(text).map_err(|e| ValidationError::new_err(format!("slice JSON: {e}")))?;
        Ok(Self { inner: ok(LinearSlice::from_spec(&spec))? })
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.inner.to_spec()).expect("slice spec serializes")
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn ambient(&self) -> usize {
        self.inner.ambient()
    }

    fn restrict(&self, p: &PyPoly) -> PyResult<PyPoly> {
        Ok(PyPoly { inner: ok(restrict(&p.inner, &self.inner))? })
    }
}

#[pyfunction]
fn milnor(py: Python<'_>, f: &PyPoly, slice: &PySlice) -> PyResult<Py<PyAny>> {
    let r = ok(milnor_report(&f.inner, &slice.inner))?;
    to_py(py, &milnor_json(&r))
}

#[pyfunction]
#[pyo3(signature = (graph, slice, dims=vec![2, 4]))]
fn feynman_subspace(py: Python<'_>, graph: &PyGraph, slice: &PySlice, dims: Vec<u32>) -> PyResult<Py<PyAny>> {
    let subs = ok(feynman_subspace_dim(&graph.inner, &slice.inner, &dims))?;
    to_py(py, &Value::Array(subs.iter().map(subspace_json).collect()))
}

#[pyfunction]
fn case_table(py: Python<'_>, n: i64, dimension: i64, loops: i64) -> PyResult<Py<PyAny>> {
    to_py(py, &case_table_json(&ok(case_table_affine(n, dimension, loops))?))
}

#[pyfunction]
fn case_table_slice(py: Python<'_>, k: i64, dimension: i64, loops: i64) -> PyResult<Py<PyAny>> {
    to_py(py, &case_table_json(&ok(case_table_sliced(k, dimension, loops))?))
}

fn algebra(graph: &PyGraph, rule: &str, dimension: Option<i64>) -> PyResult<(HopfAlgebra, feynpar_core::hopf::Element)> {
    let rule: Arc<dyn DivergencePredicate> = match rule {
        "power-counting" => {
            Arc::new(PowerCounting { dimension: dimension.or(graph.inner.theory().dimension).unwrap_or(4) })
        }
        "all1pi" => Arc::new(AllOnePi),
        other => return Err(ValidationError::new_err(format!("unknown rule `{other}`"))),
    };
    let mut h = HopfAlgebra::new(rule);
    let x = ok(h.element_of_graph(&graph.inner))?;
    Ok((h, x))
}

#[pyfunction]
#[pyo3(signature = (graph, rule="power-counting", dimension=None))]
fn coproduct(graph: &PyGraph, rule: &str, dimension: Option<i64>) -> PyResult<String> {
    let (h, x) = algebra(graph, rule, dimension)?;
    Ok(h.display_tensor(&h.coproduct(&x)))
}

#[pyfunction]
#[pyo3(signature = (graph, rule="power-counting", dimension=None))]
fn antipode(graph: &PyGraph, rule: &str, dimension: Option<i64>) -> PyResult<String> {
    let (h, x) = algebra(graph, rule, dimension)?;
    Ok(h.display_element(&h.antipode(&x)))
}

fn built(spec: &str) -> PyResult<feynpar_core::formats::BuiltCharacter> {
    ok(CharacterSpec::parse(spec).and_then(|s| s.build()))
}

/// Birkhoff factorization of a character spec (JSON text), keyed by generator name.
#[pyfunction]
fn birkhoff(py: Python<'_>, spec: &str) -> PyResult<Py<PyAny>> {
    let b = built(spec)?;
    let h = &b.algebra;
    let bk = ok(birkhoff_factor(h, &b.character))?;
    let mut out = serde_json::Map::new();
    for id in 0..h.len() {
        out.insert(
            h.generator(id).name.clone(),
            json!({
                "phi": b.character.get(id).map(series_json),
                "minus": bk.minus.get(id).map(series_json),
                "plus": bk.plus.get(id).map(series_json),
            }),
        );
    }
    to_py(py, &Value::Object(out))
}

/// Renormalized values `phi_+(x)(0)` and counterterms of the top-level inputs.
#[pyfunction]
#[pyo3(signature = (spec, log_mu=None))]
fn renormalize(py: Python<'_>, spec: &str, log_mu: Option<&str>) -> PyResult<Py<PyAny>> {
    let b = built(spec)?;
    let h = &b.algebra;
    let phi = match log_mu {
        Some(l) => mu_prefactored(h, &b.character, &ok(parse_q(l))?),
        None => b.character.clone(),
    };
    let bk = ok(birkhoff_factor(h, &phi))?;
    let mut out = Vec::new();
    for &id in &b.roots {
        let r = ok(renormalized_value(h, &bk, id))?;
        out.push(json!({"name": h.generator(id).name, "value": fmt_q(&r.value), "counterterm": series_json(&r.counterterm)}));
    }
    to_py(py, &Value::Array(out))
}

#[pyfunction]
#[pyo3(signature = (spec, grading="loops"))]
fn connection(py: Python<'_>, spec: &str, grading: &str) -> PyResult<Py<PyAny>> {
    let b = built(spec)?;
    let grading = match grading {
        "loops" => Grading::Loops,
        "edges" => Grading::Edges,
        other => return Err(ValidationError::new_err(format!("unknown grading `{other}`"))),
    };
    let cd = ok(connection_data(&b.algebra, &b.character, grading))?;
    let h = &b.algebra;
    let gens: Vec<Value> = (0..h.len())
        .map(|id| {
            json!({
                "name": h.generator(id).name,
                "a": cd.a.get(id).map(series_json),
                "b": cd.b.get(id).map(series_json),
            })
        })
        .collect();
    to_py(py, &json!({"generators": gens, "residual": cd.residual}))
}

#[pyfunction]
#[pyo3(signature = (graph, dimension=4, p2=None, m2=None, gram=None, tol=1e-8, max_evals=4_000_000, allow_divergent=false))]
#[allow(clippy::too_many_arguments)]
fn integrate(
    py: Python<'_>,
    graph: &PyGraph,
    dimension: i64,
    p2: Option<&str>,
    m2: Option<&str>,
    gram: Option<&str>,
    tol: f64,
    max_evals: usize,
    allow_divergent: bool,
) -> PyResult<Py<PyAny>> {
    let mom = momenta(p2, m2, gram)?;
    let opts = FeynmanOptions { quad: quad(tol, max_evals, 0), allow_divergent };
    let r = ok(py.detach(|| feynman_u(&graph.inner, &mom, dimension, &opts)))?;
    report(py, &r)
}

#[pyfunction]
#[pyo3(signature = (graph, dimension=4, order=2, mu=1.0, p2=None, m2=None, gram=None, tol=1e-8, allow_divergent=false))]
#[allow(clippy::too_many_arguments)]
fn dimreg(
    py: Python<'_>,
    graph: &PyGraph,
    dimension: i64,
    order: usize,
    mu: f64,
    p2: Option<&str>,
    m2: Option<&str>,
    gram: Option<&str>,
    tol: f64,
    allow_divergent: bool,
) -> PyResult<Py<PyAny>> {
    let mom = momenta(p2, m2, gram)?;
    let opts = FeynmanOptions { quad: QuadOptions::tolerance(tol), allow_divergent };
    let r = ok(py.detach(|| dimreg_series(&graph.inner, &mom, dimension, mu, order, &opts)))?;
    report(py, &r)
}

#[pyfunction]
#[pyo3(signature = (graph, dimension=4, kind="v", n_max=3, p2=None, m2=None, gram=None, tol=1e-8))]
#[allow(clippy::too_many_arguments)]
fn log_zeta(
    py: Python<'_>,
    graph: &PyGraph,
    dimension: i64,
    kind: &str,
    n_max: usize,
    p2: Option<&str>,
    m2: Option<&str>,
    gram: Option<&str>,
    tol: f64,
) -> PyResult<Py<PyAny>> {
    let kind = match kind {
        "psi" => LogKind::Psi,
        "v" => LogKind::V,
        other => return Err(ValidationError::new_err(format!("unknown log kind `{other}`"))),
    };
    let mom = momenta(p2, m2, gram)?;
    let opts = FeynmanOptions { quad: QuadOptions::tolerance(tol), allow_divergent: false };
    let r = ok(py.detach(|| log_zeta_coeffs(&graph.inner, &mom, dimension, kind, n_max, &opts)))?;
    report(py, &r)
}

#[pyfunction]
#[pyo3(signature = (graph, dimension=4, p2=None, m2=None, gram=None, slice=None, tol=1e-6))]
#[allow(clippy::too_many_arguments)]
fn identity_check(
    py: Python<'_>,
    graph: &PyGraph,
    dimension: i64,
    p2: Option<&str>,
    m2: Option<&str>,
    gram: Option<&str>,
    slice: Option<&PySlice>,
    tol: f64,
) -> PyResult<Py<PyAny>> {
    let mom = momenta(p2, m2, gram)?;
    let opts = QuadOptions::tolerance(tol);
    let r = ok(py.detach(|| match slice {
        Some(s) => feynman_identity_sliced(&graph.inner, &mom, dimension, &s.inner, &opts),
        None => feynman_identity(&graph.inner, &mom, dimension, &opts),
    }))?;
    report(py, &r)
}

fn domain(name: &str, k: usize, radius: f64, bounds: (f64, f64)) -> PyResult<Domain> {
    match name {
        "disk" if k == 2 => Ok(Domain::Disk { center: [0.0, 0.0], radius }),
        "disk" => Err(to_py_err(Error::ArityMismatch { left: 2, right: k })),
        "box" => Ok(Domain::Box(vec![bounds; k])),
        "simplex" => Ok(Domain::Simplex(standard_simplex(k))),
        other => Err(ValidationError::new_err(format!("unknown domain `{other}`"))),
    }
}

/// Samples of the Gelfand–Leray function `J(s)` of `alpha du` (default 1) along `f`.
#[pyfunction]
#[pyo3(signature = (f, s, alpha=None, domain_name="disk", radius=1.0, bounds=(-1.0, 1.0), tol=1e-4))]
#[allow(clippy::too_many_arguments)]
fn gelfand_leray(
    py: Python<'_>,
    f: &PyPoly,
    s: Vec<f64>,
    alpha: Option<&PyPoly>,
    domain_name: &str,
    radius: f64,
    bounds: (f64, f64),
    tol: f64,
) -> PyResult<Py<PyAny>> {
    let k = f.inner.arity();
    let alpha = alpha.map(|a| a.inner.clone()).unwrap_or_else(|| MultiPoly::one(k));
    let d = domain(domain_name, k, radius, bounds)?;
    let opts = GlOptions { tol, ..GlOptions::default() };
    let r = ok(py.detach(|| gelfand_leray_j(&f.inner, &alpha, &d, &s, &opts)))?;
    report(py, &r)
}

#[pyfunction]
fn asymptotic_fit(py: Python<'_>, samples: Vec<(f64, f64)>) -> PyResult<Py<PyAny>> {
    report(py, &ok(fit_samples(&samples))?)
}

#[pyfunction]
fn mellin(samples: Vec<(f64, f64)>, z: Vec<f64>) -> PyResult<Vec<f64>> {
    ok(mellin_transform(&samples, &z))
}

#[pyfunction]
#[pyo3(signature = (f, m, eps, h=None, domain_name="disk", radius=1.0, bounds=(-1.0, 1.0), tol=1e-4))]
#[allow(clippy::too_many_arguments)]
fn leray(
    py: Python<'_>,
    f: &PyPoly,
    m: u32,
    eps: Vec<f64>,
    h: Option<&PyPoly>,
    domain_name: &str,
    radius: f64,
    bounds: (f64, f64),
    tol: f64,
) -> PyResult<Py<PyAny>> {
    let k = f.inner.arity();
    let h = h.map(|a| a.inner.clone()).unwrap_or_else(|| MultiPoly::one(k));
    let d = domain(domain_name, k, radius, bounds)?;
    let opts = GlOptions { tol, ..GlOptions::default() };
    let r = ok(py.detach(|| leray_i_epsilon(&f.inner, &h, m, &d, &eps, &opts)))?;
    report(py, &r)
}

#[pymodule]
pub fn feynpar(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("FeynparError", py.get_type::<FeynparError>())?;
    m.add("ValidationError", py.get_type::<ValidationError>())?;
    m.add("ToleranceError", py.get_type::<ToleranceError>())?;
    m.add("PreconditionError", py.get_type::<PreconditionError>())?;
    m.add_class::<PyGraph>()?;
    m.add_class::<PyPoly>()?;
    m.add_class::<PySlice>()?;
    for f in [
        wrap_pyfunction!(milnor, m)?,
        wrap_pyfunction!(feynman_subspace, m)?,
        wrap_pyfunction!(case_table, m)?,
        wrap_pyfunction!(case_table_slice, m)?,
        wrap_pyfunction!(coproduct, m)?,
        wrap_pyfunction!(antipode, m)?,
        wrap_pyfunction!(birkhoff, m)?,
        wrap_pyfunction!(renormalize, m)?,
        wrap_pyfunction!(connection, m)?,
        wrap_pyfunction!(integrate, m)?,
        wrap_pyfunction!(dimreg, m)?,
        wrap_pyfunction!(log_zeta, m)?,
        wrap_pyfunction!(identity_check, m)?,
        wrap_pyfunction!(gelfand_leray, m)?,
        wrap_pyfunction!(asymptotic_fit, m)?,
        wrap_pyfunction!(mellin, m)?,
        wrap_pyfunction!(leray, m)?,
    ] {
        m.add_function(f)?;
    }
    Ok(())
}
