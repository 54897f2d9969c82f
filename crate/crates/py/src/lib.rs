//! Python bindings: instances, fronts, colorings and the main checks.
//! Structured results come back as plain dicts and lists.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;

use ramsey_canon::axioms::{check_axioms, check_pigeonhole, Axiom, ColoringSweep};
use ramsey_canon::canonize::canonical_ramsey_number;
use ramsey_canon::cli::{self, canonize_with_oracle};
use ramsey_canon::colorings::{generate, ColoringSpec};
use ramsey_canon::fronts::{self, Front, FrontFile};
use ramsey_canon::instance::InstanceSpec;
use ramsey_canon::mixing::{mixing_table as table_at, transitivity_check, MixContext};
use ramsey_canon::report::RunConfig;
use ramsey_canon::spaces::{EllentuckParams, FinParams, TreeParams};
use ramsey_canon::{Atom, Error, InstanceKind};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Input(_) | Error::Domain(_) | Error::Parameter(_) | Error::Range { .. } | Error::InstanceMismatch(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    PyModule::import(py, "json")?.call_method1("loads", (text,))
}

/// A finite instance with its catalog of reducts.
#[pyclass(name = "Space", frozen)]
struct PySpace {
    spec: InstanceSpec,
    inner: ramsey_canon::Space,
}

impl PySpace {
    fn build(spec: InstanceSpec) -> PyResult<Self> {
        let inner = spec.build().map_err(py_err)?;
        Ok(PySpace { spec, inner })
    }
}

fn run_config(space: &ramsey_canon::Space, spec: &InstanceSpec, mu: usize, seed: u64) -> RunConfig {
    let mut c = RunConfig::for_space(space).with_mu(mu).with_seed(seed);
    c.span_cap = spec.span_cap();
    c
}

#[pymethods]
impl PySpace {
    #[staticmethod]
    fn ellentuck(n: usize) -> PyResult<Self> {
        Self::build(InstanceSpec::Ellentuck(EllentuckParams { n }))
    }

    #[staticmethod]
    #[pyo3(signature = (blocks, span_cap=None))]
    fn fin(blocks: usize, span_cap: Option<usize>) -> PyResult<Self> {
        Self::build(InstanceSpec::Fin(FinParams {
            span_cap,
            ..FinParams::singletons(blocks)
        }))
    }

    #[staticmethod]
    fn tree(branching: usize, height: usize) -> PyResult<Self> {
        Self::build(InstanceSpec::Tree(TreeParams { branching, height }))
    }

    /// Reads an instance description file.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Self::build(InstanceSpec::load(&path).map_err(py_err)?)
    }

    #[getter]
    fn kind(&self) -> String {
        self.spec.kind().to_string()
    }

    fn __len__(&self) -> usize {
        self.inner.catalog().len()
    }

    fn __repr__(&self) -> String {
        format!("Space({}, {} reducts)", self.spec.kind(), self.inner.catalog().len())
    }

    /// Approximations of length `n`.
    fn uniform_front(&self, n: usize) -> PyResult<PyFront> {
        let front = fronts::uniform_front(&self.inner, n).map_err(py_err)?;
        Ok(PyFront {
            space: self.inner.clone(),
            spec: self.spec.clone(),
            inner: front,
        })
    }

    /// Axioms A1-A3 plus the pigeonhole sweep; one report dict each.
    #[pyo3(signature = (max_len=2, samples=200, seed=0))]
    fn verify_axioms<'py>(
        &self,
        py: Python<'py>,
        max_len: usize,
        samples: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let config = run_config(&self.inner, &self.spec, 1, seed);
        let mut reports: Vec<_> = Axiom::ALL
            .iter()
            .map(|&a| check_axioms(&self.inner, a, &config))
            .collect();
        let sweep = match self.spec.kind() {
            InstanceKind::Ellentuck => ColoringSweep::Exhaustive {
                max_extensions: 12,
                fallback: samples,
            },
            _ => ColoringSweep::Random { count: samples },
        };
        reports.push(check_pigeonhole(&self.inner, max_len, sweep, &config));
        to_py(py, &reports)
    }
}

/// A front on the top reduct of a space.
#[pyclass(name = "Front", frozen)]
struct PyFront {
    space: ramsey_canon::Space,
    spec: InstanceSpec,
    inner: Front,
}

#[pymethods]
impl PyFront {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Members as lists of blocks, each a list of atoms.
    fn members(&self) -> Vec<Vec<Vec<Atom>>> {
        FrontFile::from_front(&self.inner, None).members
    }

    /// Coloring from a generator name (`min`, `union`, `random`, ...).
    #[pyo3(signature = (generator, seed=0))]
    fn coloring(&self, generator: &str, seed: u64) -> PyResult<PyColoring> {
        let spec = match generator {
            "random" => ColoringSpec::random(seed),
            other => other.parse().map_err(py_err)?,
        };
        Ok(PyColoring {
            inner: generate(&self.inner, &spec),
        })
    }

    /// Coloring from one label per member, in `members()` order.
    fn coloring_from_labels(&self, labels: Vec<i64>) -> PyResult<PyColoring> {
        if labels.len() != self.inner.len() {
            return Err(PyValueError::new_err(format!(
                "expected {} labels, got {}",
                self.inner.len(),
                labels.len()
            )));
        }
        Ok(PyColoring {
            inner: fronts::Coloring::from_labels(labels),
        })
    }

    /// Runs the guided canonization; `oracle=True` also compares with brute force.
    #[pyo3(signature = (coloring, mu=1, seed=0, retries=3, depth_budget=8, oracle=false))]
    #[allow(clippy::too_many_arguments)]
    fn canonize<'py>(
        &self,
        py: Python<'py>,
        coloring: &PyColoring,
        mu: usize,
        seed: u64,
        retries: usize,
        depth_budget: usize,
        oracle: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let mut config = run_config(&self.space, &self.spec, mu, seed);
        config.retries = retries;
        config.depth_budget = depth_budget;
        let ctx = MixContext::new(&self.space, &self.inner, &coloring.inner, mu).map_err(py_err)?;
        let report = canonize_with_oracle(&ctx, oracle, &config).map_err(py_err)?;
        to_py(py, &report)
    }

    /// Fused mixing table plus the non-transitive triples found in it.
    #[pyo3(signature = (coloring, mu=1, depth_budget=8))]
    fn mixing_table<'py>(
        &self,
        py: Python<'py>,
        coloring: &PyColoring,
        mu: usize,
        depth_budget: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let ctx = MixContext::new(&self.space, &self.inner, &coloring.inner, mu).map_err(py_err)?;
        let table = table_at(&ctx, &self.inner.scope, depth_budget).map_err(py_err)?;
        let tr = transitivity_check(&table);
        to_py(
            py,
            &serde_json::json!({ "table": table, "transitivity": tr, "render": table.render() }),
        )
    }

    fn __repr__(&self) -> String {
        format!("Front({} members on {})", self.inner.len(), self.spec.kind())
    }
}

#[pyclass(name = "Coloring", frozen)]
struct PyColoring {
    inner: fronts::Coloring,
}

#[pymethods]
impl PyColoring {
    /// Class of each member, numbered by first occurrence.
    #[getter]
    fn kernel(&self) -> Vec<usize> {
        self.inner.kernel().to_vec()
    }

    #[getter]
    fn classes(&self) -> usize {
        self.inner.classes()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Least N such that every kernel on N-sets of N points is canonical on some target-set.
#[pyfunction]
#[pyo3(signature = (arity, target, budget=5_000_000))]
fn er_number<'py>(py: Python<'py>, arity: usize, target: usize, budget: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &canonical_ramsey_number(arity, target, budget).map_err(py_err)?)
}

/// Runs the command line tool in-process; returns `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, Option<String>, Option<String>) {
    let o = cli::run(std::iter::once("ramsey-canon".to_string()).chain(args));
    (o.code, o.stdout, o.stderr)
}

#[pymodule]
fn ramsey_canon_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpace>()?;
    m.add_class::<PyFront>()?;
    m.add_class::<PyColoring>()?;
    m.add_function(wrap_pyfunction!(er_number, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
