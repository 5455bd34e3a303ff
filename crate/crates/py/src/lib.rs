//! Python bindings. Vertices are 0-indexed; edges are `(u, v)` or
//! `(u, v, multiplicity)` tuples.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use cutwidth::compress::{compress_with_stats, CompressOptions};
use cutwidth::format;
use cutwidth::obstructions;
use cutwidth::oracle;
use cutwidth::ordering::{self as ord, make_linked, verify_linked};
use cutwidth::reduce::{reduce_step, ReduceOutcome};
use cutwidth::solver::{cutwidth_decide, cutwidth_exact, Decision};
use cutwidth::{Error, MultiGraph, Ordering};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::StateLimit(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// An undirected multigraph without loops.
#[pyclass(name = "Graph", module = "cutwidth", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: MultiGraph,
}

fn edge_triples(edges: Vec<Vec<usize>>) -> PyResult<Vec<(usize, usize, u32)>> {
    edges
        .into_iter()
        .map(|e| match e.as_slice() {
            [u, v] => Ok((*u, *v, 1)),
            [u, v, m] => Ok((*u, *v, *m as u32)),
            _ => Err(PyValueError::new_err("edges are (u, v) or (u, v, multiplicity)")),
        })
        .collect()
}

fn ordering(perm: Vec<usize>) -> PyResult<Ordering> {
    Ordering::new(perm).map_err(to_py)
}

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (n, edges=Vec::new()))]
    fn new(n: usize, edges: Vec<Vec<usize>>) -> PyResult<Self> {
        let list = edge_triples(edges)?;
        Ok(PyGraph { inner: MultiGraph::build(n, &list).map_err(to_py)? })
    }

    /// Parses the `p cw` text format (1-indexed).
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyGraph { inner: format::parse_graph(text).map_err(to_py)? })
    }

    fn render(&self) -> String {
        format::render_graph(&self.inner)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize, u32)> {
        self.inner.edges().to_vec()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn canonical_code(&self) -> PyResult<Vec<u8>> {
        self.inner.canonical_code().map_err(to_py)
    }

    /// Exact cutwidth and an optimal ordering from the solver.
    fn cutwidth(&self, py: Python<'_>) -> PyResult<(usize, Vec<usize>)> {
        let g = self.inner.clone();
        let (k, tau) = py.detach(move || cutwidth_exact(&g)).map_err(to_py)?;
        Ok((k, tau.into_vec()))
    }

    /// An ordering of width at most `k`, or None.
    fn decide(&self, py: Python<'_>, k: usize) -> PyResult<Option<Vec<usize>>> {
        let g = self.inner.clone();
        Ok(match py.detach(move || cutwidth_decide(&g, k)).map_err(to_py)? {
            Decision::Fits(tau) => Some(tau.into_vec()),
            Decision::TooWide => None,
        })
    }

    /// Brute-force cutwidth by subset dynamic programming.
    fn oracle_cutwidth(&self) -> PyResult<(usize, Vec<usize>)> {
        let (k, tau) = oracle::exact_cutwidth(&self.inner).map_err(to_py)?;
        Ok((k, tau.into_vec()))
    }

    fn width(&self, order: Vec<usize>) -> PyResult<usize> {
        ord::width(&self.inner, &ordering(order)?).map_err(to_py)
    }

    fn cuts(&self, order: Vec<usize>) -> PyResult<Vec<usize>> {
        Ok(ord::cut_sequence(&self.inner, &ordering(order)?).map_err(to_py)?.0)
    }

    /// Rebuilds `order` into one of width at most `k`, or None.
    fn compress(&self, py: Python<'_>, order: Vec<usize>, k: usize) -> PyResult<Option<Vec<usize>>> {
        let sigma = ordering(order)?;
        let g = self.inner.clone();
        let (found, _) = py
            .detach(move || compress_with_stats(&g, &sigma, k, &CompressOptions::default()))
            .map_err(to_py)?;
        Ok(found.map(Ordering::into_vec))
    }

    /// One reduction step: a dict with `outcome` in
    /// {"too_wide", "no_progress", "reduced"}.
    fn reduce<'py>(&self, py: Python<'py>, k: usize) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        match reduce_step(&self.inner, k) {
            ReduceOutcome::TooWide(why) => {
                d.set_item("outcome", "too_wide")?;
                d.set_item("reason", format!("{why:?}"))?;
            }
            ReduceOutcome::NoProgress => d.set_item("outcome", "no_progress")?,
            ReduceOutcome::Reduced { graph, trace, case } => {
                d.set_item("outcome", "reduced")?;
                d.set_item("case", format!("{case:?}"))?;
                d.set_item("graph", PyGraph { inner: graph })?;
                d.set_item("kept", trace.kept)?;
                d.set_item("events", trace.events.len())?;
            }
        }
        Ok(d)
    }

    fn make_linked(&self, order: Vec<usize>) -> PyResult<Vec<usize>> {
        Ok(make_linked(&self.inner, &ordering(order)?).map_err(to_py)?.into_vec())
    }

    fn is_linked(&self, order: Vec<usize>) -> PyResult<bool> {
        Ok(verify_linked(&self.inner, &ordering(order)?))
    }

    /// Fewest edge deletions leaving cutwidth at most `k`.
    fn dcw(&self, k: usize) -> PyResult<(usize, Vec<(usize, usize, u32)>)> {
        oracle::dcw(&self.inner, k).map_err(to_py)
    }

    fn immerses_in(&self, host: &PyGraph, strong: bool) -> PyResult<bool> {
        Ok(oracle::is_immersion(&self.inner, &host.inner, strong).map_err(to_py)?.is_some())
    }

    fn is_obstruction(&self, k: usize) -> PyResult<bool> {
        oracle::is_obstruction(&self.inner, k).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={:?})", self.inner.n(), self.inner.edges())
    }
}

/// Connected obstructions for cutwidth at most `k` up to `max_n` vertices.
#[pyfunction]
#[pyo3(signature = (k, max_n, max_mult=1))]
fn search_obstructions(py: Python<'_>, k: usize, max_n: usize, max_mult: u32) -> PyResult<Vec<PyGraph>> {
    let found = py.detach(move || obstructions::search_obstructions(k, max_n, max_mult)).map_err(to_py)?;
    Ok(found.into_iter().map(|inner| PyGraph { inner }).collect())
}

#[pyfunction]
fn obstruction_size_bound(k: usize) -> String {
    obstructions::obstruction_size_bound(k).to_string()
}

#[pymodule]
#[pyo3(name = "cutwidth")]
fn cutwidth_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(search_obstructions, m)?)?;
    m.add_function(wrap_pyfunction!(obstruction_size_bound, m)?)?;
    Ok(())
}
