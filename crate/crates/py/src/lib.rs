#![allow(clippy::useless_conversion)]

use std::sync::Arc;

use crystfib::atlas::Atlas;
use crystfib::fiberclass::{classify_2d, fibration_rows};
use crystfib::groupcore::{
    betti1, center, close_generators, torus_bundle_base, transfer_kernel, SpaceGroup,
};
use crystfib::normsub::is_reducible;
use crystfib::ratlin::GramForm;
use crystfib::symparse::{format_symop, parse_symop};
use crystfib::verify;
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Bundled catalog of plane and space groups.
#[pyclass(name = "Atlas", module = "crystfib")]
struct PyAtlas {
    inner: Atlas,
}

#[pymethods]
impl PyAtlas {
    #[new]
    fn new() -> PyResult<Self> {
        Ok(PyAtlas {
            inner: Atlas::load_default().map_err(value_err)?,
        })
    }

    /// Merge an extra catalog given as text.
    #[pyo3(signature = (text, source = "python"))]
    fn extend(&mut self, text: &str, source: &str) -> PyResult<()> {
        self.inner.extend_from_text(text, source).map_err(value_err)
    }

    fn ids(&self, dim: usize) -> Vec<String> {
        self.inner
            .ids(dim)
            .iter()
            .map(|id| id.to_string())
            .collect()
    }

    fn name(&self, id: &str) -> PyResult<String> {
        let rid = self
            .inner
            .resolve(id)
            .map_err(|e| PyKeyError::new_err(e.to_string()))?;
        Ok(self.inner.name(rid).to_string())
    }

    fn get(&self, id: &str) -> PyResult<PyGroup> {
        let rid = self
            .inner
            .resolve(id)
            .map_err(|e| PyKeyError::new_err(e.to_string()))?;
        let g = self
            .inner
            .get(id)
            .map_err(|e| PyKeyError::new_err(e.to_string()))?;
        Ok(PyGroup {
            inner: g,
            label: rid.to_string(),
        })
    }

    /// Run a verification suite; returns `(passed, report)`.
    #[pyo3(signature = (suite, bound = 2, seed = 1, samples = 200))]
    fn verify(
        &self,
        py: Python<'_>,
        suite: &str,
        bound: u32,
        seed: u64,
        samples: usize,
    ) -> PyResult<(bool, String)> {
        let report = py.allow_threads(|| match suite {
            "2d" => Ok(verify::suite_2d(&self.inner)),
            "table1" => Ok(verify::suite_table1(&self.inner, bound)),
            "props" => Ok(verify::suite_props(&self.inner, seed, samples)),
            other => Err(format!(
                "unknown suite '{other}'; expected 2d, table1 or props"
            )),
        });
        let report = report.map_err(PyValueError::new_err)?;
        Ok((report.passed(), report.to_string()))
    }

    fn __len__(&self) -> usize {
        self.inner.all_ids().len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Atlas({} groups from {})",
            self.inner.all_ids().len(),
            self.inner.source()
        )
    }
}

/// A crystallographic group acting on Euclidean 2- or 3-space.
#[pyclass(name = "Group", module = "crystfib", frozen)]
struct PyGroup {
    inner: Arc<SpaceGroup>,
    label: String,
}

#[pymethods]
impl PyGroup {
    /// Close symmetry operations such as `"-x,y+1/2"` into a group with the
    /// standard metric.
    #[staticmethod]
    #[pyo3(signature = (dim, ops, label = "custom"))]
    fn from_ops(dim: usize, ops: Vec<String>, label: &str) -> PyResult<Self> {
        let gens = ops
            .iter()
            .map(|s| parse_symop(s, dim))
            .collect::<Result<Vec<_>, _>>()
            .map_err(value_err)?;
        let closure =
            close_generators(dim, &GramForm::identity(dim), &gens, label).map_err(value_err)?;
        Ok(PyGroup {
            inner: Arc::new(closure.group),
            label: label.to_string(),
        })
    }

    #[getter]
    fn label(&self) -> &str {
        &self.label
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Order of the point group.
    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    fn coset_ops(&self) -> Vec<String> {
        (0..self.inner.order())
            .map(|i| format_symop(&self.inner.coset_rep(i)))
            .collect()
    }

    fn betti(&self) -> usize {
        betti1(&self.inner)
    }

    fn center_span(&self) -> String {
        center(&self.inner).span().to_string()
    }

    fn transfer_kernel_span(&self) -> String {
        transfer_kernel(&self.inner).span().to_string()
    }

    /// `(fiber, base)` symbols of the torus bundle, `None` where undefined.
    fn torus_bundle(&self) -> PyResult<(Option<String>, Option<String>)> {
        let tb = torus_bundle_base(&self.inner).map_err(value_err)?;
        Ok((
            tb.fiber.map(|c| c.symbol().to_string()),
            tb.base().map(|c| c.symbol().to_string()),
        ))
    }

    fn is_reducible(&self) -> bool {
        is_reducible(&self.inner)
    }

    /// Conway symbol of a plane group.
    fn classify(&self) -> PyResult<String> {
        if self.inner.dim() != 2 {
            return Err(PyValueError::new_err("classify expects a plane group"));
        }
        Ok(classify_2d(&self.inner)
            .map_err(value_err)?
            .symbol()
            .to_string())
    }

    /// One dict per fibration class.
    #[pyo3(signature = (bound = 2))]
    fn fibrations<'py>(&self, py: Python<'py>, bound: u32) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let g = self.inner.clone();
        let rows = py
            .allow_threads(|| fibration_rows(&g, bound))
            .map_err(value_err)?;
        rows.iter()
            .map(|r| {
                let s = r.summary();
                let d = PyDict::new_bound(py);
                d.set_item("seifert_fiber", s.seifert_fiber.symbol())?;
                d.set_item("seifert_base", s.seifert_base.symbol())?;
                d.set_item("seifert_split", s.seifert_split)?;
                d.set_item("cofiber", s.cofiber.symbol())?;
                d.set_item("base", s.base.symbol())?;
                d.set_item("coseifert_split", s.coseifert_split)?;
                d.set_item("index", s.index)?;
                d.set_item("k_span", s.k_span)?;
                d.set_item("n_span", s.n_span)?;
                Ok(d)
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Group({}, dim={}, order={})",
            self.label,
            self.inner.dim(),
            self.inner.order()
        )
    }
}

/// Normalised text of a symmetry operation.
#[pyfunction]
fn normalize_symop(op: &str, dim: usize) -> PyResult<String> {
    Ok(format_symop(&parse_symop(op, dim).map_err(value_err)?))
}

#[pymodule]
#[pyo3(name = "crystfib")]
fn crystfib_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAtlas>()?;
    m.add_class::<PyGroup>()?;
    m.add_function(wrap_pyfunction!(normalize_symop, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
