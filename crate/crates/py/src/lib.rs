//! Python bindings. Functions cross the boundary as lists of values over the
//! top faces, in the order returned by `Complex.faces()`.

use std::collections::BTreeMap;

use hdx_core::calculus::{globalness, influence_profile, laplacian};
use hdx_core::decomposition::{es_all, low_degree};
use hdx_core::generators::{
    gen_eta_correlated, gen_function, gen_perturbed_product, gen_product, gen_sparse_random, FnSpec, Marginals,
};
use hdx_core::harness::{run_suite, write_jsonl, SuiteConfig, CATALOG};
use hdx_core::walks::{noise_direct, stability, updown_direct};
use hdx_core::{Fn, Subset, WeightedComplex};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn subset(ix: &[usize]) -> Subset {
    Subset::from_indices(ix.iter().copied())
}

#[pyclass(name = "Complex", frozen)]
struct PyComplex {
    mu: WeightedComplex,
}

impl PyComplex {
    fn func(&self, values: Vec<f64>) -> PyResult<Fn> {
        self.mu.function(self.mu.full(), values).map_err(err)
    }
}

#[pymethods]
impl PyComplex {
    /// Product measure; `marginals` is "uniform" or "random".
    #[staticmethod]
    #[pyo3(signature = (sizes, marginals = "uniform", seed = 0))]
    fn product(sizes: Vec<usize>, marginals: &str, seed: u64) -> PyResult<Self> {
        let m = match marginals {
            "uniform" => Marginals::Uniform,
            "random" => Marginals::Random,
            other => return Err(err(format!("unknown marginals {other:?}"))),
        };
        Ok(Self { mu: gen_product(&sizes, &m, seed).map_err(err)? })
    }

    #[staticmethod]
    fn eta_correlated(eta: f64) -> PyResult<Self> {
        Ok(Self { mu: gen_eta_correlated(eta).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (sizes, gamma, seed = 0))]
    fn perturbed_product(sizes: Vec<usize>, gamma: f64, seed: u64) -> PyResult<Self> {
        Ok(Self { mu: gen_perturbed_product(&sizes, gamma, seed).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (sizes, density, seed = 0))]
    fn sparse_random(sizes: Vec<usize>, density: f64, seed: u64) -> PyResult<Self> {
        Ok(Self { mu: gen_sparse_random(&sizes, density, seed).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { mu: WeightedComplex::from_json(text).map_err(err)? })
    }

    fn to_json(&self) -> String {
        self.mu.to_json()
    }

    #[getter]
    fn k(&self) -> usize {
        self.mu.k()
    }

    fn __len__(&self) -> usize {
        self.mu.len()
    }

    fn faces(&self) -> Vec<Vec<u32>> {
        self.mu.faces().map(<[u32]>::to_vec).collect()
    }

    fn weights(&self) -> Vec<f64> {
        self.mu.weights().to_vec()
    }

    /// Certified ε: the largest deflated second singular value over link skeletons.
    fn certify(&self) -> f64 {
        self.mu.certificate().epsilon
    }

    /// A generated function, from a JSON spec such as `{"kind": "dictator", "coord": 0, "value": 1}`.
    #[pyo3(signature = (spec, seed = 0))]
    fn function(&self, spec: &str, seed: u64) -> PyResult<Vec<f64>> {
        let mut v: serde_json::Value = serde_json::from_str(spec).map_err(err)?;
        if let Some(obj) = v.as_object_mut() {
            obj.entry("seed").or_insert(seed.into());
        }
        let spec: FnSpec = serde_json::from_value(v).map_err(err)?;
        let f = gen_function(&self.mu, &spec).map_err(err)?;
        Ok(self.mu.lift(&f).map_err(err)?.into_values())
    }

    fn expectation(&self, values: Vec<f64>) -> PyResult<f64> {
        self.mu.expectation(&self.func(values)?).map_err(err)
    }

    fn norm2(&self, values: Vec<f64>) -> PyResult<f64> {
        Ok(self.mu.norm2(&self.func(values)?))
    }

    /// Efron-Stein components keyed by subset bitmask, each lifted to the top faces.
    fn decompose(&self, values: Vec<f64>) -> PyResult<BTreeMap<u32, Vec<f64>>> {
        let fam = es_all(&self.mu, &self.func(values)?).map_err(err)?;
        fam.iter().map(|(s, c)| Ok((s.bits(), self.mu.lift(c).map_err(err)?.into_values()))).collect()
    }

    fn low_degree(&self, values: Vec<f64>, d: usize) -> PyResult<Vec<f64>> {
        Ok(low_degree(&self.mu, &self.func(values)?, d).map_err(err)?.into_values())
    }

    fn laplacian(&self, values: Vec<f64>, s: Vec<usize>) -> PyResult<Vec<f64>> {
        Ok(laplacian(&self.mu, &self.func(values)?, subset(&s)).map_err(err)?.into_values())
    }

    /// `(point, I, I_trunc)` for every point of the marginal on `s`.
    fn influences(&self, values: Vec<f64>, s: Vec<usize>, d: usize) -> PyResult<Vec<(Vec<u32>, f64, f64)>> {
        let p = influence_profile(&self.mu, &self.func(values)?, subset(&s), d).map_err(err)?;
        Ok(p.rows.into_iter().map(|r| (r.point, r.influence, r.influence_trunc)).collect())
    }

    /// Smallest δ for which the function is `(d, δ)`-global.
    fn globalness(&self, values: Vec<f64>, d: usize) -> PyResult<f64> {
        Ok(globalness(&self.mu, &self.func(values)?, d).map_err(err)?.delta_min)
    }

    fn noise(&self, values: Vec<f64>, rho: f64) -> PyResult<Vec<f64>> {
        Ok(noise_direct(&self.mu, &self.func(values)?, rho).map_err(err)?.into_values())
    }

    fn updown(&self, values: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(updown_direct(&self.mu, &self.func(values)?).map_err(err)?.into_values())
    }

    fn stability(&self, values: Vec<f64>, rho: f64) -> PyResult<f64> {
        stability(&self.mu, &self.func(values)?, rho).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Complex(k={}, faces={})", self.mu.k(), self.mu.len())
    }
}

/// Run a named suite with the default config; returns the JSONL report.
#[pyfunction]
#[pyo3(signature = (name = "default"))]
fn check(name: &str) -> PyResult<String> {
    let run = run_suite(name, &SuiteConfig::default()).map_err(err)?;
    let mut buf = Vec::new();
    write_jsonl(&mut buf, &run.header(), &run.records).map_err(err)?;
    String::from_utf8(buf).map_err(err)
}

/// `(id, kind, statement)` for every check.
#[pyfunction]
fn catalog() -> Vec<(&'static str, &'static str, &'static str)> {
    CATALOG.iter().map(|e| (e.id, e.kind, e.statement)).collect()
}

#[pymodule]
fn hdx(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyComplex>()?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(catalog, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
