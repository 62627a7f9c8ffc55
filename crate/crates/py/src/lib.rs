//! Python bindings: machines, terms, compilation and lockstep verification.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use asmlam::asm::{Inputs, RunOutcome};
use asmlam::compiler::{compile, CompileOptions, CompiledMachine as CoreCompiled};
use asmlam::cosim::{decoration_audit, lockstep};
use asmlam::fsig::FSignature;
use asmlam::normalize::normalize_machine;
use asmlam::reduce::{reduce_leftmost_f, Outcome};
use asmlam::source::{parse_machine, print_machine};
use asmlam::value::Value;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn inputs(m: &asmlam::asm::Machine, raw: Option<BTreeMap<String, String>>) -> PyResult<Inputs> {
    let mut out = Inputs::new();
    for (k, v) in raw.unwrap_or_default() {
        if !m.input_symbols().iter().any(|id| m.symbol_name(*id).as_ref() == k) {
            return Err(err(format!("`{k}` is not an input")));
        }
        out.insert(k, Value::parse(&v).map_err(err)?);
    }
    Ok(out)
}

/// A parsed machine.
#[pyclass(frozen)]
struct Machine {
    inner: asmlam::asm::Machine,
}

#[pymethods]
impl Machine {
    #[staticmethod]
    fn parse(src: &str) -> PyResult<Self> {
        parse_machine(src).map(|inner| Machine { inner }).map_err(err)
    }

    /// Runs the machine; returns `(outcome, steps, trajectory digests)`.
    /// Input values use the literal syntax, e.g. `{"a0": "12"}`.
    #[pyo3(signature = (inputs=None, max_steps=10_000))]
    fn run(&self, inputs: Option<BTreeMap<String, String>>, max_steps: usize) -> PyResult<(String, usize, Vec<String>)> {
        let i = self::inputs(&self.inner, inputs)?;
        let r = self.inner.run(&i, max_steps).map_err(err)?;
        Ok((r.outcome.to_string(), r.steps, r.trajectory.iter().map(|s| s.digest()).collect()))
    }

    /// Output values of a successful run, or `None`.
    #[pyo3(signature = (inputs=None, max_steps=10_000))]
    fn outputs(&self, inputs: Option<BTreeMap<String, String>>, max_steps: usize) -> PyResult<Option<Vec<String>>> {
        let i = self::inputs(&self.inner, inputs)?;
        Ok(match self.inner.run(&i, max_steps).map_err(err)?.outcome {
            RunOutcome::Success { outputs, .. } => Some(outputs.iter().map(Value::to_string).collect()),
            _ => None,
        })
    }

    fn normalize(&self) -> String {
        normalize_machine(&self.inner).display(&self.inner.vocab).to_string()
    }

    #[pyo3(signature = (headroom_k=0, headroom_l=0))]
    fn compile(&self, headroom_k: u64, headroom_l: u64) -> PyResult<CompiledMachine> {
        let opts = CompileOptions { headroom_k, headroom_l, ..CompileOptions::default() };
        compile(&self.inner, &opts).map(|inner| CompiledMachine { inner }).map_err(err)
    }

    fn __str__(&self) -> String {
        print_machine(&self.inner)
    }
}

#[pyclass(frozen)]
struct CompiledMachine {
    inner: CoreCompiled,
}

#[pymethods]
impl CompiledMachine {
    #[getter]
    fn k(&self) -> u64 {
        self.inner.k()
    }

    #[getter]
    fn l(&self) -> u64 {
        self.inner.l()
    }

    fn manifest(&self) -> String {
        self.inner.manifest().to_string()
    }

    fn theta(&self) -> Term {
        Term { inner: self.inner.theta().clone() }
    }

    /// Lockstep co-simulation; returns `(passed, rounds, report text)`.
    #[pyo3(signature = (inputs=None, max_rounds=1_000))]
    fn verify(&self, inputs: Option<BTreeMap<String, String>>, max_rounds: usize) -> PyResult<(bool, usize, String)> {
        let i = self::inputs(&self.inner.machine, inputs)?;
        let rep = lockstep(&self.inner, &i, max_rounds).map_err(err)?;
        Ok((rep.agrees(), rep.rounds.len(), rep.to_string()))
    }
}

/// A λ-term in the text syntax (`\x. M`, `#f`, `[v]`).
#[pyclass(frozen)]
struct Term {
    inner: asmlam::Term,
}

#[pymethods]
impl Term {
    #[staticmethod]
    fn parse(src: &str) -> PyResult<Self> {
        asmlam::Term::parse(src).map(|inner| Term { inner }).map_err(err)
    }

    #[staticmethod]
    fn code(value: &str) -> PyResult<Self> {
        Ok(Term { inner: asmlam::Term::code(Value::parse(value).map_err(err)?) })
    }

    fn size(&self) -> usize {
        self.inner.size()
    }

    /// F-first leftmost reduction over the Boolean signature; returns
    /// `(normal form, beta steps, F steps)`.
    #[pyo3(signature = (max_steps=100_000))]
    fn reduce(&self, max_steps: u64) -> PyResult<(Term, u64, u64)> {
        let r = reduce_leftmost_f(&self.inner, &FSignature::boolean(), max_steps);
        if r.outcome != Outcome::Normal {
            return Err(err(format!("no normal form: {:?}", r.outcome)));
        }
        Ok((Term { inner: r.term }, r.trace.beta_count, r.trace.f_count))
    }

    /// The value this code denotes, if it is one.
    fn value(&self) -> Option<String> {
        self.inner.as_value().map(|v| v.to_string())
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Term({})", self.inner)
    }

    fn __eq__(&self, other: &Term) -> bool {
        self.inner == other.inner
    }
}

/// Rows of the decoration audit as strings.
#[pyfunction]
fn audit() -> Vec<String> {
    decoration_audit().iter().map(|r| r.to_string()).collect()
}

#[pymodule]
fn asmlam_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Machine>()?;
    m.add_class::<CompiledMachine>()?;
    m.add_class::<Term>()?;
    m.add_function(wrap_pyfunction!(audit, m)?)?;
    Ok(())
}
