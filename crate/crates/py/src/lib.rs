//! Python bindings for the fibaut decision procedure.

use std::path::PathBuf;

use fibaut::automata as io;
use fibaut::linrep::{self, LinRep};
use fibaut::numeration;
use fibaut::session::{self, Outcome, Settings};
use fibaut::{seqs, Error};
use num_bigint::{BigInt, BigUint};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(pyfibaut, FibautError, PyException);

fn err(e: Error) -> PyErr {
    FibautError::new_err(e.to_string())
}

/// A DFA or DFAO over Zeckendorf tuples, read most significant digit first.
#[pyclass(name = "Automaton", module = "pyfibaut", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyAutomaton(fibaut::Automaton);

#[pymethods]
impl PyAutomaton {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        io::deserialize(text).map(Self).map_err(err)
    }

    fn to_text(&self) -> String {
        io::serialize(&self.0)
    }

    fn to_dot(&self) -> String {
        io::export_dot(&self.0)
    }

    #[getter]
    fn arity(&self) -> usize {
        self.0.arity()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind().name()
    }

    #[getter]
    fn num_states(&self) -> usize {
        self.0.num_states()
    }

    #[getter]
    fn live_states(&self) -> usize {
        self.0.live_state_count()
    }

    fn accepts(&self, values: Vec<u64>) -> PyResult<bool> {
        if values.len() != self.0.arity() {
            return Err(err(Error::ArityMismatch { expected: self.0.arity(), found: values.len() }));
        }
        Ok(self.0.accepts_values(&values))
    }

    /// Output of a one-track automaton on the representation of `n`.
    fn value(&self, n: u64) -> PyResult<u32> {
        if self.0.arity() != 1 {
            return Err(err(Error::ArityMismatch { expected: 1, found: self.0.arity() }));
        }
        Ok(self.0.value(n))
    }

    fn minimize(&self) -> Self {
        Self(self.0.minimize())
    }

    fn equivalent(&self, other: &Self) -> PyResult<bool> {
        self.0.equivalent(&other.0).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Automaton(kind={}, arity={}, states={})", self.0.kind().name(), self.0.arity(), self.0.num_states())
    }
}

/// One executed script command.
#[pyclass(name = "Outcome", module = "pyfibaut", frozen, get_all)]
struct PyOutcome {
    line: usize,
    command: &'static str,
    name: String,
    truth: Option<bool>,
    arity: usize,
    states: usize,
    millis: u128,
}

impl From<&Outcome> for PyOutcome {
    fn from(o: &Outcome) -> Self {
        Self {
            line: o.line,
            command: o.command,
            name: o.name.clone(),
            truth: o.truth,
            arity: o.arity,
            states: o.states,
            millis: o.millis,
        }
    }
}

#[pymethods]
impl PyOutcome {
    fn __repr__(&self) -> String {
        match self.truth {
            Some(t) => format!("Outcome({} {}: {})", self.command, self.name, if t { "TRUE" } else { "FALSE" }),
            None => format!("Outcome({} {}: arity {}, {} states)", self.command, self.name, self.arity, self.states),
        }
    }
}

/// Named automata, builtins built on demand, and the script interpreter.
#[pyclass(name = "Session", module = "pyfibaut", unsendable)]
struct PySession(session::Session);

#[pymethods]
impl PySession {
    #[new]
    #[pyo3(signature = (store=None, rebuild=false))]
    fn new(store: Option<PathBuf>, rebuild: bool) -> PyResult<Self> {
        let settings = Settings { rebuild, ..Settings::default() };
        match store {
            Some(dir) => session::Session::with_store(dir, settings).map(Self).map_err(err),
            None => Ok(Self(session::Session::new(settings))),
        }
    }

    fn names(&self) -> Vec<String> {
        self.0.names()
    }

    fn get(&mut self, name: &str) -> PyResult<PyAutomaton> {
        self.0.get(name).map(PyAutomaton).map_err(err)
    }

    fn define(&mut self, name: &str, formula: &str) -> PyResult<PyAutomaton> {
        self.0.define(name, formula).map(PyAutomaton).map_err(err)
    }

    fn insert(&mut self, name: &str, automaton: &PyAutomaton) -> PyResult<()> {
        self.0.insert(name, automaton.0.clone(), false).map_err(err)
    }

    fn eval(&mut self, formula: &str) -> PyResult<bool> {
        self.0.eval(formula).map_err(err)
    }

    fn run_script(&mut self, source: &str) -> PyResult<Vec<PyOutcome>> {
        let report = self.0.run_script(source).map_err(err)?;
        Ok(report.outcomes.iter().map(PyOutcome::from).collect())
    }
}

/// A linear representation over a named alphabet.
#[pyclass(name = "LinRep", module = "pyfibaut", frozen)]
struct PyLinRep(LinRep);

#[pymethods]
impl PyLinRep {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        LinRep::from_text(text).map(Self).map_err(err)
    }

    #[staticmethod]
    fn carlitz() -> Self {
        Self(linrep::carlitz_linrep())
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Evaluate on a word given as a string of letters.
    fn evaluate(&self, word: &str) -> PyResult<BigInt> {
        self.0.evaluate_str(word).map_err(err)
    }

    fn subtract(&self, other: &Self) -> PyResult<Self> {
        self.0.subtract(&other.0).map(Self).map_err(err)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

/// Zeckendorf digits of `n`, most significant first.
#[pyfunction]
fn encode(n: BigUint) -> Vec<u32> {
    numeration::encode(&n).into_digits().into_iter().map(u32::from).collect()
}

#[pyfunction]
fn decode(digits: Vec<u8>) -> PyResult<BigUint> {
    if !numeration::is_valid_digits(&digits) {
        return Err(FibautError::new_err("digits must be 0/1 with no two adjacent 1s"));
    }
    Ok(numeration::decode(&digits))
}

/// First `n` terms of a reference sequence computed directly.
#[pyfunction]
fn oracle_table(name: &str, n: usize) -> PyResult<Vec<i128>> {
    seqs::table(name, n).ok_or_else(|| err(Error::UnknownAutomaton(name.to_string())))
}

/// Carlitz count c(u) for a nonempty word over {b, d}.
#[pyfunction]
fn carlitz(word: &str) -> PyResult<BigInt> {
    linrep::carlitz_c(word).map_err(err)
}

#[pymodule]
fn pyfibaut(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FibautError", m.py().get_type::<FibautError>())?;
    m.add_class::<PyAutomaton>()?;
    m.add_class::<PyOutcome>()?;
    m.add_class::<PySession>()?;
    m.add_class::<PyLinRep>()?;
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(decode, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_table, m)?)?;
    m.add_function(wrap_pyfunction!(carlitz, m)?)?;
    Ok(())
}
