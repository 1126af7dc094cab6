//! Python bindings: parse `.dkb` text and run the reasoning pipeline.
//!
//! ```python
//! import pydelite
//! kb = pydelite.parse("D: A [= B.\nA(c).\nnot B(c).")
//! kb.exception_safe()        # True
//! kb.models()[0].overrides   # ['A [= B @ c']
//! kb.entails("B(c)")         # False
//! ```

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use delite::dkbtext::{parse_dkb, serialize_dkb};
use delite::dlprog::assemble_program;
use delite::kb::Args;
use delite::reason::{self, ConjunctiveQuery, Mode, Prepared};
use delite::safety::render_report;

fn to_value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// One answer set: the overridden axiom instances and the derived
/// instance-level facts.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
pub struct Model {
    #[pyo3(get)]
    pub overrides: Vec<String>,
    #[pyo3(get)]
    pub facts: Vec<String>,
}

#[pymethods]
impl Model {
    fn __repr__(&self) -> String {
        format!("Model(overrides={:?}, facts={} literals)", self.overrides, self.facts.len())
    }
}

/// A parsed and normalized knowledge base.
#[pyclass]
pub struct KnowledgeBase {
    prepared: Prepared,
}

impl KnowledgeBase {
    fn chi_strings(&self, chi: &[delite::kb::ClashingAssumption]) -> Vec<String> {
        let v = &self.prepared.normalized.vocab;
        chi.iter()
            .map(|ca| {
                let origin = self.prepared.trace.origin_of(ca.axiom);
                let origin = origin.strip_prefix("D: ").unwrap_or(origin);
                let args = match ca.args {
                    Args::Unary(e) => v.individual_name(e).to_string(),
                    Args::Binary(e1, e2) => {
                        format!("{},{}", v.individual_name(e1), v.individual_name(e2))
                    }
                };
                format!("{origin} @ {args}")
            })
            .collect()
    }
}

#[pymethods]
impl KnowledgeBase {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let k = parse_dkb(text).map_err(to_value_err)?;
        Ok(KnowledgeBase { prepared: Prepared::new(&k) })
    }

    /// The normalized knowledge base in `.dkb` syntax.
    fn normalized(&self) -> String {
        serialize_dkb(&self.prepared.normalized)
    }

    fn exception_safe(&self) -> bool {
        self.prepared.safety.exception_safe
    }

    fn recursive(&self) -> bool {
        self.prepared.safety.recursive
    }

    /// Chain bound as a string: a number or "unbounded".
    fn chain_bound(&self) -> Option<String> {
        self.prepared.safety.chain_bound.map(|b| b.to_string())
    }

    /// Human-readable safety report.
    fn safety_report(&self) -> String {
        render_report(&self.prepared.safety, &self.prepared.normalized.vocab)
    }

    fn is_satisfiable(&self) -> PyResult<bool> {
        // Satisfiability needs no safety gate; run on the original input.
        let text = serialize_dkb(&self.prepared.normalized);
        let k = parse_dkb(&text).map_err(to_value_err)?;
        reason::is_satisfiable(&k).map_err(to_runtime_err)
    }

    /// The datalog program text for the normalized knowledge base.
    fn compile(&self) -> PyResult<String> {
        let program = assemble_program(&self.prepared.normalized).map_err(to_runtime_err)?;
        Ok(delite::dlprog::emit_text(&program, &self.prepared.normalized.vocab))
    }

    /// All answer sets with their exception sets.
    fn models(&self) -> PyResult<Vec<Model>> {
        let sets = reason::models(&self.prepared, None).map_err(to_runtime_err)?;
        let v = &self.prepared.normalized.vocab;
        Ok(sets
            .iter()
            .map(|s| {
                let mut facts: Vec<String> = s
                    .literals
                    .iter()
                    .filter_map(|lit| {
                        let neg = if lit.strong_neg { "not " } else { "" };
                        let name = |c: &delite::dlprog::DConst| c.display(v).to_string();
                        match lit.pred {
                            delite::dlprog::Pred::Instd => Some(format!(
                                "{neg}{}({})",
                                name(&lit.args[1]),
                                name(&lit.args[0])
                            )),
                            delite::dlprog::Pred::Tripled => Some(format!(
                                "{neg}{}({},{})",
                                name(&lit.args[1]),
                                name(&lit.args[0]),
                                name(&lit.args[2])
                            )),
                            _ => None,
                        }
                    })
                    .collect();
                facts.sort();
                Model { overrides: self.chi_strings(&s.chi), facts }
            })
            .collect())
    }

    /// Cautious (default) or brave entailment of a ground assertion such as
    /// `"DeptMember(alice)"` or `"not hasCourse(bob,alice)"`.
    #[pyo3(signature = (assertion, mode = "cautious"))]
    fn entails(&self, assertion: &str, mode: &str) -> PyResult<bool> {
        let mode = match mode {
            "cautious" => Mode::Cautious,
            "brave" => Mode::Brave,
            other => return Err(PyValueError::new_err(format!("unknown mode `{other}`"))),
        };
        let q = reason::parse_assertion_query(assertion, &self.prepared.normalized)
            .map_err(to_value_err)?;
        reason::entails(&self.prepared, &q, mode)
            .map(|r| r.verdict)
            .map_err(to_runtime_err)
    }

    /// Certain answers of a conjunctive query, e.g.
    /// `"?(x) :- DeptMember(x), hasCourse(x,y)."`; a Boolean query returns
    /// `[[]]` when it holds and `[]` otherwise.
    #[pyo3(signature = (query, depth = None))]
    fn certain_answers(&self, query: &str, depth: Option<usize>) -> PyResult<Vec<Vec<String>>> {
        let q = ConjunctiveQuery::parse(query, &self.prepared.normalized).map_err(to_value_err)?;
        let answers =
            reason::certain_answers(&self.prepared, &q, depth).map_err(to_runtime_err)?;
        let v = &self.prepared.normalized.vocab;
        Ok(answers
            .tuples
            .iter()
            .map(|t| t.iter().map(|i| v.individual_name(*i).to_string()).collect())
            .collect())
    }

    fn __repr__(&self) -> String {
        let k = &self.prepared.normalized;
        format!(
            "KnowledgeBase({} concepts, {} roles, {} individuals, {} statements)",
            k.vocab.concept_count(),
            k.vocab.role_count(),
            k.vocab.individual_count(),
            k.statement_count(),
        )
    }
}

/// Parse `.dkb` text into a [`KnowledgeBase`].
#[pyfunction]
fn parse(text: &str) -> PyResult<KnowledgeBase> {
    KnowledgeBase::new(text)
}

#[pymodule]
fn pydelite(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<KnowledgeBase>()?;
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    Ok(())
}
