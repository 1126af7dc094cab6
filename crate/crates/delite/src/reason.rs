//! User-facing reasoning tasks on exception-safe knowledge bases:
//! satisfiability, cautious/brave entailment of ground assertions,
//! justified-exception extraction, and certain-answer conjunctive queries.
//!
//! Entailment runs through the datalog pipeline (answer sets of the
//! translated program). Conjunctive queries instead match inside the
//! oracle's Skolem-term least models, one per justified exception set:
//! the auxiliary constants of the materialization collapse all witnesses
//! of an existential axiom into one individual, which would make joins
//! over unnamed individuals unsound.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::asp::{answer_sets, AnswerSet, AspError};
use crate::dlprog::{assemble_program, output_atom, OutputError, ProgramError};
use crate::kb::{
    minimal_clashing_sets, Assertion, AssertionKind, ClashingAssumption, ClashingSet,
    ConceptAtom, ConceptId, Dkb, IndId, RoleId, SkTerm,
};
use crate::normalize::{normalize, NormalizationTrace};
use crate::oracle::{self, LeastCasModel, OAtom};
use crate::safety::{classify_normalized, ChainBound, SafetyReport};

/// A knowledge base prepared for reasoning: normalized, with its trace and
/// safety classification.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub normalized: Dkb,
    pub trace: NormalizationTrace,
    pub safety: SafetyReport,
}

impl Prepared {
    pub fn new(k: &Dkb) -> Self {
        let (normalized, trace) = normalize(k);
        let safety = classify_normalized(&normalized);
        Prepared { normalized, trace, safety }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Cautious,
    Brave,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Cautious => write!(f, "cautious"),
            Mode::Brave => write!(f, "brave"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EntailmentResult {
    pub verdict: bool,
    pub mode: Mode,
    /// Exception sets of the answer sets supporting (brave) or refuting
    /// (cautious) the verdict.
    pub witnesses: Vec<Vec<ClashingAssumption>>,
    /// The strict part is unsatisfiable: cautious entailment is vacuous.
    pub strict_unsat: bool,
}

#[derive(Debug, Error)]
pub enum ReasonError {
    #[error("knowledge base is not exception safe")]
    NotExceptionSafe(Box<SafetyReport>),
    #[error("reasoning requires the unique name assumption (remove @no-una)")]
    NoUna,
    #[error(transparent)]
    Program(#[from] ProgramError),
    #[error(transparent)]
    Asp(#[from] AspError),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("query error: {0}")]
    Query(String),
}

fn gate(p: &Prepared) -> Result<(), ReasonError> {
    if !p.normalized.una {
        return Err(ReasonError::NoUna);
    }
    if !p.safety.exception_safe {
        return Err(ReasonError::NotExceptionSafe(Box::new(p.safety.clone())));
    }
    Ok(())
}

/// Answer sets of the translated program for a prepared knowledge base.
pub fn models(p: &Prepared, limit: Option<usize>) -> Result<Vec<AnswerSet>, ReasonError> {
    gate(p)?;
    let program = assemble_program(&p.normalized)?;
    Ok(answer_sets(&program, limit)?)
}

/// Does the knowledge base have any model under the defeasible semantics?
/// Every exception being excusable, this holds exactly when the strict part
/// (defeasible axioms dropped) is satisfiable; no safety gate is needed.
pub fn is_satisfiable(k: &Dkb) -> Result<bool, ReasonError> {
    let (normalized, _) = normalize(k);
    let mut strict = normalized;
    strict.defeasible.clear();
    let program = assemble_program(&strict)?;
    Ok(!answer_sets(&program, None)?.is_empty())
}

/// Cautious or brave entailment of a ground assertion.
pub fn entails(p: &Prepared, q: &Assertion, mode: Mode) -> Result<EntailmentResult, ReasonError> {
    let sets = models(p, None)?;
    let lit = output_atom(q)?;
    let ground = crate::asp::GroundLit {
        strong_neg: lit.strong_neg,
        pred: lit.atom.pred,
        args: lit
            .atom
            .args
            .iter()
            .map(|t| match t {
                crate::dlprog::DTerm::Const(c) => *c,
                crate::dlprog::DTerm::Var(_) => unreachable!("output atoms are ground"),
            })
            .collect(),
    };
    if sets.is_empty() {
        return Ok(EntailmentResult {
            verdict: mode == Mode::Cautious,
            mode,
            witnesses: Vec::new(),
            strict_unsat: true,
        });
    }
    let (verdict, witnesses) = match mode {
        Mode::Cautious => {
            let refuting: Vec<Vec<ClashingAssumption>> = sets
                .iter()
                .filter(|s| !s.literals.contains(&ground))
                .map(|s| s.chi.clone())
                .collect();
            (refuting.is_empty(), refuting)
        }
        Mode::Brave => {
            let supporting: Vec<Vec<ClashingAssumption>> = sets
                .iter()
                .filter(|s| s.literals.contains(&ground))
                .map(|s| s.chi.clone())
                .collect();
            (!supporting.is_empty(), supporting)
        }
    };
    Ok(EntailmentResult { verdict, mode, witnesses, strict_unsat: false })
}

/// A justified exception set together with the clashing set witnessed by
/// the answer set for each assumption.
#[derive(Debug, Clone)]
pub struct JustifiedChi {
    pub chi: Vec<ClashingAssumption>,
    pub witnesses: Vec<(ClashingAssumption, ClashingSet)>,
}

/// The justified exception sets, one per answer set, in canonical order.
pub fn justified_assumptions(p: &Prepared) -> Result<Vec<JustifiedChi>, ReasonError> {
    let sets = models(p, None)?;
    let mut out = Vec::new();
    for s in sets {
        let mut witnesses = Vec::new();
        for ca in &s.chi {
            let axiom = &p.normalized.defeasible[ca.axiom.index()].inner;
            let candidates = minimal_clashing_sets(axiom, &ca.args)
                .expect("normal-form defeasible axioms have clashing sets");
            let held = candidates.into_iter().find(|set| {
                set.elements.iter().all(|el| {
                    output_atom(el)
                        .ok()
                        .map(|lit| {
                            let ground = crate::asp::GroundLit {
                                strong_neg: lit.strong_neg,
                                pred: lit.atom.pred,
                                args: lit
                                    .atom
                                    .args
                                    .iter()
                                    .map(|t| match t {
                                        crate::dlprog::DTerm::Const(c) => *c,
                                        crate::dlprog::DTerm::Var(_) => unreachable!(),
                                    })
                                    .collect(),
                            };
                            s.literals.contains(&ground)
                        })
                        .unwrap_or(false)
                })
            });
            if let Some(set) = held {
                witnesses.push((*ca, set));
            }
        }
        out.push(JustifiedChi { chi: s.chi, witnesses });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Conjunctive queries
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QTerm {
    /// Index into the query's variable table.
    Var(usize),
    Const(IndId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryAtom {
    Concept(ConceptId, QTerm),
    Role(RoleId, QTerm, QTerm),
}

/// `Q(x...) = exists y... . atom and ... and atom`
#[derive(Debug, Clone)]
pub struct ConjunctiveQuery {
    /// All variable names; answer variables first.
    pub vars: Vec<String>,
    pub answer_arity: usize,
    pub atoms: Vec<QueryAtom>,
}

impl ConjunctiveQuery {
    /// Parse the query syntax `?(x) :- DeptMember(x), hasCourse(x,y).`
    /// Variables left of `:-` are answer variables, all others are
    /// existential. A Boolean query is written `?() :- ...` or `? :- ...`.
    pub fn parse(text: &str, k: &Dkb) -> Result<ConjunctiveQuery, ReasonError> {
        let err = |m: &str| ReasonError::Query(m.to_string());
        let text = text.trim().trim_end_matches('.');
        let (head, body) = text
            .split_once(":-")
            .ok_or_else(|| err("expected `?(vars) :- atoms`"))?;
        let head = head.trim();
        if !head.starts_with('?') {
            return Err(err("query head must start with `?`"));
        }
        let head_vars = head[1..].trim();
        let head_vars = head_vars
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .unwrap_or(head_vars);
        let mut vars: Vec<String> = Vec::new();
        for v in head_vars.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if vars.iter().any(|x| x == v) {
                return Err(err(&format!("duplicate answer variable `{v}`")));
            }
            vars.push(v.to_string());
        }
        let answer_arity = vars.len();

        let mut atoms = Vec::new();
        // Split body on commas at depth zero.
        let mut parts: Vec<String> = Vec::new();
        let mut depth = 0usize;
        let mut cur = String::new();
        for c in body.chars() {
            match c {
                '(' => {
                    depth += 1;
                    cur.push(c);
                }
                ')' => {
                    depth = depth.saturating_sub(1);
                    cur.push(c);
                }
                ',' if depth == 0 => {
                    parts.push(cur.trim().to_string());
                    cur = String::new();
                }
                _ => cur.push(c),
            }
        }
        if !cur.trim().is_empty() {
            parts.push(cur.trim().to_string());
        }
        if parts.is_empty() {
            return Err(err("query body is empty"));
        }
        for part in parts {
            let (pred, args) = part
                .split_once('(')
                .ok_or_else(|| err(&format!("expected an atom, got `{part}`")))?;
            let pred = pred.trim();
            let args = args
                .trim()
                .strip_suffix(')')
                .ok_or_else(|| err(&format!("missing `)` in `{part}`")))?;
            let args: Vec<&str> = args.split(',').map(str::trim).collect();
            let mut term = |name: &str| -> Result<QTerm, ReasonError> {
                if name.is_empty() {
                    return Err(err("empty term"));
                }
                if let Some(i) = k.vocab.lookup_individual(name) {
                    return Ok(QTerm::Const(i));
                }
                // Anything that is not a known individual is a variable.
                if let Some(pos) = vars.iter().position(|v| v == name) {
                    Ok(QTerm::Var(pos))
                } else {
                    vars.push(name.to_string());
                    Ok(QTerm::Var(vars.len() - 1))
                }
            };
            match args.len() {
                1 => {
                    let c = k
                        .vocab
                        .lookup_concept(pred)
                        .ok_or_else(|| err(&format!("unknown concept `{pred}`")))?;
                    atoms.push(QueryAtom::Concept(c, term(args[0])?));
                }
                2 => {
                    let r = k
                        .vocab
                        .lookup_role(pred)
                        .ok_or_else(|| err(&format!("unknown role `{pred}`")))?;
                    atoms.push(QueryAtom::Role(r, term(args[0])?, term(args[1])?));
                }
                n => return Err(err(&format!("atom `{part}` has {n} arguments"))),
            }
        }
        // Every answer variable must occur in some atom.
        for (i, v) in vars.iter().enumerate().take(answer_arity) {
            let occurs = atoms.iter().any(|a| match a {
                QueryAtom::Concept(_, t) => *t == QTerm::Var(i),
                QueryAtom::Role(_, t1, t2) => *t1 == QTerm::Var(i) || *t2 == QTerm::Var(i),
            });
            if !occurs {
                return Err(err(&format!("answer variable `{v}` does not occur in the query")));
            }
        }
        Ok(ConjunctiveQuery { vars, answer_arity, atoms })
    }
}

/// All homomorphic matches of the query in a least model; answer variables
/// range over named individuals only.
fn query_matches(model: &LeastCasModel, q: &ConjunctiveQuery) -> BTreeSet<Vec<IndId>> {
    fn go(
        model: &LeastCasModel,
        q: &ConjunctiveQuery,
        idx: usize,
        binding: &mut Vec<Option<SkTerm>>,
        out: &mut BTreeSet<Vec<IndId>>,
    ) {
        if idx == q.atoms.len() {
            let mut tuple = Vec::with_capacity(q.answer_arity);
            for b in binding.iter().take(q.answer_arity) {
                match b {
                    Some(SkTerm::Named(i)) => tuple.push(*i),
                    _ => return,
                }
            }
            out.insert(tuple);
            return;
        }
        let resolve = |t: &QTerm, binding: &[Option<SkTerm>]| -> Option<SkTerm> {
            match t {
                QTerm::Const(i) => Some(SkTerm::Named(*i)),
                QTerm::Var(v) => binding[*v].clone(),
            }
        };
        let try_bind = |t: &QTerm, val: &SkTerm, binding: &mut Vec<Option<SkTerm>>| -> Option<Option<usize>> {
            match t {
                QTerm::Const(i) => (SkTerm::Named(*i) == *val).then_some(None),
                QTerm::Var(v) => match &binding[*v] {
                    Some(bound) => (bound == val).then_some(None),
                    None => {
                        // Answer variables bind named individuals only.
                        if *v < q.answer_arity && !matches!(val, SkTerm::Named(_)) {
                            return None;
                        }
                        binding[*v] = Some(val.clone());
                        Some(Some(*v))
                    }
                },
            }
        };
        match &q.atoms[idx] {
            QueryAtom::Concept(c, t) => {
                if let Some(ground) = resolve(t, binding) {
                    if model.holds_pos(&OAtom::Concept(*c, ground)) {
                        go(model, q, idx + 1, binding, out);
                    }
                    return;
                }
                for atom in &model.pos {
                    if let OAtom::Concept(mc, mt) = atom {
                        if mc == c {
                            if let Some(undo) = try_bind(t, mt, binding) {
                                go(model, q, idx + 1, binding, out);
                                if let Some(v) = undo {
                                    binding[v] = None;
                                }
                            }
                        }
                    }
                }
            }
            QueryAtom::Role(r, t1, t2) => {
                for atom in &model.pos {
                    if let OAtom::Role(mr, m1, m2) = atom {
                        if mr != r {
                            continue;
                        }
                        let undo1 = match try_bind(t1, m1, binding) {
                            Some(u) => u,
                            None => continue,
                        };
                        match try_bind(t2, m2, binding) {
                            Some(undo2) => {
                                go(model, q, idx + 1, binding, out);
                                if let Some(v) = undo2 {
                                    binding[v] = None;
                                }
                            }
                            None => {}
                        }
                        if let Some(v) = undo1 {
                            binding[v] = None;
                        }
                    }
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    let mut binding = vec![None; q.vars.len()];
    go(model, q, 0, &mut binding, &mut out);
    out
}

#[derive(Debug, Clone)]
pub struct CertainAnswers {
    pub tuples: BTreeSet<Vec<IndId>>,
    pub strict_unsat: bool,
    /// The Skolem depth may have been too small for completeness (unbounded
    /// chains, or a finite chain bound above the depth used).
    pub completeness_warning: bool,
    pub depth_used: usize,
}

/// Default Skolem depth for query matching: one witness layer per query
/// atom plus one per existential axiom.
pub fn default_skolem_depth(p: &Prepared, q: &ConjunctiveQuery) -> usize {
    let existentials = p
        .normalized
        .strict
        .iter()
        .filter(|ax| {
            matches!(
                ax,
                crate::kb::Axiom::ConceptIncl { rhs: crate::kb::RightConcept::Exists(_), .. }
            )
        })
        .count();
    q.atoms.len() + existentials
}

/// Certain answers: tuples of named individuals whose substitution matches
/// in the least model of every justified exception set.
pub fn certain_answers(
    p: &Prepared,
    q: &ConjunctiveQuery,
    skolem_depth: Option<usize>,
) -> Result<CertainAnswers, ReasonError> {
    let depth = skolem_depth.unwrap_or_else(|| default_skolem_depth(p, q));
    let sets = models(p, None)?;
    let completeness_warning = match p.safety.chain_bound {
        Some(ChainBound::Finite(n)) => n > depth,
        Some(ChainBound::Unbounded) => true,
        None => false,
    };
    if sets.is_empty() {
        // Vacuous: every tuple over the named individuals is certain.
        let inds: Vec<IndId> = p.normalized.vocab.individuals().collect();
        let mut tuples = BTreeSet::new();
        let mut stack: Vec<Vec<IndId>> = vec![Vec::new()];
        while let Some(t) = stack.pop() {
            if t.len() == q.answer_arity {
                tuples.insert(t);
            } else {
                for &i in &inds {
                    let mut t2 = t.clone();
                    t2.push(i);
                    stack.push(t2);
                }
            }
        }
        return Ok(CertainAnswers { tuples, strict_unsat: true, completeness_warning, depth_used: depth });
    }
    let mut certain: Option<BTreeSet<Vec<IndId>>> = None;
    for s in &sets {
        let model = oracle::least_cas_model(&p.normalized, &s.chi, depth);
        let found = query_matches(&model, q);
        certain = Some(match certain {
            None => found,
            Some(prev) => prev.intersection(&found).cloned().collect(),
        });
        if certain.as_ref().map(|c| c.is_empty()).unwrap_or(false) {
            break;
        }
    }
    Ok(CertainAnswers {
        tuples: certain.unwrap_or_default(),
        strict_unsat: false,
        completeness_warning,
        depth_used: depth,
    })
}

/// Build a ground assertion query from its textual form, e.g.
/// `DeptMember(alice)`, `not hasCourse(bob,alice)`, `_ex_hasCourse(alice)`.
pub fn parse_assertion_query(text: &str, k: &Dkb) -> Result<Assertion, ReasonError> {
    let err = |m: String| ReasonError::Query(m);
    let text = text.trim().trim_end_matches('.').trim();
    let (positive, rest) = match text.strip_prefix("not ") {
        Some(rest) => (false, rest.trim()),
        None => (true, text),
    };
    let (pred, args) = rest
        .split_once('(')
        .ok_or_else(|| err(format!("expected `Name(args)`, got `{text}`")))?;
    let pred = pred.trim();
    let args = args
        .trim()
        .strip_suffix(')')
        .ok_or_else(|| err(format!("missing `)` in `{text}`")))?;
    let args: Vec<&str> = args.split(',').map(str::trim).collect();
    let ind = |name: &str| {
        k.vocab
            .lookup_individual(name)
            .ok_or_else(|| err(format!("unknown individual `{name}`")))
    };
    match args.len() {
        1 => {
            let c = k
                .vocab
                .lookup_concept(pred)
                .ok_or_else(|| err(format!("unknown concept `{pred}`")))?;
            Ok(Assertion {
                positive,
                kind: AssertionKind::Concept(ConceptAtom::Named(c), ind(args[0])?),
            })
        }
        2 => {
            let r = k
                .vocab
                .lookup_role(pred)
                .ok_or_else(|| err(format!("unknown role `{pred}`")))?;
            Ok(Assertion {
                positive,
                kind: AssertionKind::Role(r, ind(args[0])?, ind(args[1])?),
            })
        }
        n => Err(err(format!("assertion has {n} arguments"))),
    }
}

/// Oracle-side depth default: the chain bound when finite, else 3.
pub fn oracle_depth(p: &Prepared) -> usize {
    match p.safety.chain_bound {
        Some(ChainBound::Finite(n)) => n.max(1),
        _ => 3,
    }
}
