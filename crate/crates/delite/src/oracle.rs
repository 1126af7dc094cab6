//! Independent brute-force implementation of the justified-exception
//! semantics, used for differential testing and conjunctive-query matching.
//!
//! The oracle works directly on the first-order reading of the axioms: a
//! forward chase over Skolem terms up to a configurable depth computes the
//! least model for a fixed exception set `chi` (skipping the instances of
//! defeasible axioms assumed away), negative information is derived from
//! negative-head clauses, and a complementary pair (or an explicit falsum
//! head) marks inconsistency.
//!
//! Since the theory is Horn, "no model makes `b` true under chi" coincides
//! with "adding `b` makes the chase inconsistent", which is how both the
//! justification conditions and negative entailment are decided.
//!
//! The oracle accepts any valid knowledge base, not only normal form; this
//! is what makes it usable as the reference when testing that normalization
//! preserves entailment. Defeasible assertions are supported as exception
//! candidates for their own argument tuple. Inverse roles inside defeasible
//! axioms have no clashing-set entry and are rejected.

use std::collections::HashMap;

use indexmap::IndexSet;
use thiserror::Error;

use crate::dkbtext::{assertion_text, axiom_text};
use crate::kb::{
    axiom_clauses, minimal_clashing_sets, Args, Assertion, AssertionKind, Axiom, ChiMap,
    ClashError, ClashingAssumption, ClashingSet, ConceptAtom, ConceptId, DefAxiomId, Dkb, IndId, RoleId, SkTerm, TAtom, THead, TTerm, Vocabulary, VAR_X, VAR_Y,
};

/// Ground atom over Skolem terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OAtom {
    Concept(ConceptId, SkTerm),
    Role(RoleId, SkTerm, SkTerm),
}

impl OAtom {
    pub fn display<'a>(&'a self, vocab: &'a Vocabulary) -> String {
        match self {
            OAtom::Concept(c, t) => {
                format!("{}({})", vocab.concept_name(*c), t.display(vocab))
            }
            OAtom::Role(r, t, u) => format!(
                "{}({},{})",
                vocab.role_name(*r),
                t.display(vocab),
                u.display(vocab)
            ),
        }
    }
}

/// `forall u. not R(t,u)` (subject first) or `forall u. not R(u,t)`
/// (subject second).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UniversalNeg {
    pub role: RoleId,
    pub subject_first: bool,
    pub subject: SkTerm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelStatus {
    Consistent,
    Inconsistent,
}

/// Derivation record for a positive atom: the clause rendering and the
/// premise it fired on (facts have none).
#[derive(Debug, Clone)]
pub struct Derivation {
    pub rule: String,
    pub premise: Option<OAtom>,
}

/// The chase-computed least model for a fixed exception set.
#[derive(Debug, Clone)]
pub struct LeastCasModel {
    pub chi: Vec<ClashingAssumption>,
    pub status: ModelStatus,
    pub pos: IndexSet<OAtom>,
    pub neg: IndexSet<OAtom>,
    pub universal_negs: IndexSet<UniversalNeg>,
    pub terms: IndexSet<SkTerm>,
    /// True when the depth bound suppressed at least one Skolem witness.
    pub truncated: bool,
    pub derivations: HashMap<OAtom, Derivation>,
}

impl LeastCasModel {
    pub fn holds_pos(&self, atom: &OAtom) -> bool {
        self.pos.contains(atom)
    }

    pub fn has_successor(&self, role: RoleId, t: &SkTerm) -> bool {
        self.pos
            .iter()
            .any(|a| matches!(a, OAtom::Role(r, x, _) if *r == role && x == t))
    }
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("exception candidate count {0} exceeds the enumeration budget {1}")]
    BudgetExceeded(usize, usize),
    #[error("no clashing-set entry for the shape of defeasible axiom {0:?}")]
    UnsupportedDefeasibleShape(DefAxiomId),
    #[error("least model for the exception set is inconsistent")]
    InconsistentPrecondition,
}

// ---------------------------------------------------------------------------
// Clause compilation
// ---------------------------------------------------------------------------

/// A guard ties a clause to a defeasible axiom: the instance on a tuple is
/// skipped when that tuple is assumed away.
#[derive(Debug, Clone, Copy)]
struct Guard {
    axiom: DefAxiomId,
    arity: usize,
    chi: ChiMap,
}

#[derive(Debug, Clone)]
struct OClause {
    body: Option<TAtom>,
    head: THead,
    guard: Option<Guard>,
    display: String,
}

#[derive(Debug, Clone)]
enum OFact {
    Pos(OAtom, Option<(DefAxiomId, Args)>),
    Neg(OAtom, Option<(DefAxiomId, Args)>),
    UniversalNeg(UniversalNeg, Option<(DefAxiomId, Args)>),
}

struct Compiled {
    clauses: Vec<OClause>,
    facts: Vec<OFact>,
    /// Canonical id per defeasible axiom (first occurrence of an equal
    /// axiom); duplicates share one exception identity.
    canon: HashMap<DefAxiomId, DefAxiomId>,
}

/// Defeasible ABox assertions get synthetic ids after the defeasible
/// axioms.
fn def_abox_id(k: &Dkb, j: usize) -> DefAxiomId {
    DefAxiomId((k.defeasible.len() + j) as u32)
}

fn assertion_fact(a: &Assertion, guard: Option<(DefAxiomId, Args)>) -> OFact {
    match (a.positive, a.kind) {
        (true, AssertionKind::Concept(ConceptAtom::Named(c), x)) => {
            OFact::Pos(OAtom::Concept(c, SkTerm::Named(x)), guard)
        }
        (false, AssertionKind::Concept(ConceptAtom::Named(c), x)) => {
            OFact::Neg(OAtom::Concept(c, SkTerm::Named(x)), guard)
        }
        // exists R(a): Skolemized witness.
        (true, AssertionKind::Concept(ConceptAtom::Exists(r), x)) => OFact::Pos(
            OAtom::Role(
                r,
                SkTerm::Named(x),
                SkTerm::app(r, false, SkTerm::Named(x)),
            ),
            guard,
        ),
        (false, AssertionKind::Concept(ConceptAtom::Exists(r), x)) => OFact::UniversalNeg(
            UniversalNeg { role: r, subject_first: true, subject: SkTerm::Named(x) },
            guard,
        ),
        (true, AssertionKind::Role(r, x, y)) => {
            OFact::Pos(OAtom::Role(r, SkTerm::Named(x), SkTerm::Named(y)), guard)
        }
        (false, AssertionKind::Role(r, x, y)) => {
            OFact::Neg(OAtom::Role(r, SkTerm::Named(x), SkTerm::Named(y)), guard)
        }
    }
}

fn compile(k: &Dkb, drop_defeasible: bool) -> Compiled {
    let mut clauses = Vec::new();
    let mut facts = Vec::new();
    let mut canon: HashMap<DefAxiomId, DefAxiomId> = HashMap::new();

    for ax in &k.strict {
        for t in axiom_clauses(ax) {
            clauses.push(OClause {
                body: t.body.first().copied(),
                head: t.head,
                guard: None,
                display: axiom_text(&k.vocab, ax),
            });
        }
    }
    for a in &k.abox {
        facts.push(assertion_fact(a, None));
    }
    if drop_defeasible {
        return Compiled { clauses, facts, canon };
    }

    let mut seen_axioms: Vec<(Axiom, DefAxiomId)> = Vec::new();
    for d in &k.defeasible {
        let canonical = seen_axioms
            .iter()
            .find(|(ax, _)| *ax == d.inner)
            .map(|(_, id)| *id)
            .unwrap_or(d.id);
        if canonical == d.id {
            seen_axioms.push((d.inner, d.id));
            for t in axiom_clauses(&d.inner) {
                clauses.push(OClause {
                    body: t.body.first().copied(),
                    head: t.head,
                    guard: Some(Guard {
                        axiom: d.id,
                        arity: d.inner.arity(),
                        chi: t.chi,
                    }),
                    display: format!("D: {}", axiom_text(&k.vocab, &d.inner)),
                });
            }
        }
        canon.insert(d.id, canonical);
    }
    let mut seen_assertions: Vec<(Assertion, DefAxiomId)> = Vec::new();
    for (j, a) in k.defeasible_abox.iter().enumerate() {
        let id = def_abox_id(k, j);
        let canonical = seen_assertions
            .iter()
            .find(|(other, _)| other == a)
            .map(|(_, i)| *i)
            .unwrap_or(id);
        if canonical == id {
            seen_assertions.push((*a, id));
            facts.push(assertion_fact(a, Some((id, assertion_args(a)))));
        }
        canon.insert(id, canonical);
    }
    Compiled { clauses, facts, canon }
}

fn assertion_args(a: &Assertion) -> Args {
    match a.kind {
        AssertionKind::Concept(_, x) => Args::Unary(x),
        AssertionKind::Role(_, x, y) => Args::Binary(x, y),
    }
}

// ---------------------------------------------------------------------------
// The chase
// ---------------------------------------------------------------------------

struct Chase<'a> {
    compiled: &'a Compiled,
    chi: IndexSet<(DefAxiomId, Args)>,
    depth: usize,
    stop_on_clash: bool,
    pos: IndexSet<OAtom>,
    neg: IndexSet<OAtom>,
    universal_negs: IndexSet<UniversalNeg>,
    terms: IndexSet<SkTerm>,
    queue: Vec<OAtom>,
    derivations: HashMap<OAtom, Derivation>,
    inconsistent: bool,
    truncated: bool,
}

impl<'a> Chase<'a> {
    fn new(compiled: &'a Compiled, chi: &[ClashingAssumption], depth: usize) -> Self {
        let chi = chi
            .iter()
            .map(|ca| (ca.axiom, ca.args))
            .collect::<IndexSet<_>>();
        Chase {
            compiled,
            chi,
            depth,
            stop_on_clash: true,
            pos: IndexSet::new(),
            neg: IndexSet::new(),
            universal_negs: IndexSet::new(),
            terms: IndexSet::new(),
            queue: Vec::new(),
            derivations: HashMap::new(),
            inconsistent: false,
            truncated: false,
        }
    }

    fn skipped(&self, guard: &Option<(DefAxiomId, Args)>) -> bool {
        match guard {
            Some((id, args)) => {
                let canonical = self.compiled.canon.get(id).copied().unwrap_or(*id);
                self.chi.contains(&(canonical, *args))
            }
            None => false,
        }
    }

    /// Exception tuple of a clause instance; `None` when an argument is
    /// unnamed (instances on Skolem terms are never assumed away).
    fn guard_tuple(guard: &Guard, x: &SkTerm, y: Option<&SkTerm>) -> Option<Args> {
        let named = |t: &SkTerm| match t {
            SkTerm::Named(i) => Some(*i),
            SkTerm::App { .. } => None,
        };
        match guard.arity {
            1 => Some(Args::Unary(named(x)?)),
            2 => {
                let (a, b) = (named(x)?, named(y?)?);
                Some(match guard.chi {
                    ChiMap::Direct => Args::Binary(a, b),
                    ChiMap::Swapped => Args::Binary(b, a),
                })
            }
            _ => unreachable!(),
        }
    }

    fn clause_skipped(&self, guard: &Option<Guard>, x: &SkTerm, y: Option<&SkTerm>) -> bool {
        match guard {
            None => false,
            Some(g) => match Self::guard_tuple(g, x, y) {
                Some(args) => {
                    let canonical = self.compiled.canon.get(&g.axiom).copied().unwrap_or(g.axiom);
                    self.chi.contains(&(canonical, args))
                }
                None => false,
            },
        }
    }

    fn note_term(&mut self, t: &SkTerm) {
        if self.terms.insert(t.clone()) {
            // Universal negatives and irreflexivity-style bodiless heads
            // reach new terms as they appear.
            let universals: Vec<UniversalNeg> = self.universal_negs.iter().cloned().collect();
            for u in universals {
                self.expand_universal(&u, t);
            }
            for clause in &self.compiled.clauses {
                if clause.body.is_none() {
                    // Only Irr produces bodiless clauses: not R(x,x).
                    if let THead::Neg(TAtom::Role(role, _, _)) = clause.head {
                        if self.clause_skipped(&clause.guard, t, Some(t)) {
                            continue;
                        }
                        self.add_neg(OAtom::Role(role, t.clone(), t.clone()));
                    }
                }
            }
        }
    }

    fn clash(&mut self) {
        self.inconsistent = true;
    }

    fn add_pos(&mut self, atom: OAtom, rule: String, premise: Option<OAtom>) {
        if self.pos.contains(&atom) {
            return;
        }
        self.derivations.insert(atom.clone(), Derivation { rule, premise });
        self.pos.insert(atom.clone());
        self.queue.push(atom.clone());
        // Registering terms may fire bodiless negative clauses; the clash
        // checks must run after it so freshly produced negatives are seen.
        match &atom {
            OAtom::Concept(_, t) => self.note_term(&t.clone()),
            OAtom::Role(_, t, u) => {
                self.note_term(&t.clone());
                self.note_term(&u.clone());
            }
        }
        if self.neg.contains(&atom) {
            self.clash();
        }
        if let OAtom::Role(r, t, u) = &atom {
            let hit = self.universal_negs.iter().any(|un| {
                un.role == *r
                    && ((un.subject_first && un.subject == *t)
                        || (!un.subject_first && un.subject == *u))
            });
            if hit {
                self.clash();
            }
        }
    }

    fn add_neg(&mut self, atom: OAtom) {
        if self.pos.contains(&atom) {
            self.clash();
            if self.stop_on_clash {
                return;
            }
        }
        self.neg.insert(atom);
    }

    fn expand_universal(&mut self, u: &UniversalNeg, t: &SkTerm) {
        let atom = if u.subject_first {
            OAtom::Role(u.role, u.subject.clone(), t.clone())
        } else {
            OAtom::Role(u.role, t.clone(), u.subject.clone())
        };
        self.add_neg(atom);
    }

    fn add_universal(&mut self, u: UniversalNeg) {
        if !self.universal_negs.insert(u.clone()) {
            return;
        }
        let terms: Vec<SkTerm> = self.terms.iter().cloned().collect();
        for t in terms {
            self.expand_universal(&u, &t);
            if self.inconsistent && self.stop_on_clash {
                return;
            }
        }
    }

    /// Fire one clause on a matched binding (x := subject, y := object).
    fn fire(&mut self, clause: &OClause, x: &SkTerm, y: Option<&SkTerm>, premise: Option<OAtom>) {
        if self.clause_skipped(&clause.guard, x, y) {
            return;
        }
        let term_of = |v: u8| -> Option<SkTerm> {
            match v {
                VAR_X => Some(x.clone()),
                VAR_Y => y.cloned(),
                _ => None,
            }
        };
        let resolve = |t: &TTerm| -> Option<SkTerm> {
            match t {
                TTerm::Var(v) => term_of(*v),
                TTerm::SkolemOf { role, inverted, var } => {
                    Some(SkTerm::app(*role, *inverted, term_of(*var)?))
                }
            }
        };
        match &clause.head {
            THead::Bottom => self.clash(),
            THead::Pos(atom) => {
                let ground = match atom {
                    TAtom::Concept(c, t) => OAtom::Concept(*c, resolve(t).expect("bound")),
                    TAtom::Role(r, t1, t2) => {
                        let g1 = resolve(t1).expect("bound");
                        let g2 = resolve(t2).expect("bound");
                        OAtom::Role(*r, g1, g2)
                    }
                };
                // Depth bound on Skolem creation.
                let too_deep = match &ground {
                    OAtom::Concept(_, t) => t.depth() > self.depth,
                    OAtom::Role(_, t, u) => t.depth() > self.depth || u.depth() > self.depth,
                };
                if too_deep {
                    self.truncated = true;
                    return;
                }
                self.add_pos(ground, clause.display.clone(), premise);
            }
            THead::Neg(atom) => match atom {
                TAtom::Concept(c, t) => {
                    let g = resolve(t).expect("bound");
                    self.add_neg(OAtom::Concept(*c, g));
                }
                TAtom::Role(r, t1, t2) => match (resolve(t1), resolve(t2)) {
                    (Some(g1), Some(g2)) => self.add_neg(OAtom::Role(*r, g1, g2)),
                    // A free second position is a universal negative.
                    (Some(g1), None) => self.add_universal(UniversalNeg {
                        role: *r,
                        subject_first: true,
                        subject: g1,
                    }),
                    (None, Some(g2)) => self.add_universal(UniversalNeg {
                        role: *r,
                        subject_first: false,
                        subject: g2,
                    }),
                    (None, None) => unreachable!("head without bound variables"),
                },
            },
        }
    }

    fn run(&mut self, extra: &[OFact]) {
        let facts: Vec<OFact> = self.compiled.facts.iter().chain(extra).cloned().collect();
        for f in &facts {
            match f {
                OFact::Pos(atom, guard) => {
                    if !self.skipped(guard) {
                        self.add_pos(atom.clone(), "fact".to_string(), None);
                    }
                }
                OFact::Neg(atom, guard) => {
                    if !self.skipped(guard) {
                        match atom {
                            OAtom::Concept(_, t) => self.note_term(&t.clone()),
                            OAtom::Role(_, t, u) => {
                                self.note_term(&t.clone());
                                self.note_term(&u.clone());
                            }
                        }
                        self.add_neg(atom.clone());
                    }
                }
                OFact::UniversalNeg(u, guard) => {
                    if !self.skipped(guard) {
                        self.note_term(&u.subject.clone());
                        self.add_universal(u.clone());
                    }
                }
            }
            if self.inconsistent && self.stop_on_clash {
                return;
            }
        }

        let compiled = self.compiled;
        while let Some(atom) = self.queue.pop() {
            if self.inconsistent && self.stop_on_clash {
                return;
            }
            for clause in &compiled.clauses {
                let Some(body) = &clause.body else { continue };
                match (body, &atom) {
                    (TAtom::Concept(bc, TTerm::Var(VAR_X)), OAtom::Concept(c, t)) if bc == c => {
                        self.fire(clause, &t.clone(), None, Some(atom.clone()));
                    }
                    (TAtom::Role(br, p1, p2), OAtom::Role(r, t, u)) if br == r => {
                        // Bind x (and possibly y) from the role positions.
                        let (p1, p2) = (*p1, *p2);
                        let bind = |pos: TTerm, val: &SkTerm| -> Option<(u8, SkTerm)> {
                            match pos {
                                TTerm::Var(v) => Some((v, val.clone())),
                                TTerm::SkolemOf { .. } => None,
                            }
                        };
                        let mut x: Option<SkTerm> = None;
                        let mut y: Option<SkTerm> = None;
                        for b in [bind(p1, t), bind(p2, u)].into_iter().flatten() {
                            match b.0 {
                                VAR_X => x = Some(b.1),
                                VAR_Y => y = Some(b.1),
                                _ => {} // bound existential position, unused
                            }
                        }
                        if let Some(x) = x {
                            self.fire(clause, &x, y.as_ref(), Some(atom.clone()));
                        }
                    }
                    _ => {}
                }
                if self.inconsistent && self.stop_on_clash {
                    return;
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

/// All instantiations of the defeasible axioms (and defeasible assertions)
/// over the named individuals. Duplicate axioms share the identity of their
/// first occurrence.
pub fn candidate_assumptions(k: &Dkb) -> Vec<ClashingAssumption> {
    let mut out = Vec::new();
    let inds: Vec<IndId> = k.vocab.individuals().collect();
    let mut seen: Vec<Axiom> = Vec::new();
    for d in &k.defeasible {
        if seen.contains(&d.inner) {
            continue;
        }
        seen.push(d.inner);
        match d.inner.arity() {
            1 => {
                for &e in &inds {
                    out.push(ClashingAssumption { axiom: d.id, args: Args::Unary(e) });
                }
            }
            _ => {
                for &e1 in &inds {
                    for &e2 in &inds {
                        out.push(ClashingAssumption { axiom: d.id, args: Args::Binary(e1, e2) });
                    }
                }
            }
        }
    }
    let mut seen_a: Vec<Assertion> = Vec::new();
    for (j, a) in k.defeasible_abox.iter().enumerate() {
        if seen_a.contains(a) {
            continue;
        }
        seen_a.push(*a);
        out.push(ClashingAssumption { axiom: def_abox_id(k, j), args: assertion_args(a) });
    }
    out
}

/// Forward-chase the knowledge base under an exception set, up to the given
/// Skolem depth.
pub fn least_cas_model(k: &Dkb, chi: &[ClashingAssumption], depth: usize) -> LeastCasModel {
    let compiled = compile(k, false);
    let mut chase = Chase::new(&compiled, chi, depth);
    chase.run(&[]);
    LeastCasModel {
        chi: chi.to_vec(),
        status: if chase.inconsistent {
            ModelStatus::Inconsistent
        } else {
            ModelStatus::Consistent
        },
        pos: chase.pos,
        neg: chase.neg,
        universal_negs: chase.universal_negs,
        terms: chase.terms,
        truncated: chase.truncated,
        derivations: chase.derivations,
    }
}

/// Satisfiability of the strict part (all defeasible axioms dropped).
pub fn strict_satisfiable(k: &Dkb, depth: usize) -> bool {
    let compiled = compile(k, true);
    let mut chase = Chase::new(&compiled, &[], depth);
    chase.run(&[]);
    !chase.inconsistent
}

/// Is `beta` unsatisfiable together with the knowledge base under `chi`
/// (i.e. is its complement entailed)?
fn refutes(compiled: &Compiled, chi: &[ClashingAssumption], depth: usize, beta: &Assertion) -> bool {
    let mut chase = Chase::new(compiled, chi, depth);
    chase.run(&[assertion_fact(beta, None)]);
    chase.inconsistent
}

/// Clashing sets of a clashing assumption, using the axiom catalogue for
/// defeasible axioms and the assertion rows for defeasible assertions.
fn clashing_sets_for(k: &Dkb, ca: &ClashingAssumption) -> Result<Vec<ClashingSet>, ClashError> {
    if ca.axiom.index() < k.defeasible.len() {
        return minimal_clashing_sets(&k.defeasible[ca.axiom.index()].inner, &ca.args);
    }
    let a = &k.defeasible_abox[ca.axiom.index() - k.defeasible.len()];
    // <A(a),a>: {not A(a)}   <not A(a),a>: {A(a)}
    // <R(a,b),(a,b)>: {not R(a,b)}   <not R(a,b),(a,b)>: {R(a,b)}
    Ok(vec![ClashingSet { elements: vec![a.complement()] }])
}

/// Per-assumption justification evidence: the index of the clashing set that
/// witnessed it, when justified.
#[derive(Debug, Clone)]
pub struct JustificationEvidence {
    pub assumption: ClashingAssumption,
    pub witness_set: Option<(usize, ClashingSet)>,
}

#[derive(Debug, Clone)]
pub struct JustificationReport {
    pub justified: bool,
    pub evidence: Vec<JustificationEvidence>,
}

/// Check that every assumption in `chi` is justified: some clashing set has
/// all its positive members in the least model and all its negated members
/// refuted (adding them makes the chase inconsistent).
pub fn is_justified(
    k: &Dkb,
    chi: &[ClashingAssumption],
    depth: usize,
) -> Result<JustificationReport, OracleError> {
    let model = least_cas_model(k, chi, depth);
    if model.status == ModelStatus::Inconsistent {
        return Err(OracleError::InconsistentPrecondition);
    }
    let compiled = compile(k, false);
    is_justified_with_model(k, &compiled, chi, depth, &model)
}

fn is_justified_with_model(
    k: &Dkb,
    compiled: &Compiled,
    chi: &[ClashingAssumption],
    depth: usize,
    model: &LeastCasModel,
) -> Result<JustificationReport, OracleError> {
    let mut evidence = Vec::new();
    let mut all = true;
    for ca in chi {
        let sets = clashing_sets_for(k, ca)
            .map_err(|_| OracleError::UnsupportedDefeasibleShape(ca.axiom))?;
        let mut witness = None;
        'sets: for (i, set) in sets.iter().enumerate() {
            for el in &set.elements {
                if el.positive {
                    let holds = match el.kind {
                        AssertionKind::Concept(ConceptAtom::Named(c), x) => {
                            model.holds_pos(&OAtom::Concept(c, SkTerm::Named(x)))
                        }
                        AssertionKind::Concept(ConceptAtom::Exists(r), x) => {
                            model.has_successor(r, &SkTerm::Named(x))
                        }
                        AssertionKind::Role(r, x, y) => model
                            .holds_pos(&OAtom::Role(r, SkTerm::Named(x), SkTerm::Named(y))),
                    };
                    if !holds {
                        continue 'sets;
                    }
                } else {
                    // not beta in S: no model under chi may satisfy beta.
                    let beta = el.complement();
                    if !refutes(compiled, chi, depth, &beta) {
                        continue 'sets;
                    }
                }
            }
            witness = Some((i, set.clone()));
            break;
        }
        if witness.is_none() {
            all = false;
        }
        evidence.push(JustificationEvidence { assumption: *ca, witness_set: witness });
    }
    Ok(JustificationReport { justified: all, evidence })
}

/// Enumerate every justified exception set, smallest guesses first in the
/// canonical candidate order.
///
/// Candidates are narrowed by a sound filter before subset enumeration:
/// an assumption can only ever be justified if some clashing set has its
/// positive part derivable, and each negated member refutable, when all
/// defeasible axioms are applied (the maximal closure dominates the chase
/// under any exception set).
pub fn justified_chis(
    k: &Dkb,
    depth: usize,
    budget: usize,
) -> Result<Vec<Vec<ClashingAssumption>>, OracleError> {
    let compiled = compile(k, false);
    let all_candidates = candidate_assumptions(k);

    // Maximal closure: nothing skipped, keep deriving past clashes.
    let mut max_chase = Chase::new(&compiled, &[], depth);
    max_chase.stop_on_clash = false;
    max_chase.run(&[]);

    let mut candidates = Vec::new();
    for ca in all_candidates {
        let sets = clashing_sets_for(k, &ca)
            .map_err(|_| OracleError::UnsupportedDefeasibleShape(ca.axiom))?;
        let viable = sets.iter().any(|set| {
            set.elements.iter().all(|el| {
                if el.positive {
                    match el.kind {
                        AssertionKind::Concept(ConceptAtom::Named(c), x) => {
                            max_chase.pos.contains(&OAtom::Concept(c, SkTerm::Named(x)))
                        }
                        AssertionKind::Concept(ConceptAtom::Exists(r), x) => max_chase
                            .pos
                            .iter()
                            .any(|a| matches!(a, OAtom::Role(rr, t, _) if *rr == r && *t == SkTerm::Named(x))),
                        AssertionKind::Role(r, x, y) => max_chase
                            .pos
                            .contains(&OAtom::Role(r, SkTerm::Named(x), SkTerm::Named(y))),
                    }
                } else {
                    refutes(&compiled, &[], depth, &el.complement())
                }
            })
        });
        if viable {
            candidates.push(ca);
        }
    }
    candidates.sort();

    if candidates.len() > budget {
        return Err(OracleError::BudgetExceeded(candidates.len(), budget));
    }

    let mut result = Vec::new();
    for mask in 0u64..(1u64 << candidates.len()) {
        let chi: Vec<ClashingAssumption> = candidates
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, ca)| *ca)
            .collect();
        let model = least_cas_model(k, &chi, depth);
        if model.status == ModelStatus::Inconsistent {
            continue;
        }
        let report = is_justified_with_model(k, &compiled, &chi, depth, &model)?;
        if report.justified {
            result.push(chi);
        }
    }
    // Non-redundancy of justifications: the family is a strict-subset
    // antichain by construction of the semantics; assert, never filter.
    debug_assert!(result.iter().all(|a| result
        .iter()
        .filter(|b| *b != a)
        .all(|b| !a.iter().all(|x| b.contains(x)))));
    Ok(result)
}

/// Precomputed context for repeated entailment queries over a fixed family
/// of exception sets: the compiled clauses and one least model per set.
pub struct EntailmentContext<'k> {
    k: &'k Dkb,
    compiled: Compiled,
    depth: usize,
    chis: Vec<Vec<ClashingAssumption>>,
    models: Vec<LeastCasModel>,
}

impl<'k> EntailmentContext<'k> {
    pub fn new(k: &'k Dkb, chis: &[Vec<ClashingAssumption>], depth: usize) -> Self {
        let compiled = compile(k, false);
        let models = chis.iter().map(|chi| least_cas_model(k, chi, depth)).collect();
        EntailmentContext { k, compiled, depth, chis: chis.to_vec(), models }
    }

    /// Cautious entailment: positive queries hold when present in every
    /// least model, negative queries when the complement is refuted under
    /// every exception set.
    pub fn cautious(&self, q: &Assertion) -> bool {
        let _ = self.k;
        if q.positive {
            self.models.iter().all(|model| match q.kind {
                AssertionKind::Concept(ConceptAtom::Named(c), x) => {
                    model.holds_pos(&OAtom::Concept(c, SkTerm::Named(x)))
                }
                AssertionKind::Concept(ConceptAtom::Exists(r), x) => {
                    model.has_successor(r, &SkTerm::Named(x))
                }
                AssertionKind::Role(r, x, y) => {
                    model.holds_pos(&OAtom::Role(r, SkTerm::Named(x), SkTerm::Named(y)))
                }
            })
        } else {
            self.chis
                .iter()
                .all(|chi| refutes(&self.compiled, chi, self.depth, &q.complement()))
        }
    }
}

/// Cautious entailment over a family of justified exception sets.
pub fn cautious_entails(
    k: &Dkb,
    chis: &[Vec<ClashingAssumption>],
    q: &Assertion,
    depth: usize,
) -> bool {
    EntailmentContext::new(k, chis, depth).cautious(q)
}

/// Render an exception set against the vocabulary.
pub fn chi_display(k: &Dkb, chi: &[ClashingAssumption]) -> String {
    let parts: Vec<String> = chi
        .iter()
        .map(|ca| {
            let axiom = if ca.axiom.index() < k.defeasible.len() {
                axiom_text(&k.vocab, &k.defeasible[ca.axiom.index()].inner)
            } else {
                assertion_text(&k.vocab, &k.defeasible_abox[ca.axiom.index() - k.defeasible.len()])
            };
            let args = match ca.args {
                Args::Unary(e) => k.vocab.individual_name(e).to_string(),
                Args::Binary(e1, e2) => format!(
                    "{},{}",
                    k.vocab.individual_name(e1),
                    k.vocab.individual_name(e2)
                ),
            };
            format!("<{axiom} @ {args}>")
        })
        .collect();
    format!("{{{}}}", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dkbtext::parse_dkb;
    use crate::normalize::normalize;

    const DEPT: &str = "D: DeptMember [= exists hasCourse.\n\
         Professor [= DeptMember.\n\
         PhDStudent [= DeptMember.\n\
         PhDStudent [= not exists hasCourse.\n\
         Professor(alice).\n\
         PhDStudent(bob).\n";

    fn dept() -> Dkb {
        normalize(&parse_dkb(DEPT).unwrap()).0
    }

    fn chi_bob(k: &Dkb) -> Vec<ClashingAssumption> {
        vec![ClashingAssumption {
            axiom: k.defeasible[0].id,
            args: Args::Unary(k.vocab.lookup_individual("bob").unwrap()),
        }]
    }

    #[test]
    fn candidate_counts() {
        let k = dept();
        assert_eq!(candidate_assumptions(&k).len(), 2);

        let k2 = normalize(&parse_dkb("D: R [= S.\nR(a,b).").unwrap()).0;
        assert_eq!(candidate_assumptions(&k2).len(), 4);

        let k3 = normalize(&parse_dkb("A [= B.\nA(a).").unwrap()).0;
        assert!(candidate_assumptions(&k3).is_empty());
    }

    #[test]
    fn dept_least_model_with_exception() {
        let k = dept();
        let v = &k.vocab;
        let model = least_cas_model(&k, &chi_bob(&k), 1);
        assert_eq!(model.status, ModelStatus::Consistent);
        let alice = SkTerm::Named(v.lookup_individual("alice").unwrap());
        let bob = SkTerm::Named(v.lookup_individual("bob").unwrap());
        let hc = v.lookup_role("hasCourse").unwrap();
        let ex_hc = v.lookup_concept("_ex_hasCourse").unwrap();
        assert!(model.holds_pos(&OAtom::Role(
            hc,
            alice.clone(),
            SkTerm::app(hc, false, alice.clone())
        )));
        assert!(model.neg.contains(&OAtom::Concept(ex_hc, bob.clone())));
        assert!(!model.has_successor(hc, &bob));
    }

    #[test]
    fn dept_least_model_without_exception_is_inconsistent() {
        let k = dept();
        let model = least_cas_model(&k, &[], 1);
        assert_eq!(model.status, ModelStatus::Inconsistent);
    }

    #[test]
    fn empty_kb_is_consistent_and_empty() {
        let k = normalize(&parse_dkb("").unwrap()).0;
        let model = least_cas_model(&k, &[], 3);
        assert_eq!(model.status, ModelStatus::Consistent);
        assert!(model.pos.is_empty());
    }

    #[test]
    fn dept_justification() {
        let k = dept();
        // chi = { <alpha, bob> } is justified via {DeptMember(bob), not exists hasCourse(bob)}.
        let report = is_justified(&k, &chi_bob(&k), 1).unwrap();
        assert!(report.justified);
        assert!(report.evidence[0].witness_set.is_some());
        // A similar assumption for alice is not justifiable.
        let both = vec![
            chi_bob(&k)[0],
            ClashingAssumption {
                axiom: k.defeasible[0].id,
                args: Args::Unary(k.vocab.lookup_individual("alice").unwrap()),
            },
        ];
        let report = is_justified(&k, &both, 1).unwrap();
        assert!(!report.justified);
        // The empty set is vacuously justified (on a consistent base).
        let k2 = normalize(&parse_dkb("A(a).").unwrap()).0;
        assert!(is_justified(&k2, &[], 1).unwrap().justified);
    }

    #[test]
    fn dept_justified_chis() {
        let k = dept();
        let chis = justified_chis(&k, 1, 20).unwrap();
        assert_eq!(chis, vec![chi_bob(&k)]);
    }

    #[test]
    fn nixon_two_incomparable_chis() {
        let src = "D: Quaker [= Pacifist.\nD: Republican [= Dove2.\n\
             Pacifist [= not Dove2.\nQuaker(nixon).\nRepublican(nixon).";
        let k = normalize(&parse_dkb(src).unwrap()).0;
        let chis = justified_chis(&k, 1, 20).unwrap();
        assert_eq!(chis.len(), 2);
        assert_eq!(chis[0].len(), 1);
        assert_eq!(chis[1].len(), 1);
        // Antichain.
        for a in &chis {
            for b in &chis {
                if a != b {
                    assert!(!a.iter().all(|x| b.contains(x)));
                }
            }
        }
    }

    #[test]
    fn strictly_inconsistent_yields_nothing() {
        let src = "A(a).\nA [= B.\nA [= not B.";
        let k = normalize(&parse_dkb(src).unwrap()).0;
        assert!(justified_chis(&k, 1, 20).unwrap().is_empty());
        assert!(!strict_satisfiable(&k, 1));
    }

    #[test]
    fn defeasible_clash_is_excusable() {
        // D(A [= B), D(A [= not B), A(a): satisfiable, the strict part has a
        // model and an exception resolves the defeasible clash.
        let src = "D: A [= B.\nD: A [= not B.\nA(a).";
        let k = normalize(&parse_dkb(src).unwrap()).0;
        assert!(strict_satisfiable(&k, 1));
        let chis = justified_chis(&k, 1, 20).unwrap();
        assert!(!chis.is_empty());
    }

    #[test]
    fn foundedness_replay() {
        let k = dept();
        let model = least_cas_model(&k, &chi_bob(&k), 1);
        for atom in &model.pos {
            let mut cur = atom.clone();
            let mut hops = 0;
            loop {
                let der = model.derivations.get(&cur).expect("derivation recorded");
                match &der.premise {
                    Some(p) => {
                        assert!(model.pos.contains(p));
                        cur = p.clone();
                    }
                    None => {
                        assert_eq!(der.rule, "fact");
                        break;
                    }
                }
                hops += 1;
                assert!(hops < 1000, "derivation cycle");
            }
        }
    }

    #[test]
    fn chase_grows_monotonically_with_depth() {
        let src = "Employee [= exists hasSupervisor.\n\
             exists hasSupervisor^- [= Employee.\nEmployee(alice).";
        let k = normalize(&parse_dkb(src).unwrap()).0;
        let mut last = 0;
        for depth in 0..4 {
            let model = least_cas_model(&k, &[], depth);
            assert_eq!(model.status, ModelStatus::Consistent);
            assert!(model.pos.len() >= last);
            last = model.pos.len();
        }
        // Unbounded chain: deeper chases keep adding literals.
        assert!(least_cas_model(&k, &[], 3).truncated);
    }

    #[test]
    fn nonmonotonicity_witness() {
        // {D(A [= B), A(c), not B(c)} has chi = {<A [= B, c>}; removing
        // not B(c) flips it to the empty chi.
        let with = normalize(&parse_dkb("D: A [= B.\nA(c).\nnot B(c).").unwrap()).0;
        let chis = justified_chis(&with, 1, 20).unwrap();
        assert_eq!(chis.len(), 1);
        assert_eq!(chis[0].len(), 1);
        let without = normalize(&parse_dkb("D: A [= B.\nA(c).").unwrap()).0;
        let chis = justified_chis(&without, 1, 20).unwrap();
        assert_eq!(chis, vec![vec![]]);
    }

    #[test]
    fn budget_is_enforced() {
        // 3 individuals x 2 defeasible role inclusions = 18 candidates, all
        // viable is unlikely, so force a tiny budget.
        let src = "D: A [= B.\nA(a).\nA(b).\nnot B(a).\nnot B(b).";
        let k = normalize(&parse_dkb(src).unwrap()).0;
        match justified_chis(&k, 1, 1) {
            Err(OracleError::BudgetExceeded(n, 1)) => assert!(n >= 2),
            other => panic!("expected budget error, got {other:?}"),
        }
    }
}
