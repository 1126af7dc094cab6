//! Exception-safety and chain-safety analysis.
//!
//! A knowledge base is exception safe when no assertion that could serve as
//! the positive part of a clashing set is derivable for an unnamed (Skolem)
//! individual; only then do all exceptions live on named individuals and the
//! datalog pipeline is complete.
//!
//! Both checks run over finite abstractions of the Skolemized derivations of
//! `K_s` (the knowledge base with every defeasible axiom read as strict):
//!
//! * exception safety tracks, per derivable atom, only whether each argument
//!   is NAMED or SKOLEM;
//! * chain analysis runs over one collapsed witness individual per
//!   existentially used role and records which witness spawns which.
//!
//! Both abstractions over-approximate derivability, so a report of "unsafe"
//! or "unbounded" can be spurious for exotic inputs, while "safe" verdicts
//! are sound.

use std::collections::HashMap;
use std::fmt;

use indexmap::{IndexMap, IndexSet};
use thiserror::Error;

use crate::dkbtext::axiom_text;
use crate::kb::{
    AssertionKind, Axiom, ConceptAtom, ConceptId, Dkb, LeftConcept, RightConcept,
    RoleId, Vocabulary,
};
use crate::normalize::{is_normal_form, normalize};

/// Argument abstraction: named individual or Skolem term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArgType {
    Named,
    Skolem,
}

/// An atom abstracted to the types of its arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AbstractAtom {
    Concept(ConceptId, ArgType),
    Role(RoleId, ArgType, ArgType),
}

impl AbstractAtom {
    pub fn has_skolem(&self) -> bool {
        match self {
            AbstractAtom::Concept(_, t) => *t == ArgType::Skolem,
            AbstractAtom::Role(_, t1, t2) => *t1 == ArgType::Skolem || *t2 == ArgType::Skolem,
        }
    }

    pub fn display<'a>(&'a self, vocab: &'a Vocabulary) -> AbstractAtomDisplay<'a> {
        AbstractAtomDisplay { atom: self, vocab }
    }
}

pub struct AbstractAtomDisplay<'a> {
    atom: &'a AbstractAtom,
    vocab: &'a Vocabulary,
}

impl fmt::Display for AbstractAtomDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = |t: &ArgType| match t {
            ArgType::Named => "named",
            ArgType::Skolem => "skolem",
        };
        match self.atom {
            AbstractAtom::Concept(c, a) => {
                write!(f, "{}(<{}>)", self.vocab.concept_name(*c), t(a))
            }
            AbstractAtom::Role(r, a, b) => {
                write!(f, "{}(<{}>,<{}>)", self.vocab.role_name(*r), t(a), t(b))
            }
        }
    }
}

/// One offending derivation: seed first, offending atom last, each step
/// licensed by an axiom of `K_s`.
#[derive(Debug, Clone)]
pub struct Witness {
    pub steps: Vec<AbstractAtom>,
    /// Rendering of the axiom used at each non-seed step.
    pub rules: Vec<String>,
}

/// Length bound on derivable Skolem chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainBound {
    Finite(usize),
    Unbounded,
}

impl fmt::Display for ChainBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainBound::Finite(n) => write!(f, "{n}"),
            ChainBound::Unbounded => write!(f, "unbounded"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SafetyReport {
    pub exception_safe: bool,
    pub chain_bound: Option<ChainBound>,
    pub recursive: bool,
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SafetyError {
    #[error("knowledge base is not in normal form")]
    NotNormalForm,
}

/// Predicates that occur positively in some clashing set of a defeasible
/// axiom of `k` (normal-form defeasible shapes only).
fn clash_positive_preds(k: &Dkb) -> (IndexSet<ConceptId>, IndexSet<RoleId>) {
    let mut concepts = IndexSet::new();
    let mut roles = IndexSet::new();
    for d in &k.defeasible {
        match &d.inner {
            Axiom::ConceptIncl { lhs: LeftConcept::Atomic(a), .. } => {
                concepts.insert(*a);
            }
            Axiom::RoleIncl { lhs, .. } => {
                roles.insert(lhs.role);
            }
            Axiom::Inv(r, s) => {
                roles.insert(*r);
                roles.insert(*s);
            }
            Axiom::Irr(r) => {
                roles.insert(*r);
            }
            // Not reachable from normal-form input.
            Axiom::ConceptIncl { .. } | Axiom::Dis(..) => {}
        }
    }
    (concepts, roles)
}

struct TypeClosure {
    /// Derived atom -> (premise, axiom rendering); seeds have no premise.
    derived: IndexMap<AbstractAtom, Option<(AbstractAtom, String)>>,
}

impl TypeClosure {
    fn run(k: &Dkb) -> Self {
        let mut derived: IndexMap<AbstractAtom, Option<(AbstractAtom, String)>> = IndexMap::new();
        let mut queue: Vec<AbstractAtom> = Vec::new();
        fn push(
            derived: &mut IndexMap<AbstractAtom, Option<(AbstractAtom, String)>>,
            queue: &mut Vec<AbstractAtom>,
            atom: AbstractAtom,
            prov: Option<(AbstractAtom, String)>,
        ) {
            if !derived.contains_key(&atom) {
                derived.insert(atom, prov);
                queue.push(atom);
            }
        }

        for a in &k.abox {
            let atom = match a.kind {
                AssertionKind::Concept(ConceptAtom::Named(c), _) => {
                    AbstractAtom::Concept(c, ArgType::Named)
                }
                AssertionKind::Concept(ConceptAtom::Exists(_), _) => continue,
                AssertionKind::Role(r, _, _) => {
                    AbstractAtom::Role(r, ArgType::Named, ArgType::Named)
                }
            };
            push(&mut derived, &mut queue, atom, None);
        }

        // All axioms of K_s (defeasible read as strict).
        let axioms: Vec<Axiom> = k
            .strict
            .iter()
            .copied()
            .chain(k.defeasible.iter().map(|d| d.inner))
            .collect();

        while let Some(atom) = queue.pop() {
            for ax in &axioms {
                let name = || axiom_text(&k.vocab, ax);
                match (ax, atom) {
                    (
                        Axiom::ConceptIncl {
                            lhs: LeftConcept::Atomic(a),
                            rhs: RightConcept::Atomic(b),
                        },
                        AbstractAtom::Concept(c, t),
                    ) if c == *a => {
                        push(
                            &mut derived,
                            &mut queue,
                            AbstractAtom::Concept(*b, t),
                            Some((atom, name())),
                        );
                    }
                    (
                        Axiom::ConceptIncl {
                            lhs: LeftConcept::Exists(r),
                            rhs: RightConcept::Atomic(b),
                        },
                        AbstractAtom::Role(role, t1, _),
                    ) if role == r.role && !r.inverted => {
                        push(
                            &mut derived,
                            &mut queue,
                            AbstractAtom::Concept(*b, t1),
                            Some((atom, name())),
                        );
                    }
                    (
                        Axiom::ConceptIncl {
                            lhs: LeftConcept::Atomic(a),
                            rhs: RightConcept::Exists(r),
                        },
                        AbstractAtom::Concept(c, t),
                    ) if c == *a && !r.inverted => {
                        push(
                            &mut derived,
                            &mut queue,
                            AbstractAtom::Role(r.role, t, ArgType::Skolem),
                            Some((atom, name())),
                        );
                    }
                    (Axiom::RoleIncl { lhs, rhs }, AbstractAtom::Role(role, t1, t2))
                        if role == lhs.role && !lhs.inverted && !rhs.inverted =>
                    {
                        push(
                            &mut derived,
                            &mut queue,
                            AbstractAtom::Role(rhs.role, t1, t2),
                            Some((atom, name())),
                        );
                    }
                    (Axiom::Inv(r, s), AbstractAtom::Role(role, t1, t2)) if role == *r => {
                        push(
                            &mut derived,
                            &mut queue,
                            AbstractAtom::Role(*s, t2, t1),
                            Some((atom, name())),
                        );
                    }
                    (Axiom::Inv(r, s), AbstractAtom::Role(role, t1, t2)) if role == *s => {
                        push(
                            &mut derived,
                            &mut queue,
                            AbstractAtom::Role(*r, t2, t1),
                            Some((atom, name())),
                        );
                    }
                    _ => {}
                }
            }
        }
        TypeClosure { derived }
    }

    fn witness_for(&self, atom: AbstractAtom) -> Witness {
        let mut steps = vec![atom];
        let mut rules = Vec::new();
        let mut cur = atom;
        while let Some(Some((parent, rule))) = self.derived.get(&cur) {
            steps.push(*parent);
            rules.push(rule.clone());
            cur = *parent;
        }
        steps.reverse();
        rules.reverse();
        Witness { steps, rules }
    }
}

/// Decide exception safety of a normal-form knowledge base.
pub fn check_exception_safe(k: &Dkb) -> Result<SafetyReport, SafetyError> {
    if !is_normal_form(k) {
        return Err(SafetyError::NotNormalForm);
    }
    let closure = TypeClosure::run(k);
    // The abstract atom space is finite.
    debug_assert!(
        closure.derived.len() <= 2 * k.vocab.concept_count() + 4 * k.vocab.role_count()
    );
    let (clash_concepts, clash_roles) = clash_positive_preds(k);
    let mut witnesses = Vec::new();
    for atom in closure.derived.keys() {
        if !atom.has_skolem() {
            continue;
        }
        let offending = match atom {
            AbstractAtom::Concept(c, _) => clash_concepts.contains(c),
            AbstractAtom::Role(r, _, _) => clash_roles.contains(r),
        };
        if offending {
            witnesses.push(closure.witness_for(*atom));
        }
    }
    Ok(SafetyReport {
        exception_safe: witnesses.is_empty(),
        chain_bound: None,
        recursive: false,
        witnesses,
    })
}

// ---------------------------------------------------------------------------
// Witness-graph analysis: chain bounds and recursion.
// ---------------------------------------------------------------------------

/// Abstract individual: the named part of the domain, or the collapsed
/// witness of an existentially used role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum AbsInd {
    Named,
    Witness(RoleId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum AbsAtom {
    Concept(ConceptId, AbsInd),
    Role(RoleId, AbsInd, AbsInd),
}

struct WitnessClosure {
    derived: IndexSet<AbsAtom>,
    /// `u` spawns the witness of role `R` (an existential fired on `u`).
    spawns: IndexSet<(AbsInd, RoleId)>,
}

impl WitnessClosure {
    fn run(k: &Dkb) -> Self {
        let mut derived: IndexSet<AbsAtom> = IndexSet::new();
        let mut spawns: IndexSet<(AbsInd, RoleId)> = IndexSet::new();
        let mut queue: Vec<AbsAtom> = Vec::new();

        for a in &k.abox {
            let atom = match a.kind {
                AssertionKind::Concept(ConceptAtom::Named(c), _) => {
                    AbsAtom::Concept(c, AbsInd::Named)
                }
                AssertionKind::Concept(ConceptAtom::Exists(_), _) => continue,
                AssertionKind::Role(r, _, _) => AbsAtom::Role(r, AbsInd::Named, AbsInd::Named),
            };
            if derived.insert(atom) {
                queue.push(atom);
            }
        }

        let axioms: Vec<Axiom> = k
            .strict
            .iter()
            .copied()
            .chain(k.defeasible.iter().map(|d| d.inner))
            .collect();

        while let Some(atom) = queue.pop() {
            fn push(derived: &mut IndexSet<AbsAtom>, queue: &mut Vec<AbsAtom>, a: AbsAtom) {
                if derived.insert(a) {
                    queue.push(a);
                }
            }
            for ax in &axioms {
                match (ax, atom) {
                    (
                        Axiom::ConceptIncl {
                            lhs: LeftConcept::Atomic(a),
                            rhs: RightConcept::Atomic(b),
                        },
                        AbsAtom::Concept(c, u),
                    ) if c == *a => push(&mut derived, &mut queue, AbsAtom::Concept(*b, u)),
                    (
                        Axiom::ConceptIncl {
                            lhs: LeftConcept::Exists(r),
                            rhs: RightConcept::Atomic(b),
                        },
                        AbsAtom::Role(role, u, _),
                    ) if role == r.role && !r.inverted => {
                        push(&mut derived, &mut queue, AbsAtom::Concept(*b, u))
                    }
                    (
                        Axiom::ConceptIncl {
                            lhs: LeftConcept::Atomic(a),
                            rhs: RightConcept::Exists(r),
                        },
                        AbsAtom::Concept(c, u),
                    ) if c == *a && !r.inverted => {
                        spawns.insert((u, r.role));
                        push(
                            &mut derived,
                            &mut queue,
                            AbsAtom::Role(r.role, u, AbsInd::Witness(r.role)),
                        );
                    }
                    (Axiom::RoleIncl { lhs, rhs }, AbsAtom::Role(role, u, v))
                        if role == lhs.role && !lhs.inverted && !rhs.inverted =>
                    {
                        push(&mut derived, &mut queue, AbsAtom::Role(rhs.role, u, v))
                    }
                    (Axiom::Inv(r, s), AbsAtom::Role(role, u, v)) if role == *r => {
                        push(&mut derived, &mut queue, AbsAtom::Role(*s, v, u))
                    }
                    (Axiom::Inv(r, s), AbsAtom::Role(role, u, v)) if role == *s => {
                        push(&mut derived, &mut queue, AbsAtom::Role(*r, v, u))
                    }
                    _ => {}
                }
            }
        }
        WitnessClosure { derived, spawns }
    }

    /// Successor map of the spawn graph over witness nodes.
    fn graph(&self) -> (HashMap<RoleId, Vec<RoleId>>, Vec<RoleId>) {
        let mut start: Vec<RoleId> = Vec::new();
        let mut edges: HashMap<RoleId, Vec<RoleId>> = HashMap::new();
        for (from, role) in &self.spawns {
            match from {
                AbsInd::Named => start.push(*role),
                AbsInd::Witness(r) => edges.entry(*r).or_default().push(*role),
            }
        }
        (edges, start)
    }
}

/// Longest-path / cycle analysis of the spawn graph starting from named
/// individuals. Returns the chain bound and the set of witness roles that
/// lie on or after a reachable cycle.
fn analyze_graph(
    edges: &HashMap<RoleId, Vec<RoleId>>,
    start: &[RoleId],
) -> (ChainBound, IndexSet<RoleId>) {
    let mut reachable: IndexSet<RoleId> = IndexSet::new();
    let mut stack: Vec<RoleId> = start.to_vec();
    while let Some(r) = stack.pop() {
        if reachable.insert(r) {
            if let Some(next) = edges.get(&r) {
                stack.extend(next.iter().copied());
            }
        }
    }
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Gray,
        Black,
    }
    let mut color: HashMap<RoleId, Color> = reachable.iter().map(|r| (*r, Color::White)).collect();
    let mut on_cycle: IndexSet<RoleId> = IndexSet::new();
    fn dfs(
        node: RoleId,
        edges: &HashMap<RoleId, Vec<RoleId>>,
        color: &mut HashMap<RoleId, Color>,
        path: &mut Vec<RoleId>,
        on_cycle: &mut IndexSet<RoleId>,
        reachable: &IndexSet<RoleId>,
    ) {
        color.insert(node, Color::Gray);
        path.push(node);
        for next in edges.get(&node).into_iter().flatten() {
            if !reachable.contains(next) {
                continue;
            }
            match color[next] {
                Color::White => dfs(*next, edges, color, path, on_cycle, reachable),
                Color::Gray => {
                    // Back edge: everything from `next` on the path is cyclic.
                    let pos = path.iter().position(|r| r == next).unwrap();
                    for r in &path[pos..] {
                        on_cycle.insert(*r);
                    }
                }
                Color::Black => {}
            }
        }
        path.pop();
        color.insert(node, Color::Black);
    }
    let mut path = Vec::new();
    let nodes: Vec<RoleId> = reachable.iter().copied().collect();
    for r in nodes {
        if color[&r] == Color::White {
            dfs(r, edges, &mut color, &mut path, &mut on_cycle, &reachable);
        }
    }

    // Nodes on or after a cycle.
    let mut cycle_reach: IndexSet<RoleId> = IndexSet::new();
    let mut stack: Vec<RoleId> = on_cycle.iter().copied().collect();
    while let Some(r) = stack.pop() {
        if cycle_reach.insert(r) {
            for next in edges.get(&r).into_iter().flatten() {
                if reachable.contains(next) {
                    stack.push(*next);
                }
            }
        }
    }

    if !on_cycle.is_empty() {
        return (ChainBound::Unbounded, cycle_reach);
    }

    // DAG: longest path from the start frontier, counting nodes (= Skolem
    // terms along the chain).
    fn longest(
        node: RoleId,
        edges: &HashMap<RoleId, Vec<RoleId>>,
        memo: &mut HashMap<RoleId, usize>,
    ) -> usize {
        if let Some(&v) = memo.get(&node) {
            return v;
        }
        let best = edges
            .get(&node)
            .into_iter()
            .flatten()
            .map(|n| longest(*n, edges, memo))
            .max()
            .unwrap_or(0);
        memo.insert(node, 1 + best);
        1 + best
    }
    let mut memo = HashMap::new();
    let bound = start.iter().map(|r| longest(*r, edges, &mut memo)).max().unwrap_or(0);
    (ChainBound::Finite(bound), cycle_reach)
}

/// Chain bound of a normal-form knowledge base: the longest derivable chain
/// of distinct Skolem terms, or `Unbounded` when the spawn graph has a
/// reachable cycle.
pub fn check_chain_safety(k: &Dkb) -> Result<ChainBound, SafetyError> {
    if !is_normal_form(k) {
        return Err(SafetyError::NotNormalForm);
    }
    let closure = WitnessClosure::run(k);
    let (edges, start) = closure.graph();
    Ok(analyze_graph(&edges, &start).0)
}

/// Normalize, then run both checks and the recursion test.
pub fn classify(k: &Dkb) -> SafetyReport {
    let (nk, _) = normalize(k);
    classify_normalized(&nk)
}

/// As [`classify`], for a knowledge base already in normal form.
pub fn classify_normalized(nk: &Dkb) -> SafetyReport {
    let mut report = check_exception_safe(nk).expect("normalized input");
    let closure = WitnessClosure::run(nk);
    let (edges, start) = closure.graph();
    let (bound, cycle_reach) = analyze_graph(&edges, &start);
    report.chain_bound = Some(bound);

    // Recursive: unboundedly many distinct Skolem terms can feed a
    // clashing-set predicate, i.e. some clash-positive atom holds of a
    // witness that lies on or after a reachable spawn cycle.
    let (clash_concepts, clash_roles) = clash_positive_preds(nk);
    let cyclic = |u: &AbsInd| matches!(u, AbsInd::Witness(r) if cycle_reach.contains(r));
    report.recursive = closure.derived.iter().any(|atom| match atom {
        AbsAtom::Concept(c, u) => clash_concepts.contains(c) && cyclic(u),
        AbsAtom::Role(r, u, v) => clash_roles.contains(r) && (cyclic(u) || cyclic(v)),
    });
    report
}

/// Render a report as human-readable text.
pub fn render_report(report: &SafetyReport, vocab: &Vocabulary) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "exception-safe: {}\n",
        if report.exception_safe { "yes" } else { "no" }
    ));
    if let Some(bound) = &report.chain_bound {
        out.push_str(&format!("chain bound: {bound}\n"));
    }
    out.push_str(&format!(
        "recursive: {}\n",
        if report.recursive { "yes" } else { "no" }
    ));
    for w in &report.witnesses {
        out.push_str("unsafe derivation:\n");
        for (i, step) in w.steps.iter().enumerate() {
            if i == 0 {
                out.push_str(&format!("  {}\n", step.display(vocab)));
            } else {
                out.push_str(&format!(
                    "  -> {}   [{}]\n",
                    step.display(vocab),
                    w.rules[i - 1]
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dkbtext::parse_dkb;

    const DEPT: &str = "D: DeptMember [= exists hasCourse.\n\
         Professor [= DeptMember.\n\
         PhDStudent [= DeptMember.\n\
         PhDStudent [= not exists hasCourse.\n\
         Professor(alice).\n\
         PhDStudent(bob).\n";

    const SUPERVISOR: &str = "Employee [= exists hasSupervisor.\n\
         exists hasSupervisor^- [= Employee.\n\
         D: exists hasSupervisor^- [= bot.\n\
         Employee(alice).\n";

    fn normalized(src: &str) -> Dkb {
        normalize(&parse_dkb(src).unwrap()).0
    }

    #[test]
    fn dept_is_exception_safe() {
        let nk = normalized(DEPT);
        let report = check_exception_safe(&nk).unwrap();
        assert!(report.exception_safe);
        assert!(report.witnesses.is_empty());
    }

    #[test]
    fn dept_chain_bound_is_one() {
        let nk = normalized(DEPT);
        assert_eq!(check_chain_safety(&nk).unwrap(), ChainBound::Finite(1));
    }

    #[test]
    fn dept_classification() {
        let report = classify(&parse_dkb(DEPT).unwrap());
        assert!(report.exception_safe);
        assert_eq!(report.chain_bound, Some(ChainBound::Finite(1)));
        assert!(!report.recursive);
    }

    #[test]
    fn supervisor_example_is_unsafe_and_recursive() {
        let report = classify(&parse_dkb(SUPERVISOR).unwrap());
        assert!(!report.exception_safe);
        assert_eq!(report.chain_bound, Some(ChainBound::Unbounded));
        assert!(report.recursive);
        assert!(!report.witnesses.is_empty());
        // The offending derivation runs through the bridge concepts.
        let nk = normalized(SUPERVISOR);
        let text = render_report(&classify_normalized(&nk), &nk.vocab);
        assert!(text.contains("_ex_"), "{text}");
    }

    #[test]
    fn supervisor_without_defeasible_is_safe_but_unbounded() {
        let src = "Employee [= exists hasSupervisor.\n\
             exists hasSupervisor^- [= Employee.\n\
             Employee(alice).\n";
        let report = classify(&parse_dkb(src).unwrap());
        assert!(report.exception_safe);
        assert_eq!(report.chain_bound, Some(ChainBound::Unbounded));
        assert!(!report.recursive);
    }

    #[test]
    fn no_existentials_is_trivially_safe() {
        let src = "D: A [= B.\nD: R [= S.\nA(a).\nR(a,b).";
        let report = classify(&parse_dkb(src).unwrap());
        assert!(report.exception_safe);
        assert_eq!(report.chain_bound, Some(ChainBound::Finite(0)));
    }

    #[test]
    fn empty_kb_chain_bound_zero() {
        let report = classify(&parse_dkb("").unwrap());
        assert!(report.exception_safe);
        assert_eq!(report.chain_bound, Some(ChainBound::Finite(0)));
        assert!(!report.recursive);
    }

    #[test]
    fn non_normal_input_is_rejected() {
        let k = parse_dkb(DEPT).unwrap();
        assert!(check_exception_safe(&k).is_err());
        assert!(check_chain_safety(&k).is_err());
    }

    #[test]
    fn witnesses_replay() {
        let nk = normalized(SUPERVISOR);
        let report = check_exception_safe(&nk).unwrap();
        for w in &report.witnesses {
            assert_eq!(w.steps.len(), w.rules.len() + 1);
            assert!(!w.steps[0].has_skolem(), "seed must be named");
            assert!(w.steps.last().unwrap().has_skolem());
        }
    }

    #[test]
    fn inverse_feedback_is_unbounded() {
        // In normal form, concept flow to a witness goes through an inverse
        // role whose own bridge regenerates existentials, so any chain
        // longer than one is reported unbounded.
        let src = "A [= exists R.\nexists R^- [= B.\nB [= exists S.\nA(a).";
        let nk = normalized(src);
        assert_eq!(check_chain_safety(&nk).unwrap(), ChainBound::Unbounded);
    }
}
