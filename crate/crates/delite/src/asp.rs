//! Grounding and answer-set enumeration for the generated program class:
//! normal programs with strong negation whose only default-negated atoms are
//! `ovr` atoms.
//!
//! Enumeration follows the stable-model definition directly: candidate `ovr`
//! guesses are the `ovr` atoms derivable when every application rule fires
//! (a superset of the `ovr` part of any answer set, since dropping the NAF
//! guards only grows the closure); for each guess `O` we compute the least
//! model of the reduct and accept exactly when the model is consistent and
//! reproduces `O`.

use std::collections::{BTreeSet, HashMap};

use indexmap::IndexSet;
use thiserror::Error;

use crate::dlprog::{
    chi_from_ovr_args, DConst, DLiteral, DProgram, DRule, DTerm, OvrTag, Pred, Sort,
};
use crate::kb::ClashingAssumption;

/// A ground literal over the translation signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundLit {
    pub strong_neg: bool,
    pub pred: Pred,
    pub args: Vec<DConst>,
}

impl GroundLit {
    pub fn complement(&self) -> GroundLit {
        GroundLit {
            strong_neg: !self.strong_neg,
            pred: self.pred,
            args: self.args.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundRule {
    pub head: GroundLit,
    pub body_pos: Vec<GroundLit>,
    pub body_naf: Vec<GroundLit>,
}

#[derive(Debug, Clone)]
pub struct GroundProgram {
    pub facts: Vec<GroundLit>,
    pub rules: Vec<GroundRule>,
    /// Canonical constant order (named individuals, then aux constants).
    pub universe: Vec<DConst>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AspError {
    #[error("unsafe rule `{0}`")]
    UnsafeRule(&'static str),
    #[error("default negation on non-ovr atom in rule `{0}`")]
    NafOutsideOvr(&'static str),
    #[error("ovr candidate count {0} exceeds the enumeration budget")]
    TooManyCandidates(usize),
}

/// Argument sorts of a predicate; `ovr` depends on its tag.
fn signature(pred: Pred, args: &[DTerm]) -> Vec<Sort> {
    use Sort::*;
    match pred {
        Pred::Nom => vec![Constant],
        Pred::Cls => vec![Concept],
        Pred::Rol => vec![Role],
        Pred::Insta => vec![Constant, Concept],
        Pred::Triplea => vec![Constant, Role, Constant],
        Pred::SubClass | Pred::SupNot | Pred::DefSubclass => vec![Concept, Concept],
        Pred::SubEx => vec![Role, Concept],
        Pred::SupEx => vec![Concept, Role, Constant],
        Pred::SubRole | Pred::Dis | Pred::Inv | Pred::DefSubr | Pred::DefInv => {
            vec![Role, Role]
        }
        Pred::Irr | Pred::DefIrr => vec![Role],
        Pred::Instd => vec![Constant, Concept],
        Pred::Tripled => vec![Constant, Role, Constant],
        Pred::Const | Pred::First | Pred::Last => vec![Constant],
        Pred::Next => vec![Constant, Constant],
        Pred::AllNrel => vec![Constant, Role],
        Pred::AllNrelStep => vec![Constant, Role, Constant],
        Pred::Ovr => {
            let tag = match args.first() {
                Some(DTerm::Const(DConst::Tag(t))) => *t,
                _ => panic!("ovr atom without tag constant"),
            };
            match tag {
                OvrTag::SubClass => vec![Tag, Constant, Concept, Concept],
                OvrTag::SubRole | OvrTag::Inv => vec![Tag, Constant, Constant, Role, Role],
                OvrTag::Irr => vec![Tag, Constant, Role],
            }
        }
    }
}

struct Grounder<'a> {
    universe: Vec<DConst>,
    concepts: Vec<DConst>,
    roles: Vec<DConst>,
    /// Fact tuples per fact predicate.
    fact_index: HashMap<Pred, Vec<Vec<DConst>>>,
    fact_set: IndexSet<GroundLit>,
    program: &'a DProgram,
}

impl<'a> Grounder<'a> {
    fn new(p: &'a DProgram) -> Self {
        let mut universe = IndexSet::new();
        let mut concepts = IndexSet::new();
        let mut roles = IndexSet::new();
        let mut fact_index: HashMap<Pred, Vec<Vec<DConst>>> = HashMap::new();
        let mut fact_set = IndexSet::new();
        for f in &p.facts {
            let args: Vec<DConst> = f
                .atom
                .args
                .iter()
                .map(|t| match t {
                    DTerm::Const(c) => *c,
                    DTerm::Var(_) => panic!("facts are ground"),
                })
                .collect();
            match f.atom.pred {
                Pred::Const => {
                    universe.insert(args[0]);
                }
                Pred::Cls => {
                    concepts.insert(args[0]);
                }
                Pred::Rol => {
                    roles.insert(args[0]);
                }
                _ => {}
            }
            fact_set.insert(GroundLit {
                strong_neg: f.strong_neg,
                pred: f.atom.pred,
                args: args.clone(),
            });
            fact_index.entry(f.atom.pred).or_default().push(args);
        }
        Grounder {
            universe: universe.into_iter().collect(),
            concepts: concepts.into_iter().collect(),
            roles: roles.into_iter().collect(),
            fact_index,
            fact_set,
            program: p,
        }
    }

    fn domain(&self, sort: Sort) -> &[DConst] {
        match sort {
            Sort::Constant => &self.universe,
            Sort::Concept => &self.concepts,
            Sort::Role => &self.roles,
            Sort::Tag => &[],
        }
    }

    fn ground_rule(&self, rule: &DRule, out: &mut Vec<GroundRule>) -> Result<(), AspError> {
        if !rule.is_safe() {
            return Err(AspError::UnsafeRule(rule.name));
        }
        // Sort per variable, from any atom mentioning it.
        let mut var_sort: HashMap<u8, Sort> = HashMap::new();
        let all_lits = rule
            .body_pos
            .iter()
            .chain(rule.body_naf.iter())
            .chain(std::iter::once(&rule.head));
        for lit in all_lits {
            let sig = signature(lit.atom.pred, &lit.atom.args);
            for (t, s) in lit.atom.args.iter().zip(sig) {
                if let DTerm::Var(v) = t {
                    let prev = var_sort.insert(*v, s);
                    debug_assert!(prev.is_none() || prev == Some(s), "sort clash in {}", rule.name);
                }
            }
        }
        // Fact atoms act as generators; derived atoms only consume bindings.
        let mut generators: Vec<&DLiteral> = Vec::new();
        let mut others: Vec<&DLiteral> = Vec::new();
        for lit in &rule.body_pos {
            if lit.atom.pred.is_fact_pred() && !lit.strong_neg {
                generators.push(lit);
            } else {
                others.push(lit);
            }
        }
        // Variables not bound by any generator range over their sort domain.
        let mut free: Vec<u8> = Vec::new();
        {
            let mut bound: IndexSet<u8> = IndexSet::new();
            for lit in &generators {
                for t in &lit.atom.args {
                    if let DTerm::Var(v) = t {
                        bound.insert(*v);
                    }
                }
            }
            for lit in &others {
                for t in &lit.atom.args {
                    if let DTerm::Var(v) = t {
                        if !bound.contains(v) && !free.contains(v) {
                            free.push(*v);
                        }
                    }
                }
            }
        }

        fn subst_lit(lit: &DLiteral, env: &HashMap<u8, DConst>) -> GroundLit {
            GroundLit {
                strong_neg: lit.strong_neg,
                pred: lit.atom.pred,
                args: lit
                    .atom
                    .args
                    .iter()
                    .map(|t| match t {
                        DTerm::Const(c) => *c,
                        DTerm::Var(v) => env[v],
                    })
                    .collect(),
            }
        }

        // Recursive join over generators, then free-variable enumeration.
        fn descend(
            g: &Grounder,
            rule: &DRule,
            generators: &[&DLiteral],
            free: &[u8],
            var_sort: &HashMap<u8, Sort>,
            env: &mut HashMap<u8, DConst>,
            out: &mut Vec<GroundRule>,
        ) {
            if let Some((lit, rest)) = generators.split_first() {
                let empty = Vec::new();
                let tuples = g.fact_index.get(&lit.atom.pred).unwrap_or(&empty);
                'tuples: for tuple in tuples {
                    let mut newly_bound: Vec<u8> = Vec::new();
                    for (t, c) in lit.atom.args.iter().zip(tuple) {
                        match t {
                            DTerm::Const(k) => {
                                if k != c {
                                    for v in &newly_bound {
                                        env.remove(v);
                                    }
                                    continue 'tuples;
                                }
                            }
                            DTerm::Var(v) => match env.get(v) {
                                Some(bound) if bound != c => {
                                    for v in &newly_bound {
                                        env.remove(v);
                                    }
                                    continue 'tuples;
                                }
                                Some(_) => {}
                                None => {
                                    env.insert(*v, *c);
                                    newly_bound.push(*v);
                                }
                            },
                        }
                    }
                    descend(g, rule, rest, free, var_sort, env, out);
                    for v in &newly_bound {
                        env.remove(v);
                    }
                }
            } else if let Some((v, rest)) = free.split_first() {
                for c in g.domain(var_sort[v]) {
                    env.insert(*v, *c);
                    descend(g, rule, &[], rest, var_sort, env, out);
                }
                env.remove(v);
            } else {
                if let Some((a, b)) = rule.no_aux_diagonal {
                    if let (Some(DConst::Aux(x)), Some(DConst::Aux(y))) =
                        (env.get(&a), env.get(&b))
                    {
                        if x == y {
                            return;
                        }
                    }
                }
                out.push(GroundRule {
                    head: subst_lit(&rule.head, env),
                    body_pos: rule.body_pos.iter().map(|l| subst_lit(l, env)).collect(),
                    body_naf: rule.body_naf.iter().map(|l| subst_lit(l, env)).collect(),
                });
            }
        }
        let mut env = HashMap::new();
        descend(self, rule, &generators, &free, &var_sort, &mut env, out);
        let _ = &self.program;
        Ok(())
    }
}

/// Instantiate all rule variables over the typed constant domains, keeping
/// only instances whose fact-predicate body atoms match an existing fact.
pub fn ground(p: &DProgram) -> Result<GroundProgram, AspError> {
    let grounder = Grounder::new(p);
    let mut rules = Vec::new();
    for rule in &p.rules {
        grounder.ground_rule(rule, &mut rules)?;
    }
    let facts = grounder.fact_set.iter().cloned().collect();
    Ok(GroundProgram {
        facts,
        rules,
        universe: grounder.universe.clone(),
    })
}

/// Result of the least-model computation of a positive ground program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeastModel {
    Model(BTreeSet<GroundLit>),
    Inconsistent,
}

fn closure(
    facts: &[GroundLit],
    rules: &[GroundRule],
    stop_on_clash: bool,
) -> (BTreeSet<GroundLit>, bool) {
    let mut derived: IndexSet<GroundLit> = IndexSet::new();
    let mut clash = false;
    let mut queue: Vec<GroundLit> = Vec::new();

    // body literal -> rule indices waiting on it
    let mut watch: HashMap<&GroundLit, Vec<usize>> = HashMap::new();
    let mut missing: Vec<usize> = rules.iter().map(|r| r.body_pos.len()).collect();
    for (i, r) in rules.iter().enumerate() {
        for lit in &r.body_pos {
            watch.entry(lit).or_default().push(i);
        }
    }

    let derive = |lit: GroundLit,
                      derived: &mut IndexSet<GroundLit>,
                      queue: &mut Vec<GroundLit>,
                      clash: &mut bool| {
        if derived.contains(&lit.complement()) {
            *clash = true;
        }
        if derived.insert(lit.clone()) {
            queue.push(lit);
        }
    };

    for f in facts {
        derive(f.clone(), &mut derived, &mut queue, &mut clash);
        if clash && stop_on_clash {
            return (derived.into_iter().collect(), true);
        }
    }
    // Duplicate body literals must be counted once.
    let mut seen_per_rule: Vec<IndexSet<&GroundLit>> = rules
        .iter()
        .map(|r| r.body_pos.iter().collect::<IndexSet<_>>())
        .collect();
    for (i, r) in rules.iter().enumerate() {
        missing[i] = seen_per_rule[i].len();
        if missing[i] == 0 {
            derive(r.head.clone(), &mut derived, &mut queue, &mut clash);
        }
    }
    if clash && stop_on_clash {
        return (derived.into_iter().collect(), true);
    }

    while let Some(lit) = queue.pop() {
        if let Some(rule_ids) = watch.get(&lit) {
            for &i in rule_ids {
                if seen_per_rule[i].shift_remove(&lit) {
                    missing[i] -= 1;
                    if missing[i] == 0 {
                        derive(rules[i].head.clone(), &mut derived, &mut queue, &mut clash);
                        if clash && stop_on_clash {
                            return (derived.into_iter().collect(), true);
                        }
                    }
                }
            }
        }
    }
    (derived.into_iter().collect(), clash)
}

/// Unique least literal set of a positive (NAF-free) ground program, or
/// `Inconsistent` when the closure contains a complementary pair.
pub fn least_model(gp: &GroundProgram) -> LeastModel {
    debug_assert!(gp.rules.iter().all(|r| r.body_naf.is_empty()));
    let (lits, clash) = closure(&gp.facts, &gp.rules, true);
    if clash {
        LeastModel::Inconsistent
    } else {
        LeastModel::Model(lits)
    }
}

/// The reduct w.r.t. a literal set: drop rules with a NAF literal true in
/// `s`, strip the NAF part from the rest.
pub fn reduct(gp: &GroundProgram, s: &BTreeSet<GroundLit>) -> GroundProgram {
    let rules = gp
        .rules
        .iter()
        .filter(|r| r.body_naf.iter().all(|l| !s.contains(l)))
        .map(|r| GroundRule {
            head: r.head.clone(),
            body_pos: r.body_pos.clone(),
            body_naf: Vec::new(),
        })
        .collect();
    GroundProgram {
        facts: gp.facts.clone(),
        rules,
        universe: gp.universe.clone(),
    }
}

/// An answer set of `PK(K)` together with the exception set it encodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnswerSet {
    pub literals: BTreeSet<GroundLit>,
    pub chi: Vec<ClashingAssumption>,
}

fn ovr_part(lits: &BTreeSet<GroundLit>) -> BTreeSet<GroundLit> {
    lits.iter()
        .filter(|l| l.pred == Pred::Ovr && !l.strong_neg)
        .cloned()
        .collect()
}

/// Enumerate the answer sets of a program whose NAF atoms are all `ovr`
/// atoms, in the canonical order given by the guess bit-vector over the
/// sorted candidate list.
pub fn answer_sets(p: &DProgram, limit: Option<usize>) -> Result<Vec<AnswerSet>, AspError> {
    let gp = ground(p)?;
    for r in &p.rules {
        for lit in &r.body_naf {
            if lit.atom.pred != Pred::Ovr || lit.strong_neg {
                return Err(AspError::NafOutsideOvr(r.name));
            }
        }
    }

    // Candidate guesses: ovr atoms derivable when every application rule
    // fires (NAF guards dropped, closure past inconsistencies).
    let stripped: Vec<GroundRule> = gp
        .rules
        .iter()
        .map(|r| GroundRule {
            head: r.head.clone(),
            body_pos: r.body_pos.clone(),
            body_naf: Vec::new(),
        })
        .collect();
    let (max_closure, _) = closure(&gp.facts, &stripped, false);
    let mut candidates: Vec<GroundLit> = ovr_part(&max_closure).into_iter().collect();
    candidates.sort();
    if candidates.len() > 24 {
        return Err(AspError::TooManyCandidates(candidates.len()));
    }

    let mut result = Vec::new();
    for mask in 0u64..(1u64 << candidates.len()) {
        let guess: BTreeSet<GroundLit> = candidates
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, l)| l.clone())
            .collect();
        let reduced = reduct(&gp, &guess);
        match least_model(&reduced) {
            LeastModel::Inconsistent => continue,
            LeastModel::Model(lits) => {
                if ovr_part(&lits) == guess {
                    let ovr_args: Vec<Vec<DConst>> =
                        guess.iter().map(|l| l.args.clone()).collect();
                    let chi = chi_from_ovr_args(&p.def_index, &ovr_args);
                    result.push(AnswerSet { literals: lits, chi });
                    if let Some(limit) = limit {
                        if result.len() >= limit {
                            break;
                        }
                    }
                }
            }
        }
    }
    Ok(result)
}

/// Brute-force stable-model check over all consistent literal subsets of the
/// program's literal base. Exponential; test use only.
pub fn answer_sets_naive(gp: &GroundProgram) -> Vec<BTreeSet<GroundLit>> {
    let mut base: IndexSet<GroundLit> = IndexSet::new();
    for f in &gp.facts {
        base.insert(f.clone());
    }
    for r in &gp.rules {
        base.insert(r.head.clone());
        for l in r.body_pos.iter().chain(&r.body_naf) {
            base.insert(l.clone());
        }
    }
    let base: Vec<GroundLit> = base.into_iter().collect();
    assert!(base.len() <= 20, "naive enumeration is for tiny programs");
    let mut result = Vec::new();
    'outer: for mask in 0u64..(1u64 << base.len()) {
        let interp: BTreeSet<GroundLit> = base
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, l)| l.clone())
            .collect();
        for l in &interp {
            if interp.contains(&l.complement()) {
                continue 'outer;
            }
        }
        let reduced = reduct(gp, &interp);
        if let LeastModel::Model(lits) = least_model(&reduced) {
            if lits == interp && !result.contains(&interp) {
                result.push(interp);
            }
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dkbtext::parse_dkb;
    use crate::dlprog::{assemble_program, DAtom};
    use crate::kb::{Args, ConceptId, IndId};
    use crate::normalize::normalize;

    const DEPT: &str = "D: DeptMember [= exists hasCourse.\n\
         Professor [= DeptMember.\n\
         PhDStudent [= DeptMember.\n\
         PhDStudent [= not exists hasCourse.\n\
         Professor(alice).\n\
         PhDStudent(bob).\n";

    // Propositional stand-ins: `p_i` is instd(i0, c_i).
    fn prop(i: u32) -> GroundLit {
        GroundLit {
            strong_neg: false,
            pred: Pred::Instd,
            args: vec![DConst::Ind(IndId(0)), DConst::Cls(ConceptId(i))],
        }
    }

    fn prop_rule(head: GroundLit, body: Vec<GroundLit>, naf: Vec<GroundLit>) -> GroundRule {
        GroundRule { head, body_pos: body, body_naf: naf }
    }

    #[test]
    fn least_model_basics() {
        // {a., b <- a.} -> {a, b}
        let gp = GroundProgram {
            facts: vec![prop(0)],
            rules: vec![prop_rule(prop(1), vec![prop(0)], vec![])],
            universe: vec![],
        };
        match least_model(&gp) {
            LeastModel::Model(m) => {
                assert_eq!(m, BTreeSet::from([prop(0), prop(1)]))
            }
            LeastModel::Inconsistent => panic!(),
        }
        // {a., -a.} -> inconsistent
        let gp = GroundProgram {
            facts: vec![prop(0), prop(0).complement()],
            rules: vec![],
            universe: vec![],
        };
        assert_eq!(least_model(&gp), LeastModel::Inconsistent);
    }

    #[test]
    fn reduct_drops_and_strips() {
        let ovr = GroundLit {
            strong_neg: false,
            pred: Pred::Ovr,
            args: vec![DConst::Tag(OvrTag::Irr), DConst::Ind(IndId(0)), DConst::Rol(crate::kb::RoleId(0))],
        };
        let with_naf = prop_rule(prop(1), vec![prop(0)], vec![ovr.clone()]);
        let without = prop_rule(prop(2), vec![prop(0)], vec![]);
        let gp = GroundProgram {
            facts: vec![],
            rules: vec![with_naf, without],
            universe: vec![],
        };
        // ovr true: rule removed.
        let r = reduct(&gp, &BTreeSet::from([ovr.clone()]));
        assert_eq!(r.rules.len(), 1);
        assert_eq!(r.rules[0].head, prop(2));
        // ovr false: rule kept, NAF stripped.
        let r = reduct(&gp, &BTreeSet::new());
        assert_eq!(r.rules.len(), 2);
        assert!(r.rules.iter().all(|r| r.body_naf.is_empty()));
    }

    #[test]
    fn dept_universe_and_answer_set() {
        let nk = normalize(&parse_dkb(DEPT).unwrap()).0;
        let p = assemble_program(&nk).unwrap();
        let gp = ground(&p).unwrap();
        assert_eq!(gp.universe.len(), 3);

        let answers = answer_sets(&p, None).unwrap();
        assert_eq!(answers.len(), 1);
        let a = &answers[0];

        let v = &nk.vocab;
        let dm = DConst::Cls(v.lookup_concept("DeptMember").unwrap());
        let ex_hc = DConst::Cls(v.lookup_concept("_ex_hasCourse").unwrap());
        let hc = DConst::Rol(v.lookup_role("hasCourse").unwrap());
        let alice = DConst::Ind(v.lookup_individual("alice").unwrap());
        let bob = DConst::Ind(v.lookup_individual("bob").unwrap());

        let ovr = GroundLit {
            strong_neg: false,
            pred: Pred::Ovr,
            args: vec![DConst::Tag(OvrTag::SubClass), bob, dm, ex_hc],
        };
        assert!(a.literals.contains(&ovr));
        assert!(a.literals.contains(&GroundLit {
            strong_neg: false,
            pred: Pred::Instd,
            args: vec![alice, ex_hc],
        }));
        assert!(a.literals.contains(&GroundLit {
            strong_neg: false,
            pred: Pred::Tripled,
            args: vec![alice, hc, DConst::Aux(0)],
        }));
        assert!(a.literals.contains(&GroundLit {
            strong_neg: true,
            pred: Pred::Instd,
            args: vec![bob, ex_hc],
        }));
        // chi = { <DeptMember [= _ex_hasCourse, bob> }
        assert_eq!(a.chi.len(), 1);
        assert_eq!(a.chi[0].axiom, nk.defeasible[0].id);
        assert_eq!(a.chi[0].args, Args::Unary(v.lookup_individual("bob").unwrap()));
    }

    #[test]
    fn dept_answer_set_is_gl_fixpoint() {
        let nk = normalize(&parse_dkb(DEPT).unwrap()).0;
        let p = assemble_program(&nk).unwrap();
        let gp = ground(&p).unwrap();
        for a in answer_sets(&p, None).unwrap() {
            let reduced = reduct(&gp, &a.literals);
            match least_model(&reduced) {
                LeastModel::Model(m) => assert_eq!(m, a.literals),
                LeastModel::Inconsistent => panic!("answer set must be consistent"),
            }
            // Consistency of the literal set itself.
            for l in &a.literals {
                assert!(!a.literals.contains(&l.complement()));
            }
        }
    }

    #[test]
    fn nixon_style_two_answer_sets() {
        let src = "D: Quaker [= Pacifist.\nD: Republican [= Dove2.\n\
             Pacifist [= not Dove2.\nQuaker(nixon).\nRepublican(nixon).";
        let nk = normalize(&parse_dkb(src).unwrap()).0;
        let p = assemble_program(&nk).unwrap();
        let answers = answer_sets(&p, None).unwrap();
        assert_eq!(answers.len(), 2);
        let chi0 = &answers[0].chi;
        let chi1 = &answers[1].chi;
        assert_eq!(chi0.len(), 1);
        assert_eq!(chi1.len(), 1);
        assert_ne!(chi0, chi1);
    }

    #[test]
    fn strictly_inconsistent_kb_has_no_answer_sets() {
        let src = "A(a).\nA [= B.\nA [= not B.";
        let nk = normalize(&parse_dkb(src).unwrap()).0;
        let p = assemble_program(&nk).unwrap();
        assert!(answer_sets(&p, None).unwrap().is_empty());
    }

    #[test]
    fn limit_caps_enumeration() {
        let src = "D: Quaker [= Pacifist.\nD: Republican [= Dove2.\n\
             Pacifist [= not Dove2.\nQuaker(nixon).\nRepublican(nixon).";
        let nk = normalize(&parse_dkb(src).unwrap()).0;
        let p = assemble_program(&nk).unwrap();
        assert_eq!(answer_sets(&p, Some(1)).unwrap().len(), 1);
    }

    #[test]
    fn rule_instance_count_bound() {
        // A rule body over two constant-sorted variables grounds to at most
        // |universe|^2 instances.
        let nk = normalize(&parse_dkb("R(a,b).\nIrr(R).").unwrap()).0;
        let p = assemble_program(&nk).unwrap();
        let gp = ground(&p).unwrap();
        let irr_instances = gp
            .rules
            .iter()
            .filter(|r| r.head.pred == Pred::Tripled && r.head.strong_neg)
            .count();
        assert!(irr_instances <= gp.universe.len() * gp.universe.len());
    }

    /// On a tiny program, subset enumeration over derivable ovr candidates
    /// finds exactly the stable models that brute force over all consistent
    /// literal subsets finds.
    #[test]
    fn enumeration_agrees_with_naive_brute_force() {
        let src = "D: A [= B.\nA(a).\nnot B(a).";
        let nk = normalize(&parse_dkb(src).unwrap()).0;
        let p = assemble_program(&nk).unwrap();
        let answers = answer_sets(&p, None).unwrap();
        assert_eq!(answers.len(), 1);
        assert_eq!(answers[0].chi.len(), 1);

        // Project the ground program onto the literals that matter for the
        // naive check: keep rules, drop always-true fact bodies.
        let gp = ground(&p).unwrap();
        let relevant: Vec<GroundRule> = gp
            .rules
            .iter()
            .filter(|r| {
                matches!(r.head.pred, Pred::Instd | Pred::Tripled | Pred::Ovr)
            })
            .map(|r| GroundRule {
                head: r.head.clone(),
                body_pos: r
                    .body_pos
                    .iter()
                    .filter(|l| matches!(l.pred, Pred::Instd | Pred::Tripled | Pred::Ovr))
                    .cloned()
                    .collect(),
                body_naf: r.body_naf.clone(),
            })
            .filter(|r| {
                // Keep instances whose fact atoms held.
                let orig = gp.rules.iter().find(|o| o.head == r.head
                    && o.body_naf == r.body_naf
                    && o.body_pos.iter().filter(|l| matches!(l.pred, Pred::Instd | Pred::Tripled | Pred::Ovr)).cloned().collect::<Vec<_>>() == r.body_pos);
                orig.map(|o| {
                    o.body_pos
                        .iter()
                        .filter(|l| !matches!(l.pred, Pred::Instd | Pred::Tripled | Pred::Ovr))
                        .all(|l| gp.facts.contains(l))
                })
                .unwrap_or(false)
            })
            .collect();
        let abox_facts: Vec<GroundLit> = gp
            .facts
            .iter()
            .filter(|f| matches!(f.pred, Pred::Insta | Pred::Triplea))
            .map(|f| GroundLit {
                strong_neg: f.strong_neg,
                pred: if f.pred == Pred::Insta { Pred::Instd } else { Pred::Tripled },
                args: f.args.clone(),
            })
            .collect();
        let small = GroundProgram { facts: abox_facts, rules: relevant, universe: gp.universe.clone() };
        let naive = answer_sets_naive(&small);
        assert_eq!(naive.len(), 1);
        let expected_ovr: Vec<&GroundLit> =
            naive[0].iter().filter(|l| l.pred == Pred::Ovr).collect();
        assert_eq!(expected_ovr.len(), 1);
        let _ = DAtom::new(Pred::Instd, vec![]);
    }
}
