//! Normal-form rewriting for defeasible knowledge bases.
//!
//! The normal form restricts statements to:
//!
//! * strict: `A(a)`, `R(a,b)`, `A [= B`, `A [= not B`, the bridge pair
//!   `exists R [= _ex_R` / `_ex_R [= exists R`, `R [= S`, `Dis(R,S)`,
//!   `Inv(R,S)`, `Irr(R)`;
//! * defeasible: `D(A [= B)`, `D(R [= S)`, `D(Inv(R,S))`, `D(Irr(R))`.
//!
//! Inverse roles are replaced by one shared fresh role per source role
//! (`_nf_R_inv`, linked with an `Inv` axiom), existentials are funneled
//! through the bridge concepts `_ex_R`, `bot` goes through the shared pair
//! `_nf_bot [= _nf_f`, `_nf_bot [= not _nf_f`, and negative or defeasible
//! assertions are compiled into fresh-symbol inclusions. Fresh names embed
//! the source statement index, so equal inputs produce equal outputs.

use std::collections::HashMap;

use indexmap::IndexSet;

use crate::dkbtext::{assertion_text, axiom_text};
use crate::kb::{
    Assertion, AssertionKind, Axiom, ConceptAtom, ConceptId, DefAxiomId, Dkb, LeftConcept,
    RightConcept, RoleExpr, RoleId, SymbolKind,
};

#[derive(Debug, Clone)]
pub struct RewriteStep {
    /// Rendering of the source statement.
    pub source: String,
    /// Renderings of the statements it produced.
    pub produced: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct IntroducedSymbol {
    pub name: String,
    pub kind: SymbolKind,
    /// Rendering of the statement (or bridge/bottom scaffolding) that
    /// triggered the introduction.
    pub origin: String,
}

/// Evidence for the rewriting: every fresh symbol and every rewrite step,
/// plus the source rendering of each normalized defeasible axiom (used to
/// report overrides in terms of the input).
#[derive(Debug, Clone, Default)]
pub struct NormalizationTrace {
    pub introduced_symbols: Vec<IntroducedSymbol>,
    pub rewrite_steps: Vec<RewriteStep>,
    pub defeasible_origin: Vec<String>,
}

impl NormalizationTrace {
    /// Source rendering for a normalized defeasible axiom.
    pub fn origin_of(&self, id: DefAxiomId) -> &str {
        &self.defeasible_origin[id.index()]
    }
}

struct Normalizer {
    out: Dkb,
    trace: NormalizationTrace,
    /// Shared fresh inverse role per source role.
    inverse_of: HashMap<RoleId, RoleId>,
    /// Bridge concept `_ex_R` per existentially used role.
    ex_concept: HashMap<RoleId, ConceptId>,
    /// Roles that occur under `exists`, in first-use order.
    ex_used: IndexSet<RoleId>,
    /// Bridge halves already present in the input (kept in place).
    have_sub_bridge: IndexSet<RoleId>,
    have_sup_bridge: IndexSet<RoleId>,
    bottom: Option<ConceptId>,
}

impl Normalizer {
    fn fresh_name(&mut self, base: &str) -> String {
        if self.out.vocab.kind_of(base).is_none() {
            return base.to_string();
        }
        let mut n = 2;
        loop {
            let candidate = format!("{base}_{n}");
            if self.out.vocab.kind_of(&candidate).is_none() {
                return candidate;
            }
            n += 1;
        }
    }

    fn intro(&mut self, name: &str, kind: SymbolKind, origin: &str) -> u32 {
        let id = self
            .out
            .vocab
            .declare_raw(name, kind)
            .expect("fresh names are unused");
        self.trace.introduced_symbols.push(IntroducedSymbol {
            name: name.to_string(),
            kind,
            origin: origin.to_string(),
        });
        id
    }

    fn fresh_concept(&mut self, base: &str, origin: &str) -> ConceptId {
        let name = self.fresh_name(base);
        ConceptId(self.intro(&name, SymbolKind::Concept, origin))
    }

    fn fresh_role(&mut self, base: &str, origin: &str) -> RoleId {
        let name = self.fresh_name(base);
        RoleId(self.intro(&name, SymbolKind::Role, origin))
    }

    /// Resolve a role expression to a plain role, creating the shared
    /// inverse role (and its `Inv` axiom) when needed.
    fn plain_role(&mut self, r: RoleExpr, origin: &str) -> RoleId {
        if !r.inverted {
            return r.role;
        }
        if let Some(&inv) = self.inverse_of.get(&r.role) {
            return inv;
        }
        let base = format!("_nf_{}_inv", self.out.vocab.role_name(r.role));
        let inv = self.fresh_role(&base, origin);
        self.inverse_of.insert(r.role, inv);
        self.out.strict.push(Axiom::Inv(r.role, inv));
        inv
    }

    /// The `_ex_R` bridge concept for a role, tracking that `R` occurs
    /// existentially.
    fn ex_concept(&mut self, role: RoleId, origin: &str) -> ConceptId {
        self.ex_used.insert(role);
        if let Some(&c) = self.ex_concept.get(&role) {
            return c;
        }
        let name = format!("_ex_{}", self.out.vocab.role_name(role));
        let c = match self.out.vocab.lookup_concept(&name) {
            Some(c) => c,
            None => ConceptId(self.intro(&name, SymbolKind::Concept, origin)),
        };
        self.ex_concept.insert(role, c);
        c
    }

    fn bottom_concept(&mut self, origin: &str) -> ConceptId {
        if let Some(b) = self.bottom {
            return b;
        }
        let bot = self.fresh_concept("_nf_bot", origin);
        let f = self.fresh_concept("_nf_f", origin);
        self.out.strict.push(Axiom::ConceptIncl {
            lhs: LeftConcept::Atomic(bot),
            rhs: RightConcept::Atomic(f),
        });
        self.out.strict.push(Axiom::ConceptIncl {
            lhs: LeftConcept::Atomic(bot),
            rhs: RightConcept::Not(LeftConcept::Atomic(f)),
        });
        self.bottom = Some(bot);
        bot
    }

    /// Recognize the two bridge axioms for a role (by the `_ex_` naming
    /// convention); `true` marks the `exists R [= _ex_R` half.
    fn bridge_role(&self, ax: &Axiom) -> Option<(RoleId, bool)> {
        bridge_of(&self.out.vocab, ax)
    }

    /// Rewrite a strict TBox/RBox axiom into normal-form statements.
    fn strict_axiom(&mut self, ax: &Axiom, origin: &str) -> Vec<Axiom> {
        // Bridge axioms already in the input stay as they are.
        if let Some((role, is_sub)) = self.bridge_role(ax) {
            self.ex_concept(role, origin);
            if is_sub {
                self.have_sub_bridge.insert(role);
            } else {
                self.have_sup_bridge.insert(role);
            }
            return vec![*ax];
        }
        match ax {
            Axiom::ConceptIncl { lhs, rhs } => {
                let lhs_c = match lhs {
                    LeftConcept::Atomic(a) => *a,
                    LeftConcept::Exists(r) => {
                        let role = self.plain_role(*r, origin);
                        self.ex_concept(role, origin)
                    }
                };
                let rhs_c = match rhs {
                    RightConcept::Atomic(b) => RightConcept::Atomic(*b),
                    RightConcept::Not(LeftConcept::Atomic(b)) => {
                        RightConcept::Not(LeftConcept::Atomic(*b))
                    }
                    RightConcept::Not(LeftConcept::Exists(r)) => {
                        let role = self.plain_role(*r, origin);
                        RightConcept::Not(LeftConcept::Atomic(self.ex_concept(role, origin)))
                    }
                    RightConcept::Exists(r) => {
                        let role = self.plain_role(*r, origin);
                        RightConcept::Atomic(self.ex_concept(role, origin))
                    }
                    RightConcept::Bottom => RightConcept::Atomic(self.bottom_concept(origin)),
                };
                vec![Axiom::ConceptIncl {
                    lhs: LeftConcept::Atomic(lhs_c),
                    rhs: rhs_c,
                }]
            }
            Axiom::RoleIncl { lhs, rhs } => {
                let l = self.plain_role(*lhs, origin);
                let r = self.plain_role(*rhs, origin);
                vec![Axiom::RoleIncl {
                    lhs: RoleExpr::plain(l),
                    rhs: RoleExpr::plain(r),
                }]
            }
            Axiom::Dis(r, s) => {
                let r = self.plain_role(*r, origin);
                let s = self.plain_role(*s, origin);
                vec![Axiom::Dis(RoleExpr::plain(r), RoleExpr::plain(s))]
            }
            Axiom::Inv(..) | Axiom::Irr(_) => vec![*ax],
        }
    }

    /// Rewrite a defeasible axiom; may emit companion strict axioms.
    fn defeasible_axiom(&mut self, ax: &Axiom, stmt_index: usize, origin: &str) {
        match ax {
            Axiom::ConceptIncl { lhs, rhs } => {
                let lhs_c = match lhs {
                    LeftConcept::Atomic(a) => *a,
                    LeftConcept::Exists(r) => {
                        let role = self.plain_role(*r, origin);
                        self.ex_concept(role, origin)
                    }
                };
                match rhs {
                    RightConcept::Atomic(b) => {
                        self.push_def(atomic_incl(lhs_c, *b), origin);
                    }
                    RightConcept::Exists(r) => {
                        let role = self.plain_role(*r, origin);
                        let ex = self.ex_concept(role, origin);
                        self.push_def(atomic_incl(lhs_c, ex), origin);
                    }
                    RightConcept::Bottom => {
                        let bot = self.bottom_concept(origin);
                        self.push_def(atomic_incl(lhs_c, bot), origin);
                    }
                    // D(A [= not B)  =>  D(A [= A'), B [= not A'
                    RightConcept::Not(inner) => {
                        let b = match inner {
                            LeftConcept::Atomic(b) => *b,
                            LeftConcept::Exists(r) => {
                                let role = self.plain_role(*r, origin);
                                self.ex_concept(role, origin)
                            }
                        };
                        let hint =
                            format!("_nf_a{stmt_index}_{}", self.out.vocab.concept_name(b));
                        let surrogate = self.fresh_concept(&hint, origin);
                        self.push_def(atomic_incl(lhs_c, surrogate), origin);
                        self.out.strict.push(Axiom::ConceptIncl {
                            lhs: LeftConcept::Atomic(b),
                            rhs: RightConcept::Not(LeftConcept::Atomic(surrogate)),
                        });
                    }
                }
            }
            Axiom::RoleIncl { lhs, rhs } => {
                let l = self.plain_role(*lhs, origin);
                let r = self.plain_role(*rhs, origin);
                self.push_def(
                    Axiom::RoleIncl {
                        lhs: RoleExpr::plain(l),
                        rhs: RoleExpr::plain(r),
                    },
                    origin,
                );
            }
            Axiom::Inv(..) | Axiom::Irr(_) => self.push_def(*ax, origin),
            // Defeasible role disjointness has no normal form; the parser
            // and validator reject it, so pass it through untouched.
            Axiom::Dis(..) => self.push_def(*ax, origin),
        }
    }

    fn push_def(&mut self, ax: Axiom, origin: &str) {
        self.out.push_defeasible(ax);
        self.trace.defeasible_origin.push(origin.to_string());
    }

    /// Rewrite a strict ABox assertion.
    fn strict_assertion(&mut self, a: &Assertion, stmt_index: usize, origin: &str) {
        if a.positive && a.is_normal() {
            self.out.abox.push(*a);
            return;
        }
        match a.kind {
            AssertionKind::Concept(atom, ind) => {
                let concept = match atom {
                    ConceptAtom::Named(c) => c,
                    ConceptAtom::Exists(role) => self.ex_concept(role, origin),
                };
                if a.positive {
                    // exists R(a) over the bridge concept.
                    self.out.abox.push(Assertion::concept(concept, ind));
                } else {
                    // not A(a)  =>  A_a(a), A_a [= not A
                    let hint =
                        format!("_nf_a{stmt_index}_{}", self.out.vocab.concept_name(concept));
                    let fresh = self.fresh_concept(&hint, origin);
                    self.out.abox.push(Assertion::concept(fresh, ind));
                    self.out.strict.push(Axiom::ConceptIncl {
                        lhs: LeftConcept::Atomic(fresh),
                        rhs: RightConcept::Not(LeftConcept::Atomic(concept)),
                    });
                }
            }
            // not R(a,b)  =>  R'(a,b), Dis(R,R')
            AssertionKind::Role(role, x, y) => {
                let hint = format!("_nf_a{stmt_index}_{}", self.out.vocab.role_name(role));
                let fresh = self.fresh_role(&hint, origin);
                self.out.abox.push(Assertion::role(fresh, x, y));
                self.out
                    .strict
                    .push(Axiom::Dis(RoleExpr::plain(role), RoleExpr::plain(fresh)));
            }
        }
    }

    /// Compile a defeasible assertion into fresh-symbol statements.
    fn defeasible_assertion(&mut self, a: &Assertion, stmt_index: usize, origin: &str) {
        match (a.positive, a.kind) {
            // D(A(a))  =>  A'(a), D(A' [= A)
            (true, AssertionKind::Concept(atom, ind)) => {
                let concept = match atom {
                    ConceptAtom::Named(c) => c,
                    ConceptAtom::Exists(role) => self.ex_concept(role, origin),
                };
                let hint = format!("_nf_a{stmt_index}_{}", self.out.vocab.concept_name(concept));
                let fresh = self.fresh_concept(&hint, origin);
                self.out.abox.push(Assertion::concept(fresh, ind));
                self.push_def(atomic_incl(fresh, concept), origin);
            }
            // D(R(a,b))  =>  R'(a,b), D(R' [= R)
            (true, AssertionKind::Role(role, x, y)) => {
                let hint = format!("_nf_a{stmt_index}_{}", self.out.vocab.role_name(role));
                let fresh = self.fresh_role(&hint, origin);
                self.out.abox.push(Assertion::role(fresh, x, y));
                self.push_def(
                    Axiom::RoleIncl {
                        lhs: RoleExpr::plain(fresh),
                        rhs: RoleExpr::plain(role),
                    },
                    origin,
                );
            }
            // D(not A(a))  =>  A_a(a), D(A_a [= A'), A [= not A'
            (false, AssertionKind::Concept(atom, ind)) => {
                let concept = match atom {
                    ConceptAtom::Named(c) => c,
                    ConceptAtom::Exists(role) => self.ex_concept(role, origin),
                };
                let hint = format!("_nf_a{stmt_index}_{}", self.out.vocab.concept_name(concept));
                let witness = self.fresh_concept(&hint, origin);
                let surrogate = self.fresh_concept(&hint, origin);
                self.out.abox.push(Assertion::concept(witness, ind));
                self.push_def(atomic_incl(witness, surrogate), origin);
                self.out.strict.push(Axiom::ConceptIncl {
                    lhs: LeftConcept::Atomic(concept),
                    rhs: RightConcept::Not(LeftConcept::Atomic(surrogate)),
                });
            }
            // D(not R(a,b))  =>  R'(a,b), D(R' [= S), Dis(R,S)
            (false, AssertionKind::Role(role, x, y)) => {
                let hint = format!("_nf_a{stmt_index}_{}", self.out.vocab.role_name(role));
                let witness = self.fresh_role(&hint, origin);
                let surrogate = self.fresh_role(&hint, origin);
                self.out.abox.push(Assertion::role(witness, x, y));
                self.push_def(
                    Axiom::RoleIncl {
                        lhs: RoleExpr::plain(witness),
                        rhs: RoleExpr::plain(surrogate),
                    },
                    origin,
                );
                self.out
                    .strict
                    .push(Axiom::Dis(RoleExpr::plain(role), RoleExpr::plain(surrogate)));
            }
        }
    }

    /// Append the missing bridge axioms for every existentially used role.
    fn add_bridges(&mut self) {
        let roles: Vec<RoleId> = self.ex_used.iter().copied().collect();
        for role in roles {
            let ex = self.ex_concept(role, "bridge");
            if !self.have_sub_bridge.contains(&role) {
                self.out.strict.push(Axiom::ConceptIncl {
                    lhs: LeftConcept::Exists(RoleExpr::plain(role)),
                    rhs: RightConcept::Atomic(ex),
                });
            }
            if !self.have_sup_bridge.contains(&role) {
                self.out.strict.push(Axiom::ConceptIncl {
                    lhs: LeftConcept::Atomic(ex),
                    rhs: RightConcept::Exists(RoleExpr::plain(role)),
                });
            }
        }
    }
}

fn atomic_incl(lhs: ConceptId, rhs: ConceptId) -> Axiom {
    Axiom::ConceptIncl {
        lhs: LeftConcept::Atomic(lhs),
        rhs: RightConcept::Atomic(rhs),
    }
}

fn bridge_of(vocab: &crate::kb::Vocabulary, ax: &Axiom) -> Option<(RoleId, bool)> {
    match ax {
        Axiom::ConceptIncl {
            lhs: LeftConcept::Exists(r),
            rhs: RightConcept::Atomic(b),
        } if !r.inverted => {
            let expected = format!("_ex_{}", vocab.role_name(r.role));
            (vocab.concept_name(*b) == expected).then_some((r.role, true))
        }
        Axiom::ConceptIncl {
            lhs: LeftConcept::Atomic(a),
            rhs: RightConcept::Exists(r),
        } if !r.inverted => {
            let expected = format!("_ex_{}", vocab.role_name(r.role));
            (vocab.concept_name(*a) == expected).then_some((r.role, false))
        }
        _ => None,
    }
}

/// Transform a knowledge base into normal form.
///
/// The result has the same models as the input modulo the fresh auxiliary
/// symbols, and the exception-safety verdict is unchanged.
pub fn normalize(k: &Dkb) -> (Dkb, NormalizationTrace) {
    let mut n = Normalizer {
        out: Dkb {
            vocab: k.vocab.clone(),
            una: k.una,
            ..Dkb::new()
        },
        trace: NormalizationTrace::default(),
        inverse_of: HashMap::new(),
        ex_concept: HashMap::new(),
        ex_used: IndexSet::new(),
        have_sub_bridge: IndexSet::new(),
        have_sup_bridge: IndexSet::new(),
        bottom: None,
    };

    fn snapshot(n: &Normalizer) -> (usize, usize, usize) {
        (n.out.strict.len(), n.out.defeasible.len(), n.out.abox.len())
    }
    fn step(n: &mut Normalizer, source: String, before: (usize, usize, usize)) {
        let produced_strict = n.out.strict[before.0..]
            .iter()
            .map(|a| axiom_text(&n.out.vocab, a));
        let produced_def = n.out.defeasible[before.1..]
            .iter()
            .map(|d| format!("D: {}", axiom_text(&n.out.vocab, &d.inner)));
        let produced_abox = n.out.abox[before.2..]
            .iter()
            .map(|a| assertion_text(&n.out.vocab, a));
        let produced: Vec<String> =
            produced_strict.chain(produced_def).chain(produced_abox).collect();
        n.trace.rewrite_steps.push(RewriteStep { source, produced });
    }

    let mut stmt_index = 0usize;
    for ax in &k.strict {
        let origin = axiom_text(&k.vocab, ax);
        let before = snapshot(&n);
        let rewritten = n.strict_axiom(ax, &origin);
        n.out.strict.extend(rewritten);
        step(&mut n, origin, before);
        stmt_index += 1;
    }
    for d in &k.defeasible {
        let origin = format!("D: {}", axiom_text(&k.vocab, &d.inner));
        let before = snapshot(&n);
        n.defeasible_axiom(&d.inner, stmt_index, &origin);
        step(&mut n, origin, before);
        stmt_index += 1;
    }
    for a in &k.abox {
        let origin = assertion_text(&k.vocab, a);
        let before = snapshot(&n);
        n.strict_assertion(a, stmt_index, &origin);
        step(&mut n, origin, before);
        stmt_index += 1;
    }
    for a in &k.defeasible_abox {
        let origin = format!("D: {}", assertion_text(&k.vocab, a));
        let before = snapshot(&n);
        n.defeasible_assertion(a, stmt_index, &origin);
        step(&mut n, origin, before);
        stmt_index += 1;
    }
    let _ = stmt_index;
    n.add_bridges();
    (n.out, n.trace)
}

/// True iff every statement matches a normal-form shape and both bridge
/// axioms are present for every existentially used role.
pub fn is_normal_form(k: &Dkb) -> bool {
    if !k.defeasible_abox.is_empty() {
        return false;
    }
    let mut ex_roles: IndexSet<RoleId> = IndexSet::new();
    let mut sub_bridges: IndexSet<RoleId> = IndexSet::new();
    let mut sup_bridges: IndexSet<RoleId> = IndexSet::new();
    for ax in &k.strict {
        if let Some((role, is_sub)) = bridge_of(&k.vocab, ax) {
            ex_roles.insert(role);
            if is_sub {
                sub_bridges.insert(role);
            } else {
                sup_bridges.insert(role);
            }
            continue;
        }
        match ax {
            Axiom::ConceptIncl {
                lhs: LeftConcept::Atomic(_),
                rhs: RightConcept::Atomic(_) | RightConcept::Not(LeftConcept::Atomic(_)),
            } => {}
            Axiom::RoleIncl { lhs, rhs } if !lhs.inverted && !rhs.inverted => {}
            Axiom::Dis(r, s) if !r.inverted && !s.inverted => {}
            Axiom::Inv(..) | Axiom::Irr(_) => {}
            _ => return false,
        }
    }
    for d in &k.defeasible {
        match &d.inner {
            Axiom::ConceptIncl {
                lhs: LeftConcept::Atomic(_),
                rhs: RightConcept::Atomic(_),
            } => {}
            Axiom::RoleIncl { lhs, rhs } if !lhs.inverted && !rhs.inverted => {}
            Axiom::Inv(..) | Axiom::Irr(_) => {}
            _ => return false,
        }
    }
    for a in &k.abox {
        if !a.is_normal() {
            return false;
        }
    }
    ex_roles
        .iter()
        .all(|r| sub_bridges.contains(r) && sup_bridges.contains(r))
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

    #[test]
    fn dept_normalizes_to_normal_form() {
        let k = parse_dkb(DEPT).unwrap();
        assert!(!is_normal_form(&k));
        let (nk, trace) = normalize(&k);
        assert!(is_normal_form(&nk));
        assert_eq!(nk.defeasible.len(), 1);
        assert_eq!(
            axiom_text(&nk.vocab, &nk.defeasible[0].inner),
            "DeptMember [= _ex_hasCourse"
        );
        assert_eq!(
            trace.origin_of(nk.defeasible[0].id),
            "D: DeptMember [= exists hasCourse"
        );
        let texts: Vec<String> = nk.strict.iter().map(|a| axiom_text(&nk.vocab, a)).collect();
        assert!(texts.contains(&"PhDStudent [= not _ex_hasCourse".to_string()));
        assert!(texts.contains(&"exists hasCourse [= _ex_hasCourse".to_string()));
        assert!(texts.contains(&"_ex_hasCourse [= exists hasCourse".to_string()));
    }

    #[test]
    fn normalize_is_idempotent() {
        for src in [
            DEPT,
            "A [= exists R^-.\nnot A(a).\nD: not R(a,b).\nD: B(a).\nD: A [= not B.",
            "Employee [= exists hasSupervisor.\nexists hasSupervisor^- [= Employee.\n\
             D: exists hasSupervisor^- [= bot.\nEmployee(alice).",
            "",
        ] {
            let k = parse_dkb(src).unwrap();
            let (n1, _) = normalize(&k);
            assert!(is_normal_form(&n1), "not normal for {src:?}");
            let (n2, _) = normalize(&n1);
            assert_eq!(n1, n2, "not idempotent for {src:?}");
        }
    }

    #[test]
    fn defeasible_negative_rhs_rewrite() {
        let k = parse_dkb("D: A [= not B.").unwrap();
        let (nk, _) = normalize(&k);
        assert_eq!(nk.defeasible.len(), 1);
        let def = axiom_text(&nk.vocab, &nk.defeasible[0].inner);
        assert_eq!(def, "A [= _nf_a0_B");
        let strict: Vec<String> = nk.strict.iter().map(|a| axiom_text(&nk.vocab, a)).collect();
        assert_eq!(strict, vec!["B [= not _nf_a0_B".to_string()]);
    }

    #[test]
    fn supervisor_example_rewrite() {
        // D(exists hasSupervisor^- [= bot) goes through the shared inverse
        // role, the bridge concept for it, and the bottom scaffolding.
        let k = parse_dkb("D: exists hasSupervisor^- [= bot.").unwrap();
        let (nk, _) = normalize(&k);
        assert!(is_normal_form(&nk));
        let strict: Vec<String> = nk.strict.iter().map(|a| axiom_text(&nk.vocab, a)).collect();
        assert_eq!(
            strict,
            vec![
                "Inv(hasSupervisor,_nf_hasSupervisor_inv)".to_string(),
                "_nf_bot [= _nf_f".to_string(),
                "_nf_bot [= not _nf_f".to_string(),
                "exists _nf_hasSupervisor_inv [= _ex__nf_hasSupervisor_inv".to_string(),
                "_ex__nf_hasSupervisor_inv [= exists _nf_hasSupervisor_inv".to_string(),
            ]
        );
        assert_eq!(
            axiom_text(&nk.vocab, &nk.defeasible[0].inner),
            "_ex__nf_hasSupervisor_inv [= _nf_bot"
        );
    }

    #[test]
    fn negative_assertions_compile_away() {
        let k = parse_dkb("not A(a).\nnot R(a,b).").unwrap();
        let (nk, _) = normalize(&k);
        assert!(is_normal_form(&nk));
        assert!(nk.abox.iter().all(|a| a.positive));
        let strict: Vec<String> = nk.strict.iter().map(|a| axiom_text(&nk.vocab, a)).collect();
        assert!(strict.contains(&"_nf_a0_A [= not A".to_string()));
        assert!(strict.contains(&"Dis(R,_nf_a1_R)".to_string()));
    }

    #[test]
    fn defeasible_assertions_compile_away() {
        let k = parse_dkb("D: A(a).\nD: R(a,b).\nD: not A(b).").unwrap();
        let (nk, _) = normalize(&k);
        assert!(is_normal_form(&nk));
        assert!(nk.defeasible_abox.is_empty());
        assert_eq!(nk.defeasible.len(), 3);
    }

    #[test]
    fn empty_kb_is_normal() {
        let k = parse_dkb("").unwrap();
        assert!(is_normal_form(&k));
        let (nk, trace) = normalize(&k);
        assert_eq!(nk, k);
        assert!(trace.introduced_symbols.is_empty());
    }

    #[test]
    fn size_bound_factor_six() {
        for src in [
            DEPT,
            "D: exists hasSupervisor^- [= bot.",
            "not A(a).\nnot R(a,b).\nD: not R(b,a).\nD: not B(a).",
            "A [= exists R^-.\nB [= exists R.\nexists R [= C.",
        ] {
            let k = parse_dkb(src).unwrap();
            let (nk, _) = normalize(&k);
            let input = k.statement_count().max(1);
            assert!(
                nk.statement_count() <= 6 * input,
                "{src:?}: {} > 6*{input}",
                nk.statement_count()
            );
        }
    }
}
