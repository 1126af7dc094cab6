//! Datalog abstract syntax and the translation of normal-form knowledge
//! bases into a program whose answer sets correspond to the justified
//! exception sets.
//!
//! The program `PK(K)` is the union of a fixed, knowledge-base-independent
//! rule set ([`deduction_rules`]) and the input facts ([`input_translation`]),
//! completed with `const`/`first`/`next`/`last` facts that enumerate the
//! constant universe (named individuals first, then the auxiliary witness
//! constants of existential axioms).

use std::collections::HashMap;
use std::fmt;

use indexmap::IndexSet;
use thiserror::Error;

use crate::kb::{
    Args, Assertion, AssertionKind, Axiom, ConceptAtom, ConceptId, DefAxiomId, Dkb, IndId,
    LeftConcept, RightConcept, RoleId, Vocabulary,
};
use crate::normalize::is_normal_form;
use crate::safety::{check_exception_safe, SafetyError, SafetyReport};

/// Predicates of the translation signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pred {
    Nom,
    Cls,
    Rol,
    Insta,
    Triplea,
    SubClass,
    SupNot,
    SubEx,
    SupEx,
    SubRole,
    Dis,
    Inv,
    Irr,
    DefSubclass,
    DefSubr,
    DefInv,
    DefIrr,
    Instd,
    Tripled,
    Ovr,
    Const,
    First,
    Next,
    Last,
    AllNrel,
    AllNrelStep,
}

impl Pred {
    pub fn name(&self) -> &'static str {
        match self {
            Pred::Nom => "nom",
            Pred::Cls => "cls",
            Pred::Rol => "rol",
            Pred::Insta => "insta",
            Pred::Triplea => "triplea",
            Pred::SubClass => "subClass",
            Pred::SupNot => "supNot",
            Pred::SubEx => "subEx",
            Pred::SupEx => "supEx",
            Pred::SubRole => "subRole",
            Pred::Dis => "dis",
            Pred::Inv => "inv",
            Pred::Irr => "irr",
            Pred::DefSubclass => "def_subclass",
            Pred::DefSubr => "def_subr",
            Pred::DefInv => "def_inv",
            Pred::DefIrr => "def_irr",
            Pred::Instd => "instd",
            Pred::Tripled => "tripled",
            Pred::Ovr => "ovr",
            Pred::Const => "const",
            Pred::First => "first",
            Pred::Next => "next",
            Pred::Last => "last",
            Pred::AllNrel => "all_nrel",
            Pred::AllNrelStep => "all_nrel_step",
        }
    }

    /// Input-translation predicates have no rules; their extension is the
    /// fact set.
    pub fn is_fact_pred(&self) -> bool {
        !matches!(
            self,
            Pred::Instd | Pred::Tripled | Pred::Ovr | Pred::AllNrel | Pred::AllNrelStep
        )
    }
}

/// Tag constant in the first position of `ovr`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OvrTag {
    SubClass,
    SubRole,
    Inv,
    Irr,
}

impl OvrTag {
    pub fn name(&self) -> &'static str {
        match self {
            OvrTag::SubClass => "subClass",
            OvrTag::SubRole => "subRole",
            OvrTag::Inv => "inv",
            OvrTag::Irr => "irr",
        }
    }
}

/// Argument sorts used by the typed grounder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    /// Individuals and auxiliary constants.
    Constant,
    Concept,
    Role,
    Tag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DConst {
    Ind(IndId),
    /// Witness constant of the n-th existential axiom occurrence.
    Aux(u32),
    Cls(ConceptId),
    Rol(RoleId),
    Tag(OvrTag),
}

impl DConst {
    pub fn sort(&self) -> Sort {
        match self {
            DConst::Ind(_) | DConst::Aux(_) => Sort::Constant,
            DConst::Cls(_) => Sort::Concept,
            DConst::Rol(_) => Sort::Role,
            DConst::Tag(_) => Sort::Tag,
        }
    }

    pub fn display<'a>(&'a self, vocab: &'a Vocabulary) -> DConstDisplay<'a> {
        DConstDisplay { c: self, vocab }
    }
}

pub struct DConstDisplay<'a> {
    c: &'a DConst,
    vocab: &'a Vocabulary,
}

impl fmt::Display for DConstDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.c {
            DConst::Ind(i) => write!(f, "{}", self.vocab.individual_name(*i)),
            DConst::Aux(n) => write!(f, "aux_{}", n + 1),
            DConst::Cls(c) => write!(f, "{}", self.vocab.concept_name(*c)),
            DConst::Rol(r) => write!(f, "{}", self.vocab.role_name(*r)),
            DConst::Tag(t) => write!(f, "{}", t.name()),
        }
    }
}

/// Terms: interned constants or rule variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DTerm {
    Const(DConst),
    Var(u8),
}

pub const VAR_NAMES: [&str; 10] = ["X", "Y", "Z", "X1", "V", "W", "R", "S", "U", "Y1"];
const VX: DTerm = DTerm::Var(0);
const VY: DTerm = DTerm::Var(1);
const VZ: DTerm = DTerm::Var(2);
const VX1: DTerm = DTerm::Var(3);
const VV: DTerm = DTerm::Var(4);
const VW: DTerm = DTerm::Var(5);
const VR: DTerm = DTerm::Var(6);
const VS: DTerm = DTerm::Var(7);
const VU: DTerm = DTerm::Var(8);
const VY1: DTerm = DTerm::Var(9);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DAtom {
    pub pred: Pred,
    pub args: Vec<DTerm>,
}

impl DAtom {
    pub fn new(pred: Pred, args: Vec<DTerm>) -> Self {
        DAtom { pred, args }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DLiteral {
    pub strong_neg: bool,
    pub atom: DAtom,
}

impl DLiteral {
    pub fn pos(pred: Pred, args: Vec<DTerm>) -> Self {
        DLiteral { strong_neg: false, atom: DAtom::new(pred, args) }
    }

    pub fn neg(pred: Pred, args: Vec<DTerm>) -> Self {
        DLiteral { strong_neg: true, atom: DAtom::new(pred, args) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DRule {
    pub name: &'static str,
    pub head: DLiteral,
    pub body_pos: Vec<DLiteral>,
    pub body_naf: Vec<DLiteral>,
    /// Instances binding these two variables to the same auxiliary witness
    /// constant are dropped at grounding time. The collapse of all
    /// witnesses of an existential axiom into one constant folds a role
    /// pair and its swap into the diagonal; negative conclusions about
    /// that diagonal are unsound, and genuine violations always replicate
    /// on a first-generation (named, aux) instance.
    pub no_aux_diagonal: Option<(u8, u8)>,
}

impl DRule {
    /// Rule safety: every variable of the head and the NAF part occurs in
    /// the positive body.
    pub fn is_safe(&self) -> bool {
        let mut bound: IndexSet<u8> = IndexSet::new();
        for lit in &self.body_pos {
            for t in &lit.atom.args {
                if let DTerm::Var(v) = t {
                    bound.insert(*v);
                }
            }
        }
        let check = |lit: &DLiteral, bound: &IndexSet<u8>| {
            lit.atom.args.iter().all(|t| match t {
                DTerm::Var(v) => bound.contains(v),
                DTerm::Const(_) => true,
            })
        };
        check(&self.head, &bound) && self.body_naf.iter().all(|l| check(l, &bound))
    }
}

/// A datalog program with strong negation; default negation occurs only on
/// `ovr` atoms.
#[derive(Debug, Clone, Default)]
pub struct DProgram {
    pub rules: Vec<DRule>,
    pub facts: Vec<DLiteral>,
    /// Lookup from an `ovr` tag and the axiom symbols to the defeasible
    /// axiom, used to read exception sets off answer sets.
    pub def_index: HashMap<(OvrTag, Vec<DConst>), DefAxiomId>,
}

// ---------------------------------------------------------------------------
// Deduction rules
// ---------------------------------------------------------------------------

fn rule(
    name: &'static str,
    head: DLiteral,
    body_pos: Vec<DLiteral>,
    body_naf: Vec<DLiteral>,
) -> DRule {
    DRule { name, head, body_pos, body_naf, no_aux_diagonal: None }
}

fn rule_no_diag(
    name: &'static str,
    head: DLiteral,
    body_pos: Vec<DLiteral>,
) -> DRule {
    DRule { name, head, body_pos, body_naf: vec![], no_aux_diagonal: Some((0, 1)) }
}

/// The fixed rule set: positive instance rules, contrapositive negative
/// rules, the `all_nrel` iteration over the constant chain, and the
/// overriding/application rules for defeasible axioms.
pub fn deduction_rules() -> Vec<DRule> {
    use DLiteral as L;
    let tag = |t: OvrTag| DTerm::Const(DConst::Tag(t));
    vec![
        // Instance-level copies of the ABox facts.
        rule("instd", L::pos(Pred::Instd, vec![VX, VZ]), vec![L::pos(Pred::Insta, vec![VX, VZ])], vec![]),
        rule("tripled", L::pos(Pred::Tripled, vec![VX, VR, VY]), vec![L::pos(Pred::Triplea, vec![VX, VR, VY])], vec![]),
        // Positive closure under the strict axioms.
        rule("subc", L::pos(Pred::Instd, vec![VX, VZ]),
            vec![L::pos(Pred::SubClass, vec![VY, VZ]), L::pos(Pred::Instd, vec![VX, VY])], vec![]),
        rule("supnot", L::neg(Pred::Instd, vec![VX, VZ]),
            vec![L::pos(Pred::SupNot, vec![VY, VZ]), L::pos(Pred::Instd, vec![VX, VY])], vec![]),
        rule("subex", L::pos(Pred::Instd, vec![VX, VZ]),
            vec![L::pos(Pred::SubEx, vec![VV, VZ]), L::pos(Pred::Tripled, vec![VX, VV, VX1])], vec![]),
        rule("supex", L::pos(Pred::Tripled, vec![VX, VR, VX1]),
            vec![L::pos(Pred::SupEx, vec![VY, VR, VX1]), L::pos(Pred::Instd, vec![VX, VY])], vec![]),
        rule("subr", L::pos(Pred::Tripled, vec![VX, VW, VX1]),
            vec![L::pos(Pred::SubRole, vec![VV, VW]), L::pos(Pred::Tripled, vec![VX, VV, VX1])], vec![]),
        rule_no_diag("dis1", L::neg(Pred::Tripled, vec![VX, VU, VY]),
            vec![L::pos(Pred::Dis, vec![VU, VV]), L::pos(Pred::Tripled, vec![VX, VV, VY])]),
        rule_no_diag("dis2", L::neg(Pred::Tripled, vec![VX, VV, VY]),
            vec![L::pos(Pred::Dis, vec![VU, VV]), L::pos(Pred::Tripled, vec![VX, VU, VY])]),
        rule("inv1", L::pos(Pred::Tripled, vec![VY, VV, VX]),
            vec![L::pos(Pred::Inv, vec![VU, VV]), L::pos(Pred::Tripled, vec![VX, VU, VY])], vec![]),
        rule("inv2", L::pos(Pred::Tripled, vec![VY, VU, VX]),
            vec![L::pos(Pred::Inv, vec![VU, VV]), L::pos(Pred::Tripled, vec![VX, VV, VY])], vec![]),
        // Ranges over named constants, not the collapsed witness
        // constants: a witness class never holds a genuine self-loop
        // (f(t) differs from t and from all other Skolem terms), while the
        // collapse can fold distinct witnesses into one constant.
        rule("irr", L::neg(Pred::Tripled, vec![VX, VU, VX]),
            vec![L::pos(Pred::Irr, vec![VU]), L::pos(Pred::Nom, vec![VX])], vec![]),
        // Contrapositive negative closure.
        rule("nsubc", L::neg(Pred::Instd, vec![VX, VY]),
            vec![L::pos(Pred::SubClass, vec![VY, VZ]), L::neg(Pred::Instd, vec![VX, VZ])], vec![]),
        rule("nsupnot", L::neg(Pred::Instd, vec![VX, VY]),
            vec![L::pos(Pred::SupNot, vec![VY, VZ]), L::pos(Pred::Instd, vec![VX, VZ])], vec![]),
        rule("nsubex", L::neg(Pred::Tripled, vec![VX, VV, VX1]),
            vec![L::pos(Pred::SubEx, vec![VV, VZ]), L::pos(Pred::Const, vec![VX1]), L::neg(Pred::Instd, vec![VX, VZ])], vec![]),
        rule("nsupex", L::neg(Pred::Instd, vec![VX, VY]),
            vec![L::pos(Pred::SupEx, vec![VY, VR, VW]), L::pos(Pred::Const, vec![VX]), L::pos(Pred::AllNrel, vec![VX, VR])], vec![]),
        rule("nsubr", L::neg(Pred::Tripled, vec![VX, VV, VX1]),
            vec![L::pos(Pred::SubRole, vec![VV, VW]), L::neg(Pred::Tripled, vec![VX, VW, VX1])], vec![]),
        rule("ninv1", L::neg(Pred::Tripled, vec![VY, VV, VX]),
            vec![L::pos(Pred::Inv, vec![VU, VV]), L::neg(Pred::Tripled, vec![VX, VU, VY])], vec![]),
        rule("ninv2", L::neg(Pred::Tripled, vec![VY, VU, VX]),
            vec![L::pos(Pred::Inv, vec![VU, VV]), L::neg(Pred::Tripled, vec![VX, VV, VY])], vec![]),
        // Universal negative role check: walk the constant chain.
        rule("allnrel1", L::pos(Pred::AllNrelStep, vec![VX, VR, VY]),
            vec![L::pos(Pred::First, vec![VY]), L::neg(Pred::Tripled, vec![VX, VR, VY])], vec![]),
        rule("allnrel2", L::pos(Pred::AllNrelStep, vec![VX, VR, VY]),
            vec![L::pos(Pred::AllNrelStep, vec![VX, VR, VY1]), L::pos(Pred::Next, vec![VY1, VY]), L::neg(Pred::Tripled, vec![VX, VR, VY])], vec![]),
        rule("allnrel3", L::pos(Pred::AllNrel, vec![VX, VR]),
            vec![L::pos(Pred::Last, vec![VY]), L::pos(Pred::AllNrelStep, vec![VX, VR, VY])], vec![]),
        // Overriding rules: the clashing-set conditions.
        rule("ovr-subc", L::pos(Pred::Ovr, vec![tag(OvrTag::SubClass), VX, VY, VZ]),
            vec![L::pos(Pred::DefSubclass, vec![VY, VZ]), L::pos(Pred::Instd, vec![VX, VY]), L::neg(Pred::Instd, vec![VX, VZ])], vec![]),
        rule("ovr-subr", L::pos(Pred::Ovr, vec![tag(OvrTag::SubRole), VX, VY, VR, VS]),
            vec![L::pos(Pred::DefSubr, vec![VR, VS]), L::pos(Pred::Tripled, vec![VX, VR, VY]), L::neg(Pred::Tripled, vec![VX, VS, VY])], vec![]),
        rule("ovr-inv1", L::pos(Pred::Ovr, vec![tag(OvrTag::Inv), VX, VY, VR, VS]),
            vec![L::pos(Pred::DefInv, vec![VR, VS]), L::pos(Pred::Tripled, vec![VX, VR, VY]), L::neg(Pred::Tripled, vec![VY, VS, VX])], vec![]),
        rule("ovr-inv2", L::pos(Pred::Ovr, vec![tag(OvrTag::Inv), VX, VY, VR, VS]),
            vec![L::pos(Pred::DefInv, vec![VR, VS]), L::pos(Pred::Tripled, vec![VY, VS, VX]), L::neg(Pred::Tripled, vec![VX, VR, VY])], vec![]),
        rule("ovr-irr", L::pos(Pred::Ovr, vec![tag(OvrTag::Irr), VX, VR]),
            vec![L::pos(Pred::DefIrr, vec![VR]), L::pos(Pred::Tripled, vec![VX, VR, VX])], vec![]),
        // Application rules: defeasible axioms fire unless overridden.
        rule("app-subc", L::pos(Pred::Instd, vec![VX, VZ]),
            vec![L::pos(Pred::DefSubclass, vec![VY, VZ]), L::pos(Pred::Instd, vec![VX, VY])],
            vec![L::pos(Pred::Ovr, vec![tag(OvrTag::SubClass), VX, VY, VZ])]),
        rule("app-subr", L::pos(Pred::Tripled, vec![VX, VW, VY]),
            vec![L::pos(Pred::DefSubr, vec![VV, VW]), L::pos(Pred::Tripled, vec![VX, VV, VY])],
            vec![L::pos(Pred::Ovr, vec![tag(OvrTag::SubRole), VX, VY, VV, VW])]),
        rule("app-inv1", L::pos(Pred::Tripled, vec![VY, VV, VX]),
            vec![L::pos(Pred::DefInv, vec![VU, VV]), L::pos(Pred::Tripled, vec![VX, VU, VY])],
            vec![L::pos(Pred::Ovr, vec![tag(OvrTag::Inv), VX, VY, VU, VV])]),
        rule("app-inv2", L::pos(Pred::Tripled, vec![VX, VU, VY]),
            vec![L::pos(Pred::DefInv, vec![VU, VV]), L::pos(Pred::Tripled, vec![VY, VV, VX])],
            vec![L::pos(Pred::Ovr, vec![tag(OvrTag::Inv), VX, VY, VU, VV])]),
        // Named constants only, as for the strict irreflexivity rule.
        rule("app-irr", L::neg(Pred::Tripled, vec![VX, VU, VX]),
            vec![L::pos(Pred::DefIrr, vec![VU]), L::pos(Pred::Nom, vec![VX])],
            vec![L::pos(Pred::Ovr, vec![tag(OvrTag::Irr), VX, VU])]),
        rule("app-nsubc", L::neg(Pred::Instd, vec![VX, VY]),
            vec![L::pos(Pred::DefSubclass, vec![VY, VZ]), L::neg(Pred::Instd, vec![VX, VZ])],
            vec![L::pos(Pred::Ovr, vec![tag(OvrTag::SubClass), VX, VY, VZ])]),
        rule("app-nsubr", L::neg(Pred::Tripled, vec![VX, VV, VY]),
            vec![L::pos(Pred::DefSubr, vec![VV, VW]), L::neg(Pred::Tripled, vec![VX, VW, VY])],
            vec![L::pos(Pred::Ovr, vec![tag(OvrTag::SubRole), VX, VY, VV, VW])]),
        rule("app-ninv1", L::neg(Pred::Tripled, vec![VY, VV, VX]),
            vec![L::pos(Pred::DefInv, vec![VU, VV]), L::neg(Pred::Tripled, vec![VX, VU, VY])],
            vec![L::pos(Pred::Ovr, vec![tag(OvrTag::Inv), VX, VY, VU, VV])]),
        rule("app-ninv2", L::neg(Pred::Tripled, vec![VX, VU, VY]),
            vec![L::pos(Pred::DefInv, vec![VU, VV]), L::neg(Pred::Tripled, vec![VY, VV, VX])],
            vec![L::pos(Pred::Ovr, vec![tag(OvrTag::Inv), VX, VY, VU, VV])]),
    ]
}

// ---------------------------------------------------------------------------
// Input translation
// ---------------------------------------------------------------------------

#[derive(Debug, Error)]
pub enum ProgramError {
    #[error("knowledge base is not in normal form")]
    NotNormalForm,
    #[error("knowledge base is not exception safe")]
    NotExceptionSafe(SafetyReport),
}

impl From<SafetyError> for ProgramError {
    fn from(_: SafetyError) -> Self {
        ProgramError::NotNormalForm
    }
}

fn cls(c: ConceptId) -> DTerm {
    DTerm::Const(DConst::Cls(c))
}

fn rol(r: RoleId) -> DTerm {
    DTerm::Const(DConst::Rol(r))
}

fn ind(i: IndId) -> DTerm {
    DTerm::Const(DConst::Ind(i))
}

/// Translate the signature, axioms and assertions of a normal-form
/// knowledge base into facts, and build the defeasible-axiom lookup.
pub fn input_translation(
    k: &Dkb,
) -> Result<(Vec<DLiteral>, HashMap<(OvrTag, Vec<DConst>), DefAxiomId>), ProgramError> {
    if !is_normal_form(k) {
        return Err(ProgramError::NotNormalForm);
    }
    let mut facts: Vec<DLiteral> = Vec::new();
    let mut def_index: HashMap<(OvrTag, Vec<DConst>), DefAxiomId> = HashMap::new();

    for i in k.vocab.individuals() {
        facts.push(DLiteral::pos(Pred::Nom, vec![ind(i)]));
    }
    for c in k.vocab.concepts() {
        facts.push(DLiteral::pos(Pred::Cls, vec![cls(c)]));
    }
    for r in k.vocab.roles() {
        facts.push(DLiteral::pos(Pred::Rol, vec![rol(r)]));
    }
    for a in &k.abox {
        match a.kind {
            AssertionKind::Concept(ConceptAtom::Named(c), x) => {
                facts.push(DLiteral::pos(Pred::Insta, vec![ind(x), cls(c)]));
            }
            AssertionKind::Role(r, x, y) => {
                facts.push(DLiteral::pos(Pred::Triplea, vec![ind(x), rol(r), ind(y)]));
            }
            AssertionKind::Concept(ConceptAtom::Exists(_), _) => {
                return Err(ProgramError::NotNormalForm)
            }
        }
    }

    let mut aux_counter: u32 = 0;
    for ax in &k.strict {
        match ax {
            Axiom::ConceptIncl { lhs: LeftConcept::Atomic(a), rhs: RightConcept::Atomic(b) } => {
                facts.push(DLiteral::pos(Pred::SubClass, vec![cls(*a), cls(*b)]));
            }
            Axiom::ConceptIncl {
                lhs: LeftConcept::Atomic(a),
                rhs: RightConcept::Not(LeftConcept::Atomic(b)),
            } => {
                facts.push(DLiteral::pos(Pred::SupNot, vec![cls(*a), cls(*b)]));
            }
            Axiom::ConceptIncl { lhs: LeftConcept::Exists(r), rhs: RightConcept::Atomic(b) } => {
                facts.push(DLiteral::pos(Pred::SubEx, vec![rol(r.role), cls(*b)]));
            }
            Axiom::ConceptIncl { lhs: LeftConcept::Atomic(a), rhs: RightConcept::Exists(r) } => {
                let aux = DTerm::Const(DConst::Aux(aux_counter));
                aux_counter += 1;
                facts.push(DLiteral::pos(Pred::SupEx, vec![cls(*a), rol(r.role), aux]));
            }
            Axiom::RoleIncl { lhs, rhs } => {
                facts.push(DLiteral::pos(Pred::SubRole, vec![rol(lhs.role), rol(rhs.role)]));
            }
            Axiom::Dis(r, s) => {
                facts.push(DLiteral::pos(Pred::Dis, vec![rol(r.role), rol(s.role)]));
            }
            Axiom::Inv(r, s) => {
                facts.push(DLiteral::pos(Pred::Inv, vec![rol(*r), rol(*s)]));
            }
            Axiom::Irr(r) => {
                facts.push(DLiteral::pos(Pred::Irr, vec![rol(*r)]));
            }
            _ => return Err(ProgramError::NotNormalForm),
        }
    }
    for d in &k.defeasible {
        match &d.inner {
            Axiom::ConceptIncl { lhs: LeftConcept::Atomic(a), rhs: RightConcept::Atomic(b) } => {
                facts.push(DLiteral::pos(Pred::DefSubclass, vec![cls(*a), cls(*b)]));
                def_index.entry((OvrTag::SubClass, vec![DConst::Cls(*a), DConst::Cls(*b)])).or_insert(d.id);
            }
            Axiom::RoleIncl { lhs, rhs } => {
                facts.push(DLiteral::pos(Pred::DefSubr, vec![rol(lhs.role), rol(rhs.role)]));
                def_index
                    .entry((OvrTag::SubRole, vec![DConst::Rol(lhs.role), DConst::Rol(rhs.role)]))
                    .or_insert(d.id);
            }
            Axiom::Inv(r, s) => {
                facts.push(DLiteral::pos(Pred::DefInv, vec![rol(*r), rol(*s)]));
                def_index.entry((OvrTag::Inv, vec![DConst::Rol(*r), DConst::Rol(*s)])).or_insert(d.id);
            }
            Axiom::Irr(r) => {
                facts.push(DLiteral::pos(Pred::DefIrr, vec![rol(*r)]));
                def_index.entry((OvrTag::Irr, vec![DConst::Rol(*r)])).or_insert(d.id);
            }
            _ => return Err(ProgramError::NotNormalForm),
        }
    }
    Ok((facts, def_index))
}

/// Assemble `PK(K)`: deduction rules, input facts, and the constant chain.
/// Refuses knowledge bases that are not exception safe.
pub fn assemble_program(k: &Dkb) -> Result<DProgram, ProgramError> {
    let report = check_exception_safe(k)?;
    if !report.exception_safe {
        return Err(ProgramError::NotExceptionSafe(report));
    }
    let (mut facts, def_index) = input_translation(k)?;

    // const(c) for every c in a nom fact or third position of supEx, in
    // fact order (named individuals first, then aux constants).
    let mut consts: IndexSet<DConst> = IndexSet::new();
    for f in &facts {
        match f.atom.pred {
            Pred::Nom => {
                if let DTerm::Const(c) = f.atom.args[0] {
                    consts.insert(c);
                }
            }
            Pred::SupEx => {
                if let DTerm::Const(c) = f.atom.args[2] {
                    consts.insert(c);
                }
            }
            _ => {}
        }
    }
    for c in &consts {
        facts.push(DLiteral::pos(Pred::Const, vec![DTerm::Const(*c)]));
    }
    let chain: Vec<DConst> = consts.into_iter().collect();
    if let (Some(first), Some(last)) = (chain.first(), chain.last()) {
        facts.push(DLiteral::pos(Pred::First, vec![DTerm::Const(*first)]));
        for w in chain.windows(2) {
            facts.push(DLiteral::pos(
                Pred::Next,
                vec![DTerm::Const(w[0]), DTerm::Const(w[1])],
            ));
        }
        facts.push(DLiteral::pos(Pred::Last, vec![DTerm::Const(*last)]));
    }

    Ok(DProgram { rules: deduction_rules(), facts, def_index })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OutputError {
    #[error("only atomic concept and role assertions can be queried")]
    UnsupportedAssertion,
}

/// Ground reasoner literal for an ABox query: `A(a)` maps to `instd(a,A)`,
/// `R(a,b)` to `tripled(a,R,b)`; negated assertions map to strong-negated
/// literals.
pub fn output_atom(q: &Assertion) -> Result<DLiteral, OutputError> {
    let lit = match q.kind {
        AssertionKind::Concept(ConceptAtom::Named(c), x) => {
            DLiteral { strong_neg: !q.positive, atom: DAtom::new(Pred::Instd, vec![ind(x), cls(c)]) }
        }
        AssertionKind::Role(r, x, y) => DLiteral {
            strong_neg: !q.positive,
            atom: DAtom::new(Pred::Tripled, vec![ind(x), rol(r), ind(y)]),
        },
        AssertionKind::Concept(ConceptAtom::Exists(_), _) => {
            return Err(OutputError::UnsupportedAssertion)
        }
    };
    Ok(lit)
}

/// Read an exception set off a set of `ovr` argument vectors.
pub fn chi_from_ovr_args(
    def_index: &HashMap<(OvrTag, Vec<DConst>), DefAxiomId>,
    ovr_args: &[Vec<DConst>],
) -> Vec<crate::kb::ClashingAssumption> {
    let mut chi = Vec::new();
    for args in ovr_args {
        let DConst::Tag(tag) = args[0] else {
            panic!("ovr first argument must be a tag constant");
        };
        let (tuple, syms) = match tag {
            OvrTag::SubClass => (&args[1..2], args[2..].to_vec()),
            OvrTag::SubRole | OvrTag::Inv => (&args[1..3], args[3..].to_vec()),
            OvrTag::Irr => (&args[1..2], args[2..].to_vec()),
        };
        let axiom = *def_index
            .get(&(tag, syms))
            .expect("ovr atom refers to a translated defeasible axiom");
        let as_ind = |c: &DConst| match c {
            DConst::Ind(i) => *i,
            other => panic!("exception argument {other:?} is not a named individual"),
        };
        let args = match tuple {
            [e] => Args::Unary(as_ind(e)),
            [e1, e2] => Args::Binary(as_ind(e1), as_ind(e2)),
            _ => unreachable!(),
        };
        chi.push(crate::kb::ClashingAssumption { axiom, args });
    }
    chi.sort();
    chi.dedup();
    chi
}

// ---------------------------------------------------------------------------
// Text emission (ASP-Core-2 compatible)
// ---------------------------------------------------------------------------

fn emit_symbol(s: &str, out: &mut String) {
    let plain = s
        .chars()
        .next()
        .map(|c| c.is_ascii_lowercase())
        .unwrap_or(false)
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if plain {
        out.push_str(s);
    } else {
        out.push('"');
        out.push_str(s);
        out.push('"');
    }
}

fn emit_term(t: &DTerm, vocab: &Vocabulary, out: &mut String) {
    match t {
        DTerm::Var(v) => out.push_str(VAR_NAMES[*v as usize]),
        DTerm::Const(DConst::Tag(tag)) => out.push_str(tag.name()),
        DTerm::Const(DConst::Aux(n)) => out.push_str(&format!("aux_{}", n + 1)),
        DTerm::Const(DConst::Ind(i)) => emit_symbol(vocab.individual_name(*i), out),
        DTerm::Const(DConst::Cls(c)) => emit_symbol(vocab.concept_name(*c), out),
        DTerm::Const(DConst::Rol(r)) => emit_symbol(vocab.role_name(*r), out),
    }
}

fn emit_literal(lit: &DLiteral, vocab: &Vocabulary, out: &mut String) {
    if lit.strong_neg {
        out.push('-');
    }
    out.push_str(lit.atom.pred.name());
    out.push('(');
    for (i, t) in lit.atom.args.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        emit_term(t, vocab, out);
    }
    out.push(')');
}

/// Emit the program in ASP-Core-2 compatible syntax: facts first in sorted
/// order, then the rules in their fixed order. Output is byte-stable for
/// equal inputs.
pub fn emit_text(p: &DProgram, vocab: &Vocabulary) -> String {
    let mut fact_lines: Vec<String> = p
        .facts
        .iter()
        .map(|f| {
            let mut line = String::new();
            emit_literal(f, vocab, &mut line);
            line.push('.');
            line
        })
        .collect();
    fact_lines.sort();
    let mut out = String::new();
    for line in fact_lines {
        out.push_str(&line);
        out.push('\n');
    }
    for r in &p.rules {
        let mut line = String::new();
        emit_literal(&r.head, vocab, &mut line);
        if !r.body_pos.is_empty() || !r.body_naf.is_empty() {
            line.push_str(" :- ");
            let mut first = true;
            for lit in &r.body_pos {
                if !first {
                    line.push_str(", ");
                }
                emit_literal(lit, vocab, &mut line);
                first = false;
            }
            for lit in &r.body_naf {
                if !first {
                    line.push_str(", ");
                }
                line.push_str("not ");
                emit_literal(lit, vocab, &mut line);
                first = false;
            }
        }
        line.push('.');
        out.push_str(&line);
        out.push('\n');
    }
    out
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

    fn dept_program() -> (Dkb, DProgram) {
        let nk = normalize(&parse_dkb(DEPT).unwrap()).0;
        let p = assemble_program(&nk).unwrap();
        (nk, p)
    }

    fn fact_strings(p: &DProgram, vocab: &Vocabulary) -> Vec<String> {
        p.facts
            .iter()
            .map(|f| {
                let mut s = String::new();
                emit_literal(f, vocab, &mut s);
                s
            })
            .collect()
    }

    #[test]
    fn all_rules_are_safe() {
        for r in deduction_rules() {
            assert!(r.is_safe(), "unsafe rule {}", r.name);
        }
    }

    #[test]
    fn naf_occurs_only_on_ovr() {
        for r in deduction_rules() {
            for lit in &r.body_naf {
                assert_eq!(lit.atom.pred, Pred::Ovr);
                assert!(!lit.strong_neg);
            }
        }
    }

    /// Every predicate in a rule body is either an input-fact predicate or
    /// the head of some rule.
    #[test]
    fn signature_closure() {
        let rules = deduction_rules();
        let heads: IndexSet<Pred> = rules.iter().map(|r| r.head.atom.pred).collect();
        for r in &rules {
            for lit in r.body_pos.iter().chain(&r.body_naf) {
                let p = lit.atom.pred;
                assert!(
                    p.is_fact_pred() || heads.contains(&p),
                    "dangling predicate {} in rule {}",
                    p.name(),
                    r.name
                );
            }
        }
    }

    #[test]
    fn expected_rule_shapes_present() {
        let rules = deduction_rules();
        let by_name = |n: &str| rules.iter().find(|r| r.name == n).unwrap();
        // tripled(x,r,x') <- supEx(y,r,x'), instd(x,y)
        let supex = by_name("supex");
        assert_eq!(supex.head.atom.pred, Pred::Tripled);
        assert_eq!(supex.body_pos[0].atom.pred, Pred::SupEx);
        // -instd(x,y) <- supEx(y,r,w), const(x), all_nrel(x,r)
        let nsupex = by_name("nsupex");
        assert!(nsupex.head.strong_neg);
        assert_eq!(nsupex.body_pos[2].atom.pred, Pred::AllNrel);
        // instd(x,z) <- def_subclass(y,z), instd(x,y), not ovr(subClass,x,y,z)
        let app = by_name("app-subc");
        assert_eq!(app.body_naf.len(), 1);
        assert_eq!(app.body_naf[0].atom.pred, Pred::Ovr);
    }

    #[test]
    fn dept_input_facts() {
        let (nk, p) = dept_program();
        let facts = fact_strings(&p, &nk.vocab);
        for expected in [
            "subClass(\"Professor\",\"DeptMember\")",
            "supNot(\"PhDStudent\",\"_ex_hasCourse\")",
            "subEx(hasCourse,\"_ex_hasCourse\")",
            "supEx(\"_ex_hasCourse\",hasCourse,aux_1)",
            "def_subclass(\"DeptMember\",\"_ex_hasCourse\")",
            "insta(alice,\"Professor\")",
            "nom(alice)",
            "cls(\"DeptMember\")",
            "rol(hasCourse)",
        ] {
            assert!(facts.contains(&expected.to_string()), "missing {expected}: {facts:?}");
        }
    }

    #[test]
    fn dept_constant_chain() {
        let (nk, p) = dept_program();
        let facts = fact_strings(&p, &nk.vocab);
        for expected in [
            "const(alice)",
            "const(bob)",
            "const(aux_1)",
            "first(alice)",
            "next(alice,bob)",
            "next(bob,aux_1)",
            "last(aux_1)",
        ] {
            assert!(facts.contains(&expected.to_string()), "missing {expected}");
        }
        assert_eq!(facts.iter().filter(|f| f.starts_with("const(")).count(), 3);
    }

    #[test]
    fn empty_kb_program_is_rules_only() {
        let nk = normalize(&parse_dkb("").unwrap()).0;
        let p = assemble_program(&nk).unwrap();
        assert!(p.facts.is_empty());
        assert_eq!(p.rules.len(), deduction_rules().len());
    }

    #[test]
    fn unsafe_kb_is_refused() {
        let src = "Employee [= exists hasSupervisor.\n\
             exists hasSupervisor^- [= Employee.\n\
             D: exists hasSupervisor^- [= bot.\n\
             Employee(alice).\n";
        let nk = normalize(&parse_dkb(src).unwrap()).0;
        match assemble_program(&nk) {
            Err(ProgramError::NotExceptionSafe(report)) => {
                assert!(!report.exception_safe);
                assert!(!report.witnesses.is_empty());
            }
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn output_atom_examples() {
        let (nk, _) = dept_program();
        let v = &nk.vocab;
        let dm = v.lookup_concept("DeptMember").unwrap();
        let alice = v.lookup_individual("alice").unwrap();
        let bob = v.lookup_individual("bob").unwrap();
        let lit = output_atom(&Assertion::concept(dm, alice)).unwrap();
        let mut s = String::new();
        emit_literal(&lit, v, &mut s);
        assert_eq!(s, "instd(alice,\"DeptMember\")");
        let hc = v.lookup_role("hasCourse").unwrap();
        let lit = output_atom(&Assertion::role(hc, bob, alice)).unwrap();
        let mut s = String::new();
        emit_literal(&lit, v, &mut s);
        assert_eq!(s, "tripled(bob,hasCourse,alice)");
        let lit = output_atom(&Assertion::concept(dm, bob).negated()).unwrap();
        assert!(lit.strong_neg);
    }

    #[test]
    fn emit_is_deterministic_and_well_formed() {
        let (nk, p) = dept_program();
        let t1 = emit_text(&p, &nk.vocab);
        let t2 = emit_text(&assemble_program(&nk).unwrap(), &nk.vocab);
        assert_eq!(t1, t2);
        assert!(t1.contains(
            "instd(X,Z) :- def_subclass(Y,Z), instd(X,Y), not ovr(subClass,X,Y,Z)."
        ));
        assert!(t1.contains("nom(alice)."));
        // Uppercase-initial symbols are quoted.
        assert!(t1.contains("subClass(\"Professor\",\"DeptMember\")."));
        for line in t1.lines() {
            assert!(line.ends_with('.'), "unterminated line {line}");
        }
    }
}
