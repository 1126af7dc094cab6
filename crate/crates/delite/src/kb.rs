//! Core domain model: vocabularies, DL-Lite_R axioms, assertions, defeasible
//! knowledge bases, and the clashing-set catalogue for defeasible axiom
//! instances.
//!
//! Everything here is immutable after construction and freely shareable.
//! Symbols are interned as small integer ids; the interning order (declaration
//! order) is the canonical total order used by every downstream enumeration.

use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

/// Reserved prefix for `A_{exists R}` bridge concepts introduced by normalization.
pub const PREFIX_EXISTS: &str = "_ex_";
/// Reserved prefix for fresh symbols introduced by normalization rewrites.
pub const PREFIX_FRESH: &str = "_nf_";
/// Reserved prefix for auxiliary existential witness constants.
pub const PREFIX_AUX: &str = "_aux_";

pub const RESERVED_PREFIXES: [&str; 3] = [PREFIX_EXISTS, PREFIX_FRESH, PREFIX_AUX];

pub fn is_reserved_name(name: &str) -> bool {
    RESERVED_PREFIXES.iter().any(|p| name.starts_with(p))
}

macro_rules! id_type {
    ($name:ident) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

id_type!(ConceptId);
id_type!(RoleId);
id_type!(IndId);
// DefAxiomId identifies a defeasible axiom by its position in `Dkb::defeasible`.
id_type!(DefAxiomId);

/// The three symbol kinds of a DL vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Concept,
    Role,
    Individual,
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolKind::Concept => write!(f, "concept"),
            SymbolKind::Role => write!(f, "role"),
            SymbolKind::Individual => write!(f, "individual"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VocabError {
    #[error("name `{name}` already declared as a {existing}")]
    KindClash { name: String, existing: SymbolKind },
    #[error("name `{0}` uses a reserved prefix")]
    ReservedPrefix(String),
}

/// Interned symbol table. Names are unique across the three kinds and keep
/// their declaration order, which fixes the canonical constant order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    concepts: IndexMap<String, ()>,
    roles: IndexMap<String, ()>,
    individuals: IndexMap<String, ()>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn concept_count(&self) -> usize {
        self.concepts.len()
    }

    pub fn role_count(&self) -> usize {
        self.roles.len()
    }

    pub fn individual_count(&self) -> usize {
        self.individuals.len()
    }

    pub fn concepts(&self) -> impl Iterator<Item = ConceptId> {
        (0..self.concepts.len() as u32).map(ConceptId)
    }

    pub fn roles(&self) -> impl Iterator<Item = RoleId> {
        (0..self.roles.len() as u32).map(RoleId)
    }

    pub fn individuals(&self) -> impl Iterator<Item = IndId> {
        (0..self.individuals.len() as u32).map(IndId)
    }

    pub fn concept_name(&self, id: ConceptId) -> &str {
        self.concepts.get_index(id.index()).expect("concept id").0
    }

    pub fn role_name(&self, id: RoleId) -> &str {
        self.roles.get_index(id.index()).expect("role id").0
    }

    pub fn individual_name(&self, id: IndId) -> &str {
        self.individuals.get_index(id.index()).expect("individual id").0
    }

    pub fn lookup_concept(&self, name: &str) -> Option<ConceptId> {
        self.concepts.get_index_of(name).map(|i| ConceptId(i as u32))
    }

    pub fn lookup_role(&self, name: &str) -> Option<RoleId> {
        self.roles.get_index_of(name).map(|i| RoleId(i as u32))
    }

    pub fn lookup_individual(&self, name: &str) -> Option<IndId> {
        self.individuals.get_index_of(name).map(|i| IndId(i as u32))
    }

    pub fn kind_of(&self, name: &str) -> Option<SymbolKind> {
        if self.concepts.contains_key(name) {
            Some(SymbolKind::Concept)
        } else if self.roles.contains_key(name) {
            Some(SymbolKind::Role)
        } else if self.individuals.contains_key(name) {
            Some(SymbolKind::Individual)
        } else {
            None
        }
    }

    fn check_free(&self, name: &str, wanted: SymbolKind) -> Result<(), VocabError> {
        if let Some(existing) = self.kind_of(name) {
            if existing != wanted {
                return Err(VocabError::KindClash {
                    name: name.to_string(),
                    existing,
                });
            }
        }
        Ok(())
    }

    /// Declare a user-level symbol. Rejects reserved prefixes.
    pub fn declare(&mut self, name: &str, kind: SymbolKind) -> Result<u32, VocabError> {
        if is_reserved_name(name) {
            return Err(VocabError::ReservedPrefix(name.to_string()));
        }
        self.declare_raw(name, kind)
    }

    /// Declare a symbol without the reserved-prefix check. Used by the
    /// normalizer (for generated symbols) and when re-reading serialized
    /// normalized knowledge bases.
    pub fn declare_raw(&mut self, name: &str, kind: SymbolKind) -> Result<u32, VocabError> {
        self.check_free(name, kind)?;
        let table = match kind {
            SymbolKind::Concept => &mut self.concepts,
            SymbolKind::Role => &mut self.roles,
            SymbolKind::Individual => &mut self.individuals,
        };
        let (idx, _) = table.insert_full(name.to_string(), ());
        Ok(idx as u32)
    }

    pub fn declare_concept(&mut self, name: &str) -> Result<ConceptId, VocabError> {
        self.declare(name, SymbolKind::Concept).map(ConceptId)
    }

    pub fn declare_role(&mut self, name: &str) -> Result<RoleId, VocabError> {
        self.declare(name, SymbolKind::Role).map(RoleId)
    }

    pub fn declare_individual(&mut self, name: &str) -> Result<IndId, VocabError> {
        self.declare(name, SymbolKind::Individual).map(IndId)
    }
}

/// A role or its inverse. Normalization eliminates the inverted form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RoleExpr {
    pub role: RoleId,
    pub inverted: bool,
}

impl RoleExpr {
    pub fn plain(role: RoleId) -> Self {
        RoleExpr { role, inverted: false }
    }

    pub fn inverse(role: RoleId) -> Self {
        RoleExpr { role, inverted: true }
    }
}

/// Concepts allowed on the left of an inclusion: `A | exists R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LeftConcept {
    Atomic(ConceptId),
    Exists(RoleExpr),
}

/// Concepts allowed on the right of an inclusion: `A | not C | exists R | bot`.
/// `Bottom` is surface sugar removed by normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RightConcept {
    Atomic(ConceptId),
    Not(LeftConcept),
    Exists(RoleExpr),
    Bottom,
}

/// TBox / RBox axioms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axiom {
    ConceptIncl { lhs: LeftConcept, rhs: RightConcept },
    RoleIncl { lhs: RoleExpr, rhs: RoleExpr },
    Dis(RoleExpr, RoleExpr),
    Inv(RoleId, RoleId),
    Irr(RoleId),
}

impl Axiom {
    /// Number of instantiation arguments of this axiom (the free variables of
    /// its first-order reading): 1 for concept inclusions and `Irr`, 2 for
    /// role-level axioms.
    pub fn arity(&self) -> usize {
        match self {
            Axiom::ConceptIncl { .. } | Axiom::Irr(_) => 1,
            Axiom::RoleIncl { .. } | Axiom::Dis(..) | Axiom::Inv(..) => 2,
        }
    }
}

/// Atomic or existential concept reference used in assertions and clashing
/// sets. ABox assertions in normal form use only `Named`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConceptAtom {
    Named(ConceptId),
    Exists(RoleId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AssertionKind {
    Concept(ConceptAtom, IndId),
    Role(RoleId, IndId, IndId),
}

/// A possibly negated ABox assertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assertion {
    pub positive: bool,
    pub kind: AssertionKind,
}

impl Assertion {
    pub fn concept(concept: ConceptId, ind: IndId) -> Self {
        Assertion {
            positive: true,
            kind: AssertionKind::Concept(ConceptAtom::Named(concept), ind),
        }
    }

    pub fn role(role: RoleId, from: IndId, to: IndId) -> Self {
        Assertion {
            positive: true,
            kind: AssertionKind::Role(role, from, to),
        }
    }

    pub fn negated(mut self) -> Self {
        self.positive = !self.positive;
        self
    }

    pub fn complement(&self) -> Self {
        Assertion {
            positive: !self.positive,
            kind: self.kind,
        }
    }

    /// Normal-form assertions are positive over atomic predicates.
    pub fn is_normal(&self) -> bool {
        self.positive && !matches!(self.kind, AssertionKind::Concept(ConceptAtom::Exists(_), _))
    }
}

/// An axiom marked as defeasible. `id` is the position of the axiom in the
/// owning knowledge base's defeasible list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DefeasibleAxiom {
    pub inner: Axiom,
    pub id: DefAxiomId,
}

/// A defeasible DL-Lite_R knowledge base.
///
/// `defeasible_abox` holds defeasible assertions (`D: A(a).`); they are
/// accepted on input and compiled into defeasible inclusions by the
/// normalizer, so they are absent in normal form.
#[derive(Debug, Clone, Default)]
pub struct Dkb {
    pub vocab: Vocabulary,
    pub strict: Vec<Axiom>,
    pub defeasible: Vec<DefeasibleAxiom>,
    pub abox: Vec<Assertion>,
    pub defeasible_abox: Vec<Assertion>,
    pub una: bool,
}

impl PartialEq for Dkb {
    fn eq(&self, other: &Self) -> bool {
        self.vocab == other.vocab
            && self.strict == other.strict
            && self.defeasible == other.defeasible
            && self.abox == other.abox
            && self.defeasible_abox == other.defeasible_abox
            && self.una == other.una
    }
}

impl Eq for Dkb {}

impl Dkb {
    pub fn new() -> Self {
        Dkb {
            una: true,
            ..Default::default()
        }
    }

    pub fn push_defeasible(&mut self, inner: Axiom) -> DefAxiomId {
        let id = DefAxiomId(self.defeasible.len() as u32);
        self.defeasible.push(DefeasibleAxiom { inner, id });
        id
    }

    pub fn defeasible_axiom(&self, id: DefAxiomId) -> &DefeasibleAxiom {
        &self.defeasible[id.index()]
    }

    pub fn statement_count(&self) -> usize {
        self.strict.len() + self.defeasible.len() + self.abox.len() + self.defeasible_abox.len()
    }
}

/// Instantiation arguments for an axiom; arity 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Args {
    Unary(IndId),
    Binary(IndId, IndId),
}

impl Args {
    pub fn arity(&self) -> usize {
        match self {
            Args::Unary(_) => 1,
            Args::Binary(..) => 2,
        }
    }
}

/// The assumption that a defeasible axiom does not apply to a tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClashingAssumption {
    pub axiom: DefAxiomId,
    pub args: Args,
}

/// A satisfiable set of (possibly negated) assertions that is jointly
/// unsatisfiable with the instantiated axiom it overrides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClashingSet {
    pub elements: Vec<Assertion>,
}

impl ClashingSet {
    fn new(elements: Vec<Assertion>) -> Self {
        ClashingSet { elements }
    }

    /// No complementary pair among the elements.
    pub fn is_internally_satisfiable(&self) -> bool {
        self.elements
            .iter()
            .all(|a| !self.elements.contains(&a.complement()))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClashError {
    #[error("axiom shape has no clashing-set entry")]
    UnsupportedShape,
    #[error("expected {expected} argument(s), got {got}")]
    ArityMismatch { expected: usize, got: usize },
}

fn unary(args: &Args) -> Result<IndId, ClashError> {
    match args {
        Args::Unary(e) => Ok(*e),
        Args::Binary(..) => Err(ClashError::ArityMismatch { expected: 1, got: 2 }),
    }
}

fn binary(args: &Args) -> Result<(IndId, IndId), ClashError> {
    match args {
        Args::Binary(a, b) => Ok((*a, *b)),
        Args::Unary(_) => Err(ClashError::ArityMismatch { expected: 2, got: 1 }),
    }
}

fn concept_assert(atom: ConceptAtom, ind: IndId, positive: bool) -> Assertion {
    Assertion {
        positive,
        kind: AssertionKind::Concept(atom, ind),
    }
}

fn role_assert(role: RoleId, from: IndId, to: IndId, positive: bool) -> Assertion {
    Assertion {
        positive,
        kind: AssertionKind::Role(role, from, to),
    }
}

/// The minimal clashing sets for a normal-form axiom instantiated on `args`.
///
/// `Inv` yields its two candidate sets; every other supported shape yields
/// one. The output order is fixed, so the result is deterministic.
pub fn minimal_clashing_sets(alpha: &Axiom, args: &Args) -> Result<Vec<ClashingSet>, ClashError> {
    use ConceptAtom::*;
    match alpha {
        Axiom::ConceptIncl { lhs, rhs } => {
            let e = unary(args)?;
            let lhs_atom = match lhs {
                LeftConcept::Atomic(a) => Named(*a),
                LeftConcept::Exists(r) if !r.inverted => Exists(r.role),
                LeftConcept::Exists(_) => return Err(ClashError::UnsupportedShape),
            };
            let rhs_atom = match rhs {
                RightConcept::Atomic(b) => Named(*b),
                RightConcept::Not(LeftConcept::Atomic(b)) => {
                    // <A [= not B, e> : { A(e), B(e) }
                    return Ok(vec![ClashingSet::new(vec![
                        concept_assert(lhs_atom, e, true),
                        concept_assert(Named(*b), e, true),
                    ])]);
                }
                RightConcept::Exists(r) if !r.inverted => Exists(r.role),
                _ => return Err(ClashError::UnsupportedShape),
            };
            Ok(vec![ClashingSet::new(vec![
                concept_assert(lhs_atom, e, true),
                concept_assert(rhs_atom, e, false),
            ])])
        }
        Axiom::RoleIncl { lhs, rhs } => {
            if lhs.inverted || rhs.inverted {
                return Err(ClashError::UnsupportedShape);
            }
            let (e1, e2) = binary(args)?;
            Ok(vec![ClashingSet::new(vec![
                role_assert(lhs.role, e1, e2, true),
                role_assert(rhs.role, e1, e2, false),
            ])])
        }
        Axiom::Dis(r, s) => {
            if r.inverted || s.inverted {
                return Err(ClashError::UnsupportedShape);
            }
            let (e1, e2) = binary(args)?;
            Ok(vec![ClashingSet::new(vec![
                role_assert(r.role, e1, e2, true),
                role_assert(s.role, e1, e2, true),
            ])])
        }
        Axiom::Inv(r, s) => {
            let (e1, e2) = binary(args)?;
            Ok(vec![
                ClashingSet::new(vec![
                    role_assert(*r, e1, e2, true),
                    role_assert(*s, e2, e1, false),
                ]),
                ClashingSet::new(vec![
                    role_assert(*r, e1, e2, false),
                    role_assert(*s, e2, e1, true),
                ]),
            ])
        }
        Axiom::Irr(r) => {
            let e = unary(args)?;
            Ok(vec![ClashingSet::new(vec![role_assert(*r, e, e, true)])])
        }
    }
}

// ---------------------------------------------------------------------------
// First-order reading of axioms: ground Skolem terms and Horn clauses.
// ---------------------------------------------------------------------------

/// A ground term: a named individual or a Skolem application `f_R(t)`
/// (`inverted` distinguishes the witness functions of `exists R` and
/// `exists R^-`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SkTerm {
    Named(IndId),
    App {
        role: RoleId,
        inverted: bool,
        arg: Box<SkTerm>,
    },
}

impl SkTerm {
    pub fn app(role: RoleId, inverted: bool, arg: SkTerm) -> Self {
        SkTerm::App {
            role,
            inverted,
            arg: Box::new(arg),
        }
    }

    /// Number of Skolem applications wrapped around the base individual.
    pub fn depth(&self) -> usize {
        match self {
            SkTerm::Named(_) => 0,
            SkTerm::App { arg, .. } => 1 + arg.depth(),
        }
    }

    pub fn base(&self) -> IndId {
        match self {
            SkTerm::Named(i) => *i,
            SkTerm::App { arg, .. } => arg.base(),
        }
    }

    pub fn display<'a>(&'a self, vocab: &'a Vocabulary) -> SkTermDisplay<'a> {
        SkTermDisplay { term: self, vocab }
    }
}

pub struct SkTermDisplay<'a> {
    term: &'a SkTerm,
    vocab: &'a Vocabulary,
}

impl fmt::Display for SkTermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            SkTerm::Named(i) => write!(f, "{}", self.vocab.individual_name(*i)),
            SkTerm::App { role, inverted, arg } => {
                let inv = if *inverted { "^-" } else { "" };
                write!(
                    f,
                    "f_{}{}({})",
                    self.vocab.role_name(*role),
                    inv,
                    arg.display(self.vocab)
                )
            }
        }
    }
}

/// Term position in a clause template: an instantiation variable, a bound
/// universal variable, or the Skolem application of a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TTerm {
    /// Instantiation variables: 0, 1 map to the axiom's argument tuple;
    /// 2, 3 are clause-local universals.
    Var(u8),
    /// `f_R(var)`, optionally for the inverse direction.
    SkolemOf { role: RoleId, inverted: bool, var: u8 },
}

pub const VAR_X: u8 = 0;
pub const VAR_Y: u8 = 1;
/// Clause-local universal introduced by a left-side `exists R`.
pub const VAR_LHS_EX: u8 = 2;
/// Clause-local universal introduced by a right-side `not exists R`.
pub const VAR_RHS_EX: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TAtom {
    Concept(ConceptId, TTerm),
    Role(RoleId, TTerm, TTerm),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum THead {
    Pos(TAtom),
    Neg(TAtom),
    Bottom,
}

/// How a clause's variables map onto the axiom's instantiation tuple.
///
/// `Swapped` occurs only for the second `Inv` clause: the instance of
/// `Inv(R,S)` on `(e1,e2)` is the biconditional `R(e1,e2) <-> S(e2,e1)`,
/// whose backward half reads `S(x,y) -> R(y,x)` with exception tuple
/// `(y,x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiMap {
    Direct,
    Swapped,
}

/// One Horn clause of an axiom's first-order reading. Bodies of DL-Lite_R
/// axioms have at most one atom; `Irr` has an empty body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseTemplate {
    pub body: Vec<TAtom>,
    pub head: THead,
    pub chi: ChiMap,
}

fn left_atom(c: &LeftConcept, var: u8) -> TAtom {
    match c {
        LeftConcept::Atomic(a) => TAtom::Concept(*a, TTerm::Var(var)),
        LeftConcept::Exists(r) => {
            if r.inverted {
                TAtom::Role(r.role, TTerm::Var(VAR_LHS_EX), TTerm::Var(var))
            } else {
                TAtom::Role(r.role, TTerm::Var(var), TTerm::Var(VAR_LHS_EX))
            }
        }
    }
}

fn role_atom(r: &RoleExpr, v1: TTerm, v2: TTerm) -> TAtom {
    if r.inverted {
        TAtom::Role(r.role, v2, v1)
    } else {
        TAtom::Role(r.role, v1, v2)
    }
}

/// Compile an axiom into the Horn clauses of its first-order reading, with
/// right-side existentials Skolemized.
pub fn axiom_clauses(alpha: &Axiom) -> Vec<ClauseTemplate> {
    match alpha {
        Axiom::ConceptIncl { lhs, rhs } => {
            let body = vec![left_atom(lhs, VAR_X)];
            let head = match rhs {
                RightConcept::Atomic(b) => THead::Pos(TAtom::Concept(*b, TTerm::Var(VAR_X))),
                RightConcept::Not(LeftConcept::Atomic(b)) => {
                    THead::Neg(TAtom::Concept(*b, TTerm::Var(VAR_X)))
                }
                RightConcept::Not(LeftConcept::Exists(r)) => THead::Neg(role_atom(
                    r,
                    TTerm::Var(VAR_X),
                    TTerm::Var(VAR_RHS_EX),
                )),
                RightConcept::Exists(r) => THead::Pos(role_atom(
                    r,
                    TTerm::Var(VAR_X),
                    TTerm::SkolemOf {
                        role: r.role,
                        inverted: r.inverted,
                        var: VAR_X,
                    },
                )),
                RightConcept::Bottom => THead::Bottom,
            };
            vec![ClauseTemplate { body, head, chi: ChiMap::Direct }]
        }
        Axiom::RoleIncl { lhs, rhs } => {
            let x = TTerm::Var(VAR_X);
            let y = TTerm::Var(VAR_Y);
            vec![ClauseTemplate {
                body: vec![role_atom(lhs, x, y)],
                head: THead::Pos(role_atom(rhs, x, y)),
                chi: ChiMap::Direct,
            }]
        }
        Axiom::Dis(r, s) => {
            let x = TTerm::Var(VAR_X);
            let y = TTerm::Var(VAR_Y);
            vec![
                ClauseTemplate {
                    body: vec![role_atom(r, x, y)],
                    head: THead::Neg(role_atom(s, x, y)),
                    chi: ChiMap::Direct,
                },
                ClauseTemplate {
                    body: vec![role_atom(s, x, y)],
                    head: THead::Neg(role_atom(r, x, y)),
                    chi: ChiMap::Direct,
                },
            ]
        }
        Axiom::Inv(r, s) => {
            let x = TTerm::Var(VAR_X);
            let y = TTerm::Var(VAR_Y);
            vec![
                ClauseTemplate {
                    body: vec![TAtom::Role(*r, x, y)],
                    head: THead::Pos(TAtom::Role(*s, y, x)),
                    chi: ChiMap::Direct,
                },
                ClauseTemplate {
                    body: vec![TAtom::Role(*s, x, y)],
                    head: THead::Pos(TAtom::Role(*r, y, x)),
                    chi: ChiMap::Swapped,
                },
            ]
        }
        Axiom::Irr(r) => vec![ClauseTemplate {
            body: vec![],
            head: THead::Neg(TAtom::Role(*r, TTerm::Var(VAR_X), TTerm::Var(VAR_X))),
            chi: ChiMap::Direct,
        }],
    }
}

/// Ground (or clause-locally universal) term of an instantiated clause.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GTerm {
    Const(SkTerm),
    /// A universal variable that survived instantiation (from a bound
    /// existential position).
    Var(u8),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GAtom {
    Concept(ConceptId, GTerm),
    Role(RoleId, GTerm, GTerm),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GHead {
    Pos(GAtom),
    Neg(GAtom),
    Bottom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundClause {
    pub body: Vec<GAtom>,
    pub head: GHead,
}

/// The instantiation of an axiom on an argument tuple: a conjunction of
/// ground Horn clauses (clause-local universals from bound existential
/// positions remain as variables).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundSentence {
    pub clauses: Vec<GroundClause>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("axiom arity {expected} does not match argument count {got}")]
pub struct ArityError {
    pub expected: usize,
    pub got: usize,
}

/// Remap instantiation arguments for a clause: under `ChiMap::Swapped` the
/// clause's `(x,y)` stand for the reversed instance tuple.
fn clause_args(args: &Args, chi: ChiMap) -> Args {
    match (args, chi) {
        (Args::Binary(e1, e2), ChiMap::Swapped) => Args::Binary(*e2, *e1),
        (a, _) => *a,
    }
}

fn subst_term(t: &TTerm, args: &Args) -> GTerm {
    let lookup = |v: u8| -> Option<SkTerm> {
        match (v, args) {
            (0, Args::Unary(e)) => Some(SkTerm::Named(*e)),
            (0, Args::Binary(e1, _)) => Some(SkTerm::Named(*e1)),
            (1, Args::Binary(_, e2)) => Some(SkTerm::Named(*e2)),
            _ => None,
        }
    };
    match t {
        TTerm::Var(v) => match lookup(*v) {
            Some(c) => GTerm::Const(c),
            None => GTerm::Var(*v),
        },
        TTerm::SkolemOf { role, inverted, var } => {
            let base = lookup(*var).expect("Skolem applications are over instantiation variables");
            GTerm::Const(SkTerm::app(*role, *inverted, base))
        }
    }
}

fn subst_atom(a: &TAtom, args: &Args) -> GAtom {
    match a {
        TAtom::Concept(c, t) => GAtom::Concept(*c, subst_term(t, args)),
        TAtom::Role(r, t1, t2) => GAtom::Role(*r, subst_term(t1, args), subst_term(t2, args)),
    }
}

/// The specialization of `alpha` to the tuple `args`, with existentials on
/// the right Skolemized as `f_R(arg)`.
pub fn instantiate_axiom(alpha: &Axiom, args: &Args) -> Result<GroundSentence, ArityError> {
    if alpha.arity() != args.arity() {
        return Err(ArityError {
            expected: alpha.arity(),
            got: args.arity(),
        });
    }
    let clauses = axiom_clauses(alpha)
        .iter()
        .map(|c| {
            let args = clause_args(args, c.chi);
            GroundClause {
                body: c.body.iter().map(|a| subst_atom(a, &args)).collect(),
                head: match &c.head {
                    THead::Pos(a) => GHead::Pos(subst_atom(a, &args)),
                    THead::Neg(a) => GHead::Neg(subst_atom(a, &args)),
                    THead::Bottom => GHead::Bottom,
                },
            }
        })
        .collect();
    Ok(GroundSentence { clauses })
}


// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Outcome of [`validate_dkb`]: empty `errors` means the knowledge base is
/// usable by the rest of the pipeline.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Check a knowledge base for structural problems.
///
/// Reflexivity axioms cannot be represented in the syntax tree at all; the
/// parser rejects `Ref(R)` with "reflexivity unsupported" before a value of
/// this type exists. The remaining checks cover what typed construction
/// cannot rule out: reserved-prefix names (warning, since re-reading
/// serialized normalized output is legitimate), duplicate axioms (warning),
/// defeasible role disjointness and non-atomic ABox assertions (errors).
pub fn validate_dkb(k: &Dkb) -> ValidationReport {
    let mut report = ValidationReport::default();
    let v = &k.vocab;

    for (name, kind) in v
        .concepts()
        .map(|c| (v.concept_name(c), SymbolKind::Concept))
        .chain(v.roles().map(|r| (v.role_name(r), SymbolKind::Role)))
        .chain(v.individuals().map(|i| (v.individual_name(i), SymbolKind::Individual)))
    {
        if is_reserved_name(name) {
            report
                .warnings
                .push(format!("{kind} `{name}` uses a reserved prefix"));
        }
    }

    let mut seen_strict: Vec<&Axiom> = Vec::new();
    for ax in &k.strict {
        if seen_strict.contains(&ax) {
            report.warnings.push("duplicate strict axiom".to_string());
        }
        seen_strict.push(ax);
    }
    let mut seen_def: Vec<&Axiom> = Vec::new();
    for d in &k.defeasible {
        if seen_def.contains(&&d.inner) {
            report.warnings.push("duplicate defeasible axiom".to_string());
        }
        seen_def.push(&d.inner);
        if matches!(d.inner, Axiom::Dis(..)) {
            report
                .errors
                .push("role disjointness cannot be defeasible".to_string());
        }
    }
    for (i, d) in k.defeasible.iter().enumerate() {
        if d.id.index() != i {
            report.errors.push(format!(
                "defeasible axiom {} carries identifier {}",
                i,
                d.id.index()
            ));
        }
    }
    for a in k.abox.iter().chain(&k.defeasible_abox) {
        if matches!(a.kind, AssertionKind::Concept(ConceptAtom::Exists(_), _)) {
            report
                .errors
                .push("existential concept assertions are not part of the surface syntax".to_string());
        }
    }
    report
}
