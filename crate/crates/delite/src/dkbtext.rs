//! Textual `.dkb` format: parser and canonical serializer.
//!
//! The grammar is line-oriented with `.`-terminated statements and `#`
//! comments:
//!
//! ```text
//! @concepts A, B.            # optional explicit declarations
//! @roles R.
//! @individuals a, b.
//! @no-una.                   # disable the unique name assumption
//! A [= B.                    # concept inclusion
//! A [= not exists R.         # negated right side
//! exists R^- [= B.           # inverse role under exists
//! R [= S.                    # role inclusion (both names must be roles)
//! Dis(R,S).  Inv(R,S).  Irr(R).
//! D: A [= B.                 # defeasible statement
//! A(a).  R(a,b).  not A(a).  # assertions
//! ```
//!
//! Symbols are auto-declared on first use; kinds are inferred from usage
//! (`exists R` makes `R` a role, `A(a)` makes `A` a concept and `a` an
//! individual, and so on). A bare `X [= Y` between names of unknown kind
//! defaults to a concept inclusion. `Dis`, `Inv`, `Irr`, `Ref`, `D`, `not`,
//! `exists` and `bot` are reserved words.

use std::fmt;

use crate::kb::{
    Assertion, AssertionKind, Axiom, ConceptAtom, Dkb, LeftConcept, RightConcept,
    RoleExpr, SymbolKind, Vocabulary,
};

/// 1-based source location of a token or statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: u32,
    pub column: u32,
    pub length: u32,
}

impl SourceSpan {
    fn new(line: u32, column: u32, length: u32) -> Self {
        SourceSpan {
            line,
            column,
            length: length.max(1),
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub span: SourceSpan,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Directive(String),
    IncludedIn, // [=
    Inverse,    // ^-
    Dot,
    Comma,
    Colon,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

fn lex(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut out = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let span1 = |len: u32| SourceSpan::new(line, col, len);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '.' => {
                out.push(Token { tok: Tok::Dot, span: span1(1) });
                chars.next();
                col += 1;
            }
            ',' => {
                out.push(Token { tok: Tok::Comma, span: span1(1) });
                chars.next();
                col += 1;
            }
            ':' => {
                out.push(Token { tok: Tok::Colon, span: span1(1) });
                chars.next();
                col += 1;
            }
            '(' => {
                out.push(Token { tok: Tok::LParen, span: span1(1) });
                chars.next();
                col += 1;
            }
            ')' => {
                out.push(Token { tok: Tok::RParen, span: span1(1) });
                chars.next();
                col += 1;
            }
            '[' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    out.push(Token {
                        tok: Tok::IncludedIn,
                        span: SourceSpan::new(line, col - 2, 2),
                    });
                } else {
                    return Err(Diagnostic {
                        span: SourceSpan::new(line, col - 1, 1),
                        message: "expected `[=`".to_string(),
                    });
                }
            }
            '^' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'-') {
                    chars.next();
                    col += 1;
                    out.push(Token {
                        tok: Tok::Inverse,
                        span: SourceSpan::new(line, col - 2, 2),
                    });
                } else {
                    return Err(Diagnostic {
                        span: SourceSpan::new(line, col - 1, 1),
                        message: "expected `^-`".to_string(),
                    });
                }
            }
            '@' => {
                let start_col = col;
                chars.next();
                col += 1;
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' || c == '-' {
                        name.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                out.push(Token {
                    tok: Tok::Directive(name.clone()),
                    span: SourceSpan::new(line, start_col, name.len() as u32 + 1),
                });
            }
            c if c.is_alphanumeric() || c == '_' => {
                let start_col = col;
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        name.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                out.push(Token {
                    tok: Tok::Ident(name.clone()),
                    span: SourceSpan::new(line, start_col, name.len() as u32),
                });
            }
            other => {
                return Err(Diagnostic {
                    span: span1(1),
                    message: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Raw (untyped) statements
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
struct RawName {
    name: String,
    span: SourceSpan,
}

#[derive(Debug, Clone)]
enum RawConcept {
    Bare(RawName),
    /// `exists R` / `exists R^-` when `explicit_exists`, the bare role
    /// expression `R^-` of a role inclusion otherwise.
    Exists { role: RawName, inverted: bool, explicit_exists: bool },
    Not(Box<RawConcept>),
    Bottom(SourceSpan),
}

#[derive(Debug, Clone)]
enum RawBody {
    Inclusion { lhs: RawConcept, rhs: RawConcept },
    RoleAxiom { kind: RoleAxiomKind, args: Vec<RawName> },
    Assertion { positive: bool, pred: RawName, args: Vec<RawName> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RoleAxiomKind {
    Dis,
    Inv,
    Irr,
}

#[derive(Debug, Clone)]
struct RawStatement {
    defeasible: bool,
    body: RawBody,
    span: SourceSpan,
}

#[derive(Debug, Clone)]
enum RawItem {
    Statement(RawStatement),
    Declare { kind: SymbolKind, names: Vec<RawName> },
    NoUna,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.tokens.get(self.pos + 1).map(|t| &t.tok)
    }

    fn span(&self) -> SourceSpan {
        self.tokens
            .get(self.pos)
            .or_else(|| self.tokens.last())
            .map(|t| t.span)
            .unwrap_or(SourceSpan::new(1, 1, 1))
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            span: self.span(),
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, Diagnostic> {
        match self.peek() {
            Some(t) if *t == tok => Ok(self.bump().unwrap()),
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<RawName, Diagnostic> {
        match self.peek() {
            Some(Tok::Ident(_)) => {
                let t = self.bump().unwrap();
                if let Tok::Ident(name) = t.tok {
                    Ok(RawName { name, span: t.span })
                } else {
                    unreachable!()
                }
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    /// Skip to just past the next `.` (error recovery).
    fn synchronize(&mut self) {
        while let Some(t) = self.bump() {
            if t.tok == Tok::Dot {
                break;
            }
        }
    }

    fn parse_items(&mut self) -> Result<Vec<RawItem>, Vec<Diagnostic>> {
        let mut items = Vec::new();
        let mut errors = Vec::new();
        while self.peek().is_some() {
            match self.parse_item() {
                Ok(item) => items.push(item),
                Err(e) => {
                    errors.push(e);
                    self.synchronize();
                }
            }
        }
        if errors.is_empty() {
            Ok(items)
        } else {
            Err(errors)
        }
    }

    fn parse_item(&mut self) -> Result<RawItem, Diagnostic> {
        if let Some(Tok::Directive(name)) = self.peek() {
            let name = name.clone();
            let span = self.span();
            self.bump();
            let item = match name.as_str() {
                "no-una" => RawItem::NoUna,
                "concepts" | "roles" | "individuals" => {
                    let kind = match name.as_str() {
                        "concepts" => SymbolKind::Concept,
                        "roles" => SymbolKind::Role,
                        _ => SymbolKind::Individual,
                    };
                    let mut names = vec![self.ident("a name")?];
                    while self.peek() == Some(&Tok::Comma) {
                        self.bump();
                        names.push(self.ident("a name")?);
                    }
                    RawItem::Declare { kind, names }
                }
                other => {
                    return Err(Diagnostic {
                        span,
                        message: format!("unknown directive `@{other}`"),
                    })
                }
            };
            self.expect(Tok::Dot, "`.`")?;
            return Ok(item);
        }

        let span = self.span();
        // `D :` marks a defeasible statement; a lone `D(...)` is an assertion.
        let defeasible =
            matches!(self.peek(), Some(Tok::Ident(d)) if d == "D") && self.peek2() == Some(&Tok::Colon);
        if defeasible {
            self.bump();
            self.bump();
        }
        let body = self.parse_body()?;
        self.expect(Tok::Dot, "`.`")?;
        Ok(RawItem::Statement(RawStatement { defeasible, body, span }))
    }

    fn parse_body(&mut self) -> Result<RawBody, Diagnostic> {
        match self.peek() {
            Some(Tok::Ident(name)) => match name.as_str() {
                "Dis" | "Inv" | "Irr" => {
                    let kind = match name.as_str() {
                        "Dis" => RoleAxiomKind::Dis,
                        "Inv" => RoleAxiomKind::Inv,
                        _ => RoleAxiomKind::Irr,
                    };
                    self.bump();
                    self.expect(Tok::LParen, "`(`")?;
                    let mut args = vec![self.role_name_arg()?];
                    while self.peek() == Some(&Tok::Comma) {
                        self.bump();
                        args.push(self.role_name_arg()?);
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    let expected = if kind == RoleAxiomKind::Irr { 1 } else { 2 };
                    if args.len() != expected {
                        return Err(Diagnostic {
                            span: args.last().unwrap().span,
                            message: format!("expected {expected} role argument(s)"),
                        });
                    }
                    Ok(RawBody::RoleAxiom { kind, args })
                }
                "Ref" => Err(self.error("reflexivity unsupported")),
                "not" => {
                    // Negated assertion: not A(a) / not R(a,b).
                    self.bump();
                    let pred = self.ident("a predicate name")?;
                    let args = self.assertion_args()?;
                    Ok(RawBody::Assertion { positive: false, pred, args })
                }
                "exists" | "bot" => {
                    let lhs = self.parse_concept()?;
                    self.expect(Tok::IncludedIn, "`[=`")?;
                    let rhs = self.parse_concept()?;
                    Ok(RawBody::Inclusion { lhs, rhs })
                }
                _ => {
                    // ident ( ... )  -> assertion
                    // ident [^-] [= ... -> inclusion
                    if self.peek2() == Some(&Tok::LParen) {
                        let pred = self.ident("a predicate name")?;
                        let args = self.assertion_args()?;
                        Ok(RawBody::Assertion { positive: true, pred, args })
                    } else {
                        let lhs = self.parse_concept()?;
                        self.expect(Tok::IncludedIn, "`[=`")?;
                        let rhs = self.parse_concept()?;
                        Ok(RawBody::Inclusion { lhs, rhs })
                    }
                }
            },
            _ => Err(self.error("expected a statement")),
        }
    }

    fn role_name_arg(&mut self) -> Result<RawName, Diagnostic> {
        let name = self.ident("a role name")?;
        if self.peek() == Some(&Tok::Inverse) {
            return Err(self.error("inverse roles are not allowed in Dis/Inv/Irr"));
        }
        Ok(name)
    }

    fn assertion_args(&mut self) -> Result<Vec<RawName>, Diagnostic> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = vec![self.ident("an individual name")?];
        while self.peek() == Some(&Tok::Comma) {
            self.bump();
            args.push(self.ident("an individual name")?);
        }
        self.expect(Tok::RParen, "`)`")?;
        if args.len() > 2 {
            return Err(Diagnostic {
                span: args[2].span,
                message: "assertions take one or two arguments".to_string(),
            });
        }
        Ok(args)
    }

    /// concept := ident [^-]? | exists role | not concept | bot
    /// An `^-` after a bare ident marks a role expression inside a role
    /// inclusion; it is kept as `Exists`-style raw data and re-checked later.
    fn parse_concept(&mut self) -> Result<RawConcept, Diagnostic> {
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => match name.as_str() {
                "not" => {
                    self.bump();
                    let inner = self.parse_concept()?;
                    if matches!(inner, RawConcept::Not(_)) {
                        return Err(self.error("double negation is not allowed"));
                    }
                    Ok(RawConcept::Not(Box::new(inner)))
                }
                "exists" => {
                    self.bump();
                    let role = self.ident("a role name")?;
                    let inverted = if self.peek() == Some(&Tok::Inverse) {
                        self.bump();
                        true
                    } else {
                        false
                    };
                    Ok(RawConcept::Exists { role, inverted, explicit_exists: true })
                }
                "bot" => {
                    let span = self.span();
                    self.bump();
                    Ok(RawConcept::Bottom(span))
                }
                _ => {
                    let name = self.ident("a name")?;
                    if self.peek() == Some(&Tok::Inverse) {
                        self.bump();
                        // Bare inverted role: only legal in role inclusions.
                        Ok(RawConcept::Exists { role: name, inverted: true, explicit_exists: false })
                    } else {
                        Ok(RawConcept::Bare(name))
                    }
                }
            },
            _ => Err(self.error("expected a concept or role expression")),
        }
    }
}

// ---------------------------------------------------------------------------
// Kind inference and typed construction
// ---------------------------------------------------------------------------

#[derive(Default)]
struct Kinds {
    map: indexmap::IndexMap<String, (SymbolKind, SourceSpan)>,
}

impl Kinds {
    fn get(&self, name: &str) -> Option<SymbolKind> {
        self.map.get(name).map(|(k, _)| *k)
    }

    fn set(&mut self, name: &RawName, kind: SymbolKind, errors: &mut Vec<Diagnostic>) {
        match self.map.get(&name.name) {
            Some((existing, first_span)) if *existing != kind => {
                errors.push(Diagnostic {
                    span: name.span,
                    message: format!(
                        "`{}` used as a {} here but as a {} at {}",
                        name.name, kind, existing, first_span
                    ),
                });
            }
            Some(_) => {}
            None => {
                self.map.insert(name.name.clone(), (kind, name.span));
            }
        }
    }
}

fn concept_kind_evidence(c: &RawConcept, kinds: &mut Kinds, errors: &mut Vec<Diagnostic>) {
    match c {
        RawConcept::Bare(_) | RawConcept::Bottom(_) => {}
        RawConcept::Exists { role, .. } => kinds.set(role, SymbolKind::Role, errors),
        RawConcept::Not(inner) => concept_kind_evidence(inner, kinds, errors),
    }
}

/// What an inclusion side demands of the opposite side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SideKind {
    Concept,
    Role,
    Unknown,
}

fn side_kind(c: &RawConcept, kinds: &Kinds) -> SideKind {
    match c {
        RawConcept::Bottom(_) | RawConcept::Not(_) => SideKind::Concept,
        RawConcept::Exists { explicit_exists: true, .. } => SideKind::Concept,
        RawConcept::Exists { explicit_exists: false, .. } => SideKind::Role,
        RawConcept::Bare(n) => match kinds.get(&n.name) {
            Some(SymbolKind::Concept) => SideKind::Concept,
            Some(SymbolKind::Role) => SideKind::Role,
            _ => SideKind::Unknown,
        },
    }
}

/// Parse a `.dkb` text into a knowledge base.
///
/// The parser is total: any byte input yields either a knowledge base or a
/// list of diagnostics with source spans.
pub fn parse_dkb(text: &str) -> Result<Dkb, ParseError> {
    let tokens = lex(text).map_err(|d| ParseError { diagnostics: vec![d] })?;
    let mut parser = Parser { tokens, pos: 0 };
    let items = parser
        .parse_items()
        .map_err(|diagnostics| ParseError { diagnostics })?;

    let mut errors: Vec<Diagnostic> = Vec::new();
    let mut kinds = Kinds::default();

    // Pass 1: collect kind evidence from unambiguous positions.
    for item in &items {
        match item {
            RawItem::Declare { kind, names } => {
                for n in names {
                    kinds.set(n, *kind, &mut errors);
                }
            }
            RawItem::NoUna => {}
            RawItem::Statement(stmt) => match &stmt.body {
                RawBody::RoleAxiom { args, .. } => {
                    for a in args {
                        kinds.set(a, SymbolKind::Role, &mut errors);
                    }
                }
                RawBody::Assertion { pred, args, .. } => {
                    let kind = if args.len() == 1 {
                        SymbolKind::Concept
                    } else {
                        SymbolKind::Role
                    };
                    kinds.set(pred, kind, &mut errors);
                    for a in args {
                        kinds.set(a, SymbolKind::Individual, &mut errors);
                    }
                }
                RawBody::Inclusion { lhs, rhs } => {
                    concept_kind_evidence(lhs, &mut kinds, &mut errors);
                    concept_kind_evidence(rhs, &mut kinds, &mut errors);
                }
            },
        }
    }

    // Pass 2: propagate kinds across inclusions to a fixpoint. Two bare
    // names of unknown kind default to concepts (at build time).
    loop {
        let mut changed = false;
        for item in &items {
            let RawItem::Statement(stmt) = item else { continue };
            let RawBody::Inclusion { lhs, rhs } = &stmt.body else {
                continue;
            };
            for (this, other) in [(lhs, rhs), (rhs, lhs)] {
                let RawConcept::Bare(n) = this else { continue };
                if kinds.get(&n.name).is_some() {
                    continue;
                }
                match side_kind(other, &kinds) {
                    SideKind::Concept => {
                        kinds.set(n, SymbolKind::Concept, &mut errors);
                        changed = true;
                    }
                    SideKind::Role => {
                        kinds.set(n, SymbolKind::Role, &mut errors);
                        changed = true;
                    }
                    SideKind::Unknown => {}
                }
            }
        }
        if !changed {
            break;
        }
    }

    // Pass 3: build the typed knowledge base, declaring names at first use.
    let mut dkb = Dkb::new();
    let declare = |dkb: &mut Dkb, n: &RawName, kind: SymbolKind, errors: &mut Vec<Diagnostic>| -> u32 {
        match dkb.vocab.declare_raw(&n.name, kind) {
            Ok(id) => id,
            Err(e) => {
                errors.push(Diagnostic {
                    span: n.span,
                    message: e.to_string(),
                });
                0
            }
        }
    };

    for item in &items {
        match item {
            RawItem::NoUna => dkb.una = false,
            RawItem::Declare { kind, names } => {
                for n in names {
                    declare(&mut dkb, n, *kind, &mut errors);
                }
            }
            RawItem::Statement(stmt) => {
                let before = errors.len();
                let body = build_body(&mut dkb, &stmt.body, &kinds, &mut errors, declare);
                if errors.len() > before {
                    continue;
                }
                match (stmt.defeasible, body) {
                    (false, Some(Typed::Axiom(ax))) => dkb.strict.push(ax),
                    (true, Some(Typed::Axiom(ax))) => {
                        if matches!(ax, Axiom::Dis(..)) {
                            errors.push(Diagnostic {
                                span: stmt.span,
                                message: "role disjointness cannot be defeasible".to_string(),
                            });
                        } else {
                            dkb.push_defeasible(ax);
                        }
                    }
                    (false, Some(Typed::Assertion(a))) => dkb.abox.push(a),
                    (true, Some(Typed::Assertion(a))) => dkb.defeasible_abox.push(a),
                    (_, None) => {}
                }
            }
        }
    }

    if errors.is_empty() {
        Ok(dkb)
    } else {
        Err(ParseError { diagnostics: errors })
    }
}

enum Typed {
    Axiom(Axiom),
    Assertion(Assertion),
}

fn build_body(
    dkb: &mut Dkb,
    body: &RawBody,
    kinds: &Kinds,
    errors: &mut Vec<Diagnostic>,
    declare: impl Fn(&mut Dkb, &RawName, SymbolKind, &mut Vec<Diagnostic>) -> u32 + Copy,
) -> Option<Typed> {
    match body {
        RawBody::RoleAxiom { kind, args } => {
            let ids: Vec<crate::kb::RoleId> = args
                .iter()
                .map(|a| crate::kb::RoleId(declare(dkb, a, SymbolKind::Role, errors)))
                .collect();
            Some(Typed::Axiom(match kind {
                RoleAxiomKind::Dis => Axiom::Dis(RoleExpr::plain(ids[0]), RoleExpr::plain(ids[1])),
                RoleAxiomKind::Inv => Axiom::Inv(ids[0], ids[1]),
                RoleAxiomKind::Irr => Axiom::Irr(ids[0]),
            }))
        }
        RawBody::Assertion { positive, pred, args } => {
            if args.len() == 1 {
                let c = crate::kb::ConceptId(declare(dkb, pred, SymbolKind::Concept, errors));
                let a = crate::kb::IndId(declare(dkb, &args[0], SymbolKind::Individual, errors));
                Some(Typed::Assertion(Assertion {
                    positive: *positive,
                    kind: AssertionKind::Concept(ConceptAtom::Named(c), a),
                }))
            } else {
                let r = crate::kb::RoleId(declare(dkb, pred, SymbolKind::Role, errors));
                let a = crate::kb::IndId(declare(dkb, &args[0], SymbolKind::Individual, errors));
                let b = crate::kb::IndId(declare(dkb, &args[1], SymbolKind::Individual, errors));
                Some(Typed::Assertion(Assertion {
                    positive: *positive,
                    kind: AssertionKind::Role(r, a, b),
                }))
            }
        }
        RawBody::Inclusion { lhs, rhs } => {
            // Role inclusion iff both sides are role expressions: a bare name
            // of role kind, or a bare `R^-` (Exists without the keyword).
            let side_role = |c: &RawConcept| -> Option<(RawName, bool)> {
                match c {
                    RawConcept::Bare(n) if kinds.get(&n.name) == Some(SymbolKind::Role) => {
                        Some((n.clone(), false))
                    }
                    RawConcept::Exists { role, inverted: true, explicit_exists: false } => {
                        Some((role.clone(), true))
                    }
                    _ => None,
                }
            };
            if let (Some((ln, linv)), Some((rn, rinv))) = (side_role(lhs), side_role(rhs)) {
                let l = crate::kb::RoleId(declare(dkb, &ln, SymbolKind::Role, errors));
                let r = crate::kb::RoleId(declare(dkb, &rn, SymbolKind::Role, errors));
                return Some(Typed::Axiom(Axiom::RoleIncl {
                    lhs: RoleExpr { role: l, inverted: linv },
                    rhs: RoleExpr { role: r, inverted: rinv },
                }));
            }

            let lhs_c = build_left(dkb, lhs, errors, declare)?;
            let rhs_c = build_right(dkb, rhs, errors, declare)?;
            Some(Typed::Axiom(Axiom::ConceptIncl { lhs: lhs_c, rhs: rhs_c }))
        }
    }
}

fn concept_span(c: &RawConcept) -> SourceSpan {
    match c {
        RawConcept::Bare(n) => n.span,
        RawConcept::Exists { role, .. } => role.span,
        RawConcept::Not(inner) => concept_span(inner),
        RawConcept::Bottom(span) => *span,
    }
}

fn build_left(
    dkb: &mut Dkb,
    c: &RawConcept,
    errors: &mut Vec<Diagnostic>,
    declare: impl Fn(&mut Dkb, &RawName, SymbolKind, &mut Vec<Diagnostic>) -> u32 + Copy,
) -> Option<LeftConcept> {
    match c {
        RawConcept::Bare(n) => Some(LeftConcept::Atomic(crate::kb::ConceptId(declare(
            dkb,
            n,
            SymbolKind::Concept,
            errors,
        )))),
        RawConcept::Exists { explicit_exists: false, role, .. } => {
            errors.push(Diagnostic {
                span: role.span,
                message: "role expression where a concept is required".to_string(),
            });
            None
        }
        RawConcept::Exists { role, inverted, .. } => Some(LeftConcept::Exists(RoleExpr {
            role: crate::kb::RoleId(declare(dkb, role, SymbolKind::Role, errors)),
            inverted: *inverted,
        })),
        RawConcept::Not(inner) => {
            errors.push(Diagnostic {
                span: concept_span(inner),
                message: "negation is not allowed on the left of an inclusion".to_string(),
            });
            None
        }
        RawConcept::Bottom(span) => {
            errors.push(Diagnostic {
                span: *span,
                message: "`bot` is not allowed on the left of an inclusion".to_string(),
            });
            None
        }
    }
}

fn build_right(
    dkb: &mut Dkb,
    c: &RawConcept,
    errors: &mut Vec<Diagnostic>,
    declare: impl Fn(&mut Dkb, &RawName, SymbolKind, &mut Vec<Diagnostic>) -> u32 + Copy,
) -> Option<RightConcept> {
    match c {
        RawConcept::Bare(n) => Some(RightConcept::Atomic(crate::kb::ConceptId(declare(
            dkb,
            n,
            SymbolKind::Concept,
            errors,
        )))),
        RawConcept::Exists { explicit_exists: false, role, .. } => {
            errors.push(Diagnostic {
                span: role.span,
                message: "role expression where a concept is required".to_string(),
            });
            None
        }
        RawConcept::Exists { role, inverted, .. } => Some(RightConcept::Exists(RoleExpr {
            role: crate::kb::RoleId(declare(dkb, role, SymbolKind::Role, errors)),
            inverted: *inverted,
        })),
        RawConcept::Not(inner) => {
            let inner = build_left(dkb, inner, errors, declare)?;
            Some(RightConcept::Not(inner))
        }
        RawConcept::Bottom(_) => Some(RightConcept::Bottom),
    }
}

// ---------------------------------------------------------------------------
// Serializer
// ---------------------------------------------------------------------------

fn role_expr_text(v: &Vocabulary, r: &RoleExpr) -> String {
    if r.inverted {
        format!("{}^-", v.role_name(r.role))
    } else {
        v.role_name(r.role).to_string()
    }
}

fn left_text(v: &Vocabulary, c: &LeftConcept) -> String {
    match c {
        LeftConcept::Atomic(a) => v.concept_name(*a).to_string(),
        LeftConcept::Exists(r) => format!("exists {}", role_expr_text(v, r)),
    }
}

fn right_text(v: &Vocabulary, c: &RightConcept) -> String {
    match c {
        RightConcept::Atomic(a) => v.concept_name(*a).to_string(),
        RightConcept::Not(inner) => format!("not {}", left_text(v, inner)),
        RightConcept::Exists(r) => format!("exists {}", role_expr_text(v, r)),
        RightConcept::Bottom => "bot".to_string(),
    }
}

/// Human-readable rendering of an axiom in the `.dkb` surface syntax.
pub fn axiom_text(v: &Vocabulary, ax: &Axiom) -> String {
    match ax {
        Axiom::ConceptIncl { lhs, rhs } => {
            format!("{} [= {}", left_text(v, lhs), right_text(v, rhs))
        }
        Axiom::RoleIncl { lhs, rhs } => {
            format!("{} [= {}", role_expr_text(v, lhs), role_expr_text(v, rhs))
        }
        Axiom::Dis(r, s) => format!("Dis({},{})", role_expr_text(v, r), role_expr_text(v, s)),
        Axiom::Inv(r, s) => format!("Inv({},{})", v.role_name(*r), v.role_name(*s)),
        Axiom::Irr(r) => format!("Irr({})", v.role_name(*r)),
    }
}

/// Human-readable rendering of an assertion in the `.dkb` surface syntax.
pub fn assertion_text(v: &Vocabulary, a: &Assertion) -> String {
    let neg = if a.positive { "" } else { "not " };
    match a.kind {
        AssertionKind::Concept(ConceptAtom::Named(c), i) => {
            format!("{neg}{}({})", v.concept_name(c), v.individual_name(i))
        }
        AssertionKind::Concept(ConceptAtom::Exists(r), i) => {
            format!("{neg}exists {}({})", v.role_name(r), v.individual_name(i))
        }
        AssertionKind::Role(r, a1, a2) => format!(
            "{neg}{}({},{})",
            v.role_name(r),
            v.individual_name(a1),
            v.individual_name(a2)
        ),
    }
}

/// Serialize a knowledge base to canonical `.dkb` text.
///
/// The output opens with explicit vocabulary directives, which makes the
/// round trip `parse(serialize(k)) == k` exact including declaration order.
pub fn serialize_dkb(k: &Dkb) -> String {
    let mut out = String::new();
    out.push_str("# .dkb knowledge base\n");
    let v = &k.vocab;
    let list =
        |names: Vec<&str>| -> String { names.join(", ") };
    if v.concept_count() > 0 {
        out.push_str(&format!(
            "@concepts {}.\n",
            list(v.concepts().map(|c| v.concept_name(c)).collect())
        ));
    }
    if v.role_count() > 0 {
        out.push_str(&format!(
            "@roles {}.\n",
            list(v.roles().map(|r| v.role_name(r)).collect())
        ));
    }
    if v.individual_count() > 0 {
        out.push_str(&format!(
            "@individuals {}.\n",
            list(v.individuals().map(|i| v.individual_name(i)).collect())
        ));
    }
    if !k.una {
        out.push_str("@no-una.\n");
    }
    for ax in &k.strict {
        out.push_str(&axiom_text(v, ax));
        out.push_str(".\n");
    }
    for d in &k.defeasible {
        out.push_str(&format!("D: {}.\n", axiom_text(v, &d.inner)));
    }
    for a in &k.abox {
        out.push_str(&assertion_text(v, a));
        out.push_str(".\n");
    }
    for a in &k.defeasible_abox {
        out.push_str(&format!("D: {}.\n", assertion_text(v, a)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::LeftConcept;

    pub const DEPT: &str = "D: DeptMember [= exists hasCourse.\n\
         Professor [= DeptMember.\n\
         PhDStudent [= DeptMember.\n\
         PhDStudent [= not exists hasCourse.\n\
         Professor(alice).\n\
         PhDStudent(bob).\n";

    #[test]
    fn parses_dept_example() {
        let k = parse_dkb(DEPT).unwrap();
        assert_eq!(k.strict.len(), 3);
        assert_eq!(k.defeasible.len(), 1);
        assert_eq!(k.abox.len(), 2);
        assert!(k.una);
        let v = &k.vocab;
        assert_eq!(v.lookup_concept("DeptMember").map(|c| c.0), Some(0));
        assert_eq!(v.lookup_individual("alice").map(|i| i.0), Some(0));
        assert_eq!(v.lookup_individual("bob").map(|i| i.0), Some(1));
        assert_eq!(
            axiom_text(v, &k.defeasible[0].inner),
            "DeptMember [= exists hasCourse"
        );
    }

    #[test]
    fn parses_empty_input() {
        let k = parse_dkb("").unwrap();
        assert_eq!(k.statement_count(), 0);
        assert_eq!(k.vocab.concept_count(), 0);
    }

    #[test]
    fn parses_inverse_role_on_right() {
        let k = parse_dkb("A [= exists R^-.").unwrap();
        assert_eq!(k.strict.len(), 1);
        match k.strict[0] {
            Axiom::ConceptIncl { rhs: crate::kb::RightConcept::Exists(r), .. } => {
                assert!(r.inverted);
            }
            ref other => panic!("unexpected axiom {other:?}"),
        }
    }

    #[test]
    fn ref_axiom_is_rejected() {
        let err = parse_dkb("Ref(R).").unwrap_err();
        assert!(err.diagnostics[0].message.contains("reflexivity unsupported"));
    }

    #[test]
    fn inverse_in_inv_is_rejected() {
        let err = parse_dkb("Inv(R^-,S).").unwrap_err();
        assert!(err.diagnostics[0].message.contains("inverse"));
    }

    #[test]
    fn role_inclusion_by_kind_inference() {
        let k = parse_dkb("R(a,b).\nR [= S.").unwrap();
        assert_eq!(k.strict.len(), 1);
        assert!(matches!(k.strict[0], Axiom::RoleIncl { .. }));
        // S picked up the role kind through the inclusion.
        assert!(k.vocab.lookup_role("S").is_some());
    }

    #[test]
    fn bare_inclusion_defaults_to_concepts() {
        let k = parse_dkb("X [= Y.").unwrap();
        assert!(matches!(
            k.strict[0],
            Axiom::ConceptIncl { lhs: LeftConcept::Atomic(_), .. }
        ));
    }

    #[test]
    fn inverted_bare_name_is_role_inclusion() {
        let k = parse_dkb("R^- [= S.").unwrap();
        match k.strict[0] {
            Axiom::RoleIncl { lhs, rhs } => {
                assert!(lhs.inverted);
                assert!(!rhs.inverted);
            }
            ref other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn defeasible_assertions_accepted() {
        let k = parse_dkb("D: A(a).\nD: R(a,b).\nD: not A(b).").unwrap();
        assert_eq!(k.defeasible_abox.len(), 3);
    }

    #[test]
    fn no_una_directive() {
        let k = parse_dkb("@no-una.\nA(a).").unwrap();
        assert!(!k.una);
    }

    #[test]
    fn kind_clash_reports_span() {
        let err = parse_dkb("A(a).\nA(a,b).").unwrap_err();
        assert!(err.diagnostics[0].span.line == 2);
    }

    #[test]
    fn round_trip_dept() {
        let k = parse_dkb(DEPT).unwrap();
        let text = serialize_dkb(&k);
        let k2 = parse_dkb(&text).unwrap();
        assert_eq!(k, k2);
    }

    #[test]
    fn round_trip_role_inclusions_and_negatives() {
        let src = "@roles R, S.\nR [= S.\nDis(R,S).\nInv(R,S).\nIrr(R).\n\
                   not A(a).\nnot R(a,b).\nD: R [= S.\nD: Irr(S).";
        let k = parse_dkb(src).unwrap();
        let k2 = parse_dkb(&serialize_dkb(&k)).unwrap();
        assert_eq!(k, k2);
    }

    #[test]
    fn serialize_empty_is_header_only() {
        let k = Dkb::new();
        let text = serialize_dkb(&k);
        assert!(text.starts_with('#'));
        assert_eq!(text.lines().count(), 1);
    }

    #[test]
    fn parser_never_panics_on_garbage() {
        let inputs = [
            "[=.", "....", "not.", "exists.", "A [=", "((((", "@bogus x.",
            "D:", "D: .", "A(", "A(a,b,c).", "\u{0}\u{1}", "# only a comment",
            "bot [= A.", "A [= not not B.",
        ];
        for s in inputs {
            let _ = parse_dkb(s);
        }
    }
}
