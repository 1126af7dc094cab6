//! Seeded random knowledge bases and the oracle-vs-pipeline differential
//! check used by the `fuzz` command and the verification suites.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::dkbtext::serialize_dkb;
use crate::kb::{
    Assertion, Axiom, ClashingAssumption, Dkb, LeftConcept, RightConcept, RoleExpr, SymbolKind,
};
use crate::oracle;
use crate::reason::{self, Prepared};
use crate::safety::ChainBound;

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub concepts: usize,
    pub roles: usize,
    pub individuals: usize,
    pub axioms: usize,
    /// Probability that a generated axiom is defeasible.
    pub defeasible_ratio: f64,
    /// Number of ABox assertions.
    pub assertions: usize,
    /// Allow `exists` on either side of inclusions and inverse roles.
    pub existentials: bool,
    /// Restrict defeasible axioms to shapes with clashing-set entries
    /// usable by the oracle on the raw (non-normalized) knowledge base.
    pub oracle_safe_defeasible: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            concepts: 3,
            roles: 2,
            individuals: 3,
            axioms: 6,
            defeasible_ratio: 0.45,
            assertions: 4,
            existentials: true,
            oracle_safe_defeasible: true,
        }
    }
}

/// Generate a random valid knowledge base. Equal seeds produce equal
/// output.
pub fn random_dkb(seed: u64, cfg: &GenConfig) -> Dkb {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut k = Dkb::new();
    for i in 0..cfg.concepts {
        k.vocab.declare(&format!("C{i}"), SymbolKind::Concept).unwrap();
    }
    for i in 0..cfg.roles {
        k.vocab.declare(&format!("r{i}"), SymbolKind::Role).unwrap();
    }
    for i in 0..cfg.individuals {
        k.vocab.declare(&format!("n{i}"), SymbolKind::Individual).unwrap();
    }
    let concept = |rng: &mut StdRng| crate::kb::ConceptId(rng.random_range(0..cfg.concepts) as u32);
    let role = |rng: &mut StdRng| crate::kb::RoleId(rng.random_range(0..cfg.roles) as u32);
    let ind = |rng: &mut StdRng| crate::kb::IndId(rng.random_range(0..cfg.individuals) as u32);
    let role_expr = |rng: &mut StdRng, invertible: bool| RoleExpr {
        role: role(rng),
        inverted: invertible && rng.random_bool(0.2),
    };

    // Shape weights are tuned for a usable yield of exception-safe,
    // coherent knowledge bases; negative and existential shapes are the
    // main sources of filtered-out inputs.
    const SHAPES: [(u32, u32); 8] = [
        (0, 30), // A [= B
        (1, 7),  // A [= not B
        (2, 12), // A [= exists r
        (3, 7),  // exists r [= A
        (4, 12), // r [= s
        (5, 4),  // Dis
        (6, 7),  // Inv
        (7, 4),  // Irr
    ];
    let total: u32 = SHAPES.iter().map(|(_, w)| w).sum();
    for _ in 0..cfg.axioms {
        let defeasible = rng.random_bool(cfg.defeasible_ratio);
        let has_roles = cfg.roles > 0;
        let ax = loop {
            let mut pick = rng.random_range(0..total);
            let shape = SHAPES
                .iter()
                .find(|(_, w)| {
                    if pick < *w {
                        true
                    } else {
                        pick -= w;
                        false
                    }
                })
                .map(|(s, _)| *s)
                .unwrap();
            let candidate = match shape {
                0 => Axiom::ConceptIncl {
                    lhs: LeftConcept::Atomic(concept(&mut rng)),
                    rhs: RightConcept::Atomic(concept(&mut rng)),
                },
                1 => Axiom::ConceptIncl {
                    lhs: LeftConcept::Atomic(concept(&mut rng)),
                    rhs: RightConcept::Not(LeftConcept::Atomic(concept(&mut rng))),
                },
                2 if has_roles && cfg.existentials => Axiom::ConceptIncl {
                    lhs: LeftConcept::Atomic(concept(&mut rng)),
                    rhs: RightConcept::Exists(role_expr(&mut rng, !defeasible || !cfg.oracle_safe_defeasible)),
                },
                3 if has_roles && cfg.existentials => Axiom::ConceptIncl {
                    lhs: LeftConcept::Exists(role_expr(&mut rng, !defeasible || !cfg.oracle_safe_defeasible)),
                    rhs: RightConcept::Atomic(concept(&mut rng)),
                },
                4 if has_roles => Axiom::RoleIncl {
                    lhs: role_expr(&mut rng, cfg.existentials && !defeasible),
                    rhs: role_expr(&mut rng, cfg.existentials && !defeasible),
                },
                5 if has_roles => {
                    let a = role(&mut rng);
                    let b = role(&mut rng);
                    if defeasible {
                        // No defeasible role disjointness.
                        Axiom::Inv(a, b)
                    } else {
                        Axiom::Dis(RoleExpr::plain(a), RoleExpr::plain(b))
                    }
                }
                6 if has_roles => Axiom::Inv(role(&mut rng), role(&mut rng)),
                7 if has_roles => Axiom::Irr(role(&mut rng)),
                _ => continue,
            };
            break candidate;
        };
        if defeasible {
            k.push_defeasible(ax);
        } else {
            k.strict.push(ax);
        }
    }

    for _ in 0..cfg.assertions {
        let positive = rng.random_bool(0.8);
        let defeasible = rng.random_bool(cfg.defeasible_ratio * 0.5);
        let a = if cfg.roles > 0 && rng.random_bool(0.4) {
            Assertion::role(role(&mut rng), ind(&mut rng), ind(&mut rng))
        } else {
            Assertion::concept(concept(&mut rng), ind(&mut rng))
        };
        let a = if positive { a } else { a.negated() };
        if defeasible {
            k.defeasible_abox.push(a);
        } else {
            k.abox.push(a);
        }
    }
    k
}

/// One oracle-vs-pipeline comparison on an exception-safe knowledge base.
/// Returns a description of the first mismatch, if any.
pub fn differential_check(p: &Prepared) -> Result<(), String> {
    let nk = &p.normalized;
    let depth = reason::oracle_depth(p).max(3);

    let sets = reason::models(p, None).map_err(|e| format!("pipeline error: {e}"))?;
    let mut pipeline_chis: Vec<Vec<ClashingAssumption>> =
        sets.iter().map(|s| s.chi.clone()).collect();
    pipeline_chis.sort();

    let mut oracle_chis = oracle::justified_chis(nk, depth, 12)
        .map_err(|e| format!("oracle error: {e}"))?;
    oracle_chis.sort();

    if pipeline_chis != oracle_chis {
        return Err(format!(
            "exception sets differ: pipeline {:?} vs oracle {:?}",
            pipeline_chis
                .iter()
                .map(|c| oracle::chi_display(nk, c))
                .collect::<Vec<_>>(),
            oracle_chis
                .iter()
                .map(|c| oracle::chi_display(nk, c))
                .collect::<Vec<_>>()
        ));
    }

    // Cautious entailment of every positive ground named atom must agree
    // exactly. For negated atoms the materialization is sound but not
    // complete (it has no proof by contradiction), so only the sound
    // direction is checked there.
    let ctx = oracle::EntailmentContext::new(nk, &oracle_chis, depth);
    for polarity in [true, false] {
        for c in nk.vocab.concepts() {
            for i in nk.vocab.individuals() {
                let q = if polarity {
                    Assertion::concept(c, i)
                } else {
                    Assertion::concept(c, i).negated()
                };
                compare_entailment(p, &sets, &ctx, &q)?;
            }
        }
        for r in nk.vocab.roles() {
            for i in nk.vocab.individuals() {
                for j in nk.vocab.individuals() {
                    let q = if polarity {
                        Assertion::role(r, i, j)
                    } else {
                        Assertion::role(r, i, j).negated()
                    };
                    compare_entailment(p, &sets, &ctx, &q)?;
                }
            }
        }
    }
    Ok(())
}

/// Pipeline-side cautious entailment straight off the enumerated answer
/// sets (vacuously true when there is none).
fn pipeline_cautious(sets: &[crate::asp::AnswerSet], q: &Assertion) -> Result<bool, String> {
    let lit = crate::dlprog::output_atom(q).map_err(|e| e.to_string())?;
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
    Ok(sets.iter().all(|s| s.literals.contains(&ground)))
}

fn compare_entailment(
    p: &Prepared,
    sets: &[crate::asp::AnswerSet],
    ctx: &oracle::EntailmentContext,
    q: &Assertion,
) -> Result<(), String> {
    let nk = &p.normalized;
    let via_pipeline = pipeline_cautious(sets, q)?;
    let via_oracle = ctx.cautious(q);
    let agree = if q.positive {
        via_pipeline == via_oracle
    } else {
        // Sound direction only.
        !via_pipeline || via_oracle
    };
    if !agree {
        return Err(format!(
            "entailment of {} differs: pipeline {via_pipeline}, oracle {via_oracle}",
            crate::dkbtext::assertion_text(&nk.vocab, q),
        ));
    }
    Ok(())
}

/// Satisfiability must agree with the oracle's strict-part chase; holds for
/// arbitrary (also non-exception-safe) knowledge bases.
pub fn satisfiability_check(k: &Dkb) -> Result<(), String> {
    let via_reason =
        reason::is_satisfiable(k).map_err(|e| format!("satisfiability error: {e}"))?;
    let p = Prepared::new(k);
    let depth = match p.safety.chain_bound {
        Some(ChainBound::Finite(n)) => n.max(1).min(6),
        _ => 6,
    };
    let via_oracle = oracle::strict_satisfiable(&p.normalized, depth);
    if via_reason != via_oracle {
        return Err(format!(
            "satisfiability differs: pipeline {via_reason}, oracle {via_oracle}"
        ));
    }
    Ok(())
}

/// True when no atom over generic fresh individuals refutes itself under
/// `K_s` (all defeasible axioms read as strict): checks `B(x)` for every
/// concept and `r(x,y)`, `r(x,x)` for every role.
///
/// The datalog materialization derives negative information by direct rules
/// only; a clashing-set negative that needs proof by contradiction (an atom
/// whose own consequences clash, which happens exactly when the TBox makes
/// a concept or a role pattern unsatisfiable) is beyond it, while the
/// oracle's justification test captures it. Differential corpora are
/// restricted to coherent inputs, where the two coincide.
pub fn is_coherent(nk: &Dkb, depth: usize) -> bool {
    let mut ks = nk.clone();
    for d in std::mem::take(&mut ks.defeasible) {
        ks.strict.push(d.inner);
    }
    ks.abox.clear();
    ks.defeasible_abox.clear();
    let x = ks.vocab.declare_raw("_aux_x", SymbolKind::Individual).unwrap();
    let y = ks.vocab.declare_raw("_aux_y", SymbolKind::Individual).unwrap();
    let x = crate::kb::IndId(x);
    let y = crate::kb::IndId(y);
    let consistent_with = |a: Assertion| {
        let mut probe = ks.clone();
        probe.abox.push(a);
        oracle::least_cas_model(&probe, &[], depth).status
            == crate::oracle::ModelStatus::Consistent
    };
    for c in nk.vocab.concepts() {
        if !consistent_with(Assertion::concept(c, x)) {
            return false;
        }
    }
    for r in nk.vocab.roles() {
        if !consistent_with(Assertion::role(r, x, y)) {
            return false;
        }
        if !consistent_with(Assertion::role(r, x, x)) {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone)]
pub struct Mismatch {
    pub seed: u64,
    pub dkb_text: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct DiffStats {
    /// Knowledge bases compared (exception-safe ones).
    pub compared: usize,
    /// Generated knowledge bases skipped by the safety filter.
    pub skipped_unsafe: usize,
    /// Skipped by the coherence filter.
    pub skipped_incoherent: usize,
    /// Skipped because the candidate space exceeded the oracle budget.
    pub skipped_budget: usize,
}

/// Run the differential over `count` seeded random knowledge bases,
/// stopping at the first mismatch. The mismatching input is greedily
/// minimized by dropping statements while the mismatch persists.
pub fn run_differential(
    seed: u64,
    count: usize,
    cfg: &GenConfig,
) -> (DiffStats, Option<Mismatch>) {
    let mut stats = DiffStats::default();
    for n in 0..count {
        let kb_seed = seed.wrapping_add(n as u64);
        let k = random_dkb(kb_seed, cfg);
        let p = Prepared::new(&k);
        if !p.safety.exception_safe {
            stats.skipped_unsafe += 1;
            continue;
        }
        if !is_coherent(&p.normalized, reason::oracle_depth(&p).max(3)) {
            stats.skipped_incoherent += 1;
            continue;
        }
        match check_one(&p) {
            Ok(()) => stats.compared += 1,
            Err(detail) if detail.contains("budget") => {
                stats.skipped_budget += 1;
            }
            Err(detail) => {
                let minimized = minimize(&k, &detail);
                return (
                    stats,
                    Some(Mismatch {
                        seed: kb_seed,
                        dkb_text: serialize_dkb(&minimized),
                        detail,
                    }),
                );
            }
        }
    }
    (stats, None)
}

fn check_one(p: &Prepared) -> Result<(), String> {
    differential_check(p)
}

/// Drop statements one at a time while the knowledge base keeps failing the
/// same way (stays valid, exception safe, and mismatching).
fn minimize(k: &Dkb, _detail: &str) -> Dkb {
    let mut current = k.clone();
    loop {
        let total = current.statement_count();
        let mut shrunk = None;
        for idx in 0..total {
            let candidate = drop_statement(&current, idx);
            let p = Prepared::new(&candidate);
            if !p.safety.exception_safe
                || !is_coherent(&p.normalized, reason::oracle_depth(&p).max(3))
            {
                continue;
            }
            if check_one(&p).is_err() {
                shrunk = Some(candidate);
                break;
            }
        }
        match shrunk {
            Some(next) => current = next,
            None => return current,
        }
    }
}

/// Remove the `idx`-th statement (in strict / defeasible / abox /
/// defeasible-abox order), rebuilding defeasible identifiers.
pub fn drop_statement(k: &Dkb, idx: usize) -> Dkb {
    let mut out = Dkb { vocab: k.vocab.clone(), una: k.una, ..Dkb::new() };
    let mut i = 0;
    for ax in &k.strict {
        if i != idx {
            out.strict.push(*ax);
        }
        i += 1;
    }
    for d in &k.defeasible {
        if i != idx {
            out.push_defeasible(d.inner);
        }
        i += 1;
    }
    for a in &k.abox {
        if i != idx {
            out.abox.push(*a);
        }
        i += 1;
    }
    for a in &k.defeasible_abox {
        if i != idx {
            out.defeasible_abox.push(*a);
        }
        i += 1;
    }
    out
}
