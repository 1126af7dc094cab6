//! Corpus-level property tests complementing the acceptance suite.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use delite::corpus::{random_dkb, GenConfig};
use delite::dkbtext::{parse_dkb, serialize_dkb};
use delite::kb::{Assertion, Axiom, LeftConcept, SkTerm};
use delite::oracle::{self, OAtom};
use delite::reason::{self, ConjunctiveQuery, Mode, Prepared};

/// The exception-safety verdict is sound at the concrete level: chasing the
/// knowledge base with every defeasible axiom applied (depth 3) never
/// produces a clashing-set positive atom over a Skolem term.
#[test]
fn safe_verdict_is_concretely_sound() {
    let cfg = GenConfig::default();
    let mut checked = 0;
    for seed in 40_000..40_400u64 {
        let k = random_dkb(seed, &cfg);
        let p = Prepared::new(&k);
        if !p.safety.exception_safe {
            continue;
        }
        let nk = &p.normalized;
        // Clash-positive predicates of the normal-form defeasible axioms.
        let mut concepts = Vec::new();
        let mut roles = Vec::new();
        for d in &nk.defeasible {
            match &d.inner {
                Axiom::ConceptIncl { lhs: LeftConcept::Atomic(a), .. } => concepts.push(*a),
                Axiom::RoleIncl { lhs, .. } => roles.push(lhs.role),
                Axiom::Inv(r, s) => {
                    roles.push(*r);
                    roles.push(*s);
                }
                Axiom::Irr(r) => roles.push(*r),
                _ => {}
            }
        }
        let model = oracle::least_cas_model(nk, &[], 3);
        let skolem = |t: &SkTerm| !matches!(t, SkTerm::Named(_));
        for atom in &model.pos {
            match atom {
                OAtom::Concept(c, t) if skolem(t) => {
                    assert!(!concepts.contains(c), "seed {seed}: {atom:?}");
                }
                OAtom::Role(r, t, u) if skolem(t) || skolem(u) => {
                    assert!(!roles.contains(r), "seed {seed}: {atom:?}");
                }
                _ => {}
            }
        }
        checked += 1;
    }
    assert!(checked > 50);
}

/// The parser is total: arbitrary bytes produce a knowledge base or
/// diagnostics, never a panic.
#[test]
fn parser_is_total_over_random_bytes() {
    let mut rng = StdRng::seed_from_u64(99);
    let tokens = [
        "A", "B", "r", "s", "a", "b", "[=", ".", ",", "(", ")", "^-", "D:", "not",
        "exists", "bot", "Dis", "Inv", "Irr", "Ref", "@concepts", "@roles", "@no-una",
        "#x", "\n", " ", "\u{1}", "\\",
    ];
    for _ in 0..3000 {
        let len = rng.random_range(0..30);
        let text: String = (0..len)
            .map(|_| tokens[rng.random_range(0..tokens.len())])
            .collect::<Vec<_>>()
            .join(if rng.random_bool(0.5) { " " } else { "" });
        let _ = parse_dkb(&text);
    }
    // Raw bytes too.
    for _ in 0..500 {
        let len = rng.random_range(0..60);
        let bytes: Vec<u8> = (0..len).map(|_| rng.random_range(0..=255u8)).collect();
        let _ = parse_dkb(&String::from_utf8_lossy(&bytes));
    }
}

/// Round trip holds for generated knowledge bases and for their normalized
/// forms (whose serialization carries generated `_ex_`/`_nf_` names).
#[test]
fn round_trip_including_normalized_forms() {
    let cfg = GenConfig::default();
    for seed in 50_000..50_200u64 {
        let k = random_dkb(seed, &cfg);
        assert_eq!(parse_dkb(&serialize_dkb(&k)).unwrap(), k);
        let (nk, _) = delite::normalize::normalize(&k);
        let text = serialize_dkb(&nk);
        assert_eq!(parse_dkb(&text).unwrap(), nk, "{text}");
    }
}

/// Boolean one-atom queries agree with cautious entailment.
#[test]
fn single_atom_query_agreement_on_corpus() {
    let cfg = GenConfig::default();
    let mut checked = 0;
    let mut seed = 60_000u64;
    while checked < 60 {
        let k = random_dkb(seed, &cfg);
        seed += 1;
        let p = Prepared::new(&k);
        if !p.safety.exception_safe {
            continue;
        }
        let nk = p.normalized.clone();
        for c in k.vocab.concepts() {
            for i in k.vocab.individuals() {
                let text = format!(
                    "? :- {}({}).",
                    nk.vocab.concept_name(c),
                    nk.vocab.individual_name(i)
                );
                let cq = ConjunctiveQuery::parse(&text, &nk).unwrap();
                let via_query =
                    !reason::certain_answers(&p, &cq, None).unwrap().tuples.is_empty();
                let via_entail = reason::entails(&p, &Assertion::concept(c, i), Mode::Cautious)
                    .unwrap()
                    .verdict;
                assert_eq!(via_query, via_entail, "seed {} {text}", seed - 1);
            }
        }
        checked += 1;
    }
}

/// Cautious entailment implies brave entailment whenever an answer set
/// exists.
#[test]
fn mode_order_on_corpus() {
    let cfg = GenConfig::default();
    let mut checked = 0;
    let mut seed = 70_000u64;
    while checked < 60 {
        let k = random_dkb(seed, &cfg);
        seed += 1;
        let p = Prepared::new(&k);
        if !p.safety.exception_safe {
            continue;
        }
        let Ok(sets) = reason::models(&p, None) else { continue };
        if sets.is_empty() {
            continue;
        }
        for c in k.vocab.concepts() {
            for i in k.vocab.individuals() {
                let q = Assertion::concept(c, i);
                let cautious = reason::entails(&p, &q, Mode::Cautious).unwrap().verdict;
                if cautious {
                    assert!(
                        reason::entails(&p, &q, Mode::Brave).unwrap().verdict,
                        "seed {}",
                        seed - 1
                    );
                }
            }
        }
        checked += 1;
    }
}
