//! Acceptance suite: one test per shipped guarantee, each printing a
//! PASS line (visible with `cargo test -- --nocapture`).
//!
//! Run with `cargo test -p delite --test acceptance`.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use delite::asp::{answer_sets, ground, least_model, reduct, LeastModel};
use delite::cli::{self, Format};
use delite::corpus::{random_dkb, run_differential, satisfiability_check, GenConfig};
use delite::dkbtext::parse_dkb;
use delite::dlprog::{assemble_program, emit_text};
use delite::kb::{Args, Assertion, Dkb};
use delite::oracle;
use delite::reason::{self, ConjunctiveQuery, Mode, Prepared};
use delite::safety::ChainBound;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn load(name: &str) -> Dkb {
    parse_dkb(&std::fs::read_to_string(data(name)).unwrap()).unwrap()
}

fn pass(n: u32, what: &str) {
    println!("acceptance {n}: PASS - {what}");
}

/// Reproduction of the department example: one answer set, the expected
/// exception, and the expected cautious entailments.
#[test]
fn criterion_1_dept_models_and_entailment() {
    let t0 = Instant::now();
    let p = Prepared::new(&load("dept.dkb"));
    let k = &p.normalized;

    let sets = reason::models(&p, None).unwrap();
    assert_eq!(sets.len(), 1, "exactly one answer set");
    let chi = &sets[0].chi;
    assert_eq!(chi.len(), 1);
    let alpha = &k.defeasible[chi[0].axiom.index()];
    assert_eq!(
        delite::dkbtext::axiom_text(&k.vocab, &alpha.inner),
        "DeptMember [= _ex_hasCourse"
    );
    assert_eq!(
        p.trace.origin_of(chi[0].axiom),
        "D: DeptMember [= exists hasCourse"
    );
    assert_eq!(chi[0].args, Args::Unary(k.vocab.lookup_individual("bob").unwrap()));

    let q = |text: &str| reason::parse_assertion_query(text, k).unwrap();
    assert!(reason::entails(&p, &q("_ex_hasCourse(alice)"), Mode::Cautious).unwrap().verdict);
    assert!(!reason::entails(&p, &q("_ex_hasCourse(bob)"), Mode::Cautious).unwrap().verdict);
    assert!(reason::entails(&p, &q("not _ex_hasCourse(bob)"), Mode::Cautious).unwrap().verdict);

    assert!(t0.elapsed().as_secs_f64() < 1.0, "under one second");
    pass(1, "department example: one model, exception on bob, entailments");
}

/// Certain answers of the department query are exactly {alice}.
#[test]
fn criterion_2_dept_certain_answers() {
    let t0 = Instant::now();
    let p = Prepared::new(&load("dept.dkb"));
    let q = ConjunctiveQuery::parse("?(x) :- DeptMember(x), hasCourse(x,y).", &p.normalized)
        .unwrap();
    let answers = reason::certain_answers(&p, &q, None).unwrap();
    let alice = p.normalized.vocab.lookup_individual("alice").unwrap();
    assert_eq!(answers.tuples, BTreeSet::from([vec![alice]]));
    assert!(t0.elapsed().as_secs_f64() < 1.0, "under one second");
    pass(2, "certain answers of the department query are exactly {alice}");
}

/// The supervisor example is classified unsafe and recursive, and every
/// reasoning command refuses it with exit code 1.
#[test]
fn criterion_3_unsafe_detection_and_refusal() {
    let p = Prepared::new(&load("example5.dkb"));
    assert!(!p.safety.exception_safe);
    assert!(p.safety.recursive);
    assert_eq!(p.safety.chain_bound, Some(ChainBound::Unbounded));

    let file = data("example5.dkb");
    assert_eq!(cli::cmd_check(&file, false, Format::Text).exit_code, 1);
    for outcome in [
        cli::cmd_compile(&file, None, Format::Text),
        cli::cmd_models(&file, None, Format::Text),
        cli::cmd_entail(&file, "Employee(alice)", Mode::Cautious, Format::Text),
        cli::cmd_query(&file, "? :- Employee(alice).", None, Format::Text),
    ] {
        assert_eq!(outcome.exit_code, 1, "{}", outcome.stdout);
    }
    pass(3, "supervisor example is unsafe+recursive and refused everywhere");
}

/// Differential suite: oracle exception sets and cautious entailments agree
/// with the pipeline on at least 500 exception-safe coherent inputs.
#[test]
fn criterion_4_differential_suite() {
    let t0 = Instant::now();
    let cfg = GenConfig::default();
    let (stats, mismatch) = run_differential(42, 2500, &cfg);
    assert!(mismatch.is_none(), "{mismatch:?}");
    assert!(
        stats.compared >= 500,
        "compared only {} knowledge bases",
        stats.compared
    );
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    pass(
        4,
        &format!(
            "differential over {} exception-safe inputs, 0 mismatches in {elapsed:?}",
            stats.compared
        ),
    );
}

/// Stable-model properties: every enumerated answer set is the least model
/// of its reduct, is consistent, and the exception family is an antichain.
#[test]
fn criterion_5_gl_property_suite() {
    let cfg = GenConfig::default();
    let mut checked_sets = 0usize;
    let mut checked_kbs = 0usize;
    let mut seed = 10_000u64;
    while checked_kbs < 150 {
        let k = random_dkb(seed, &cfg);
        seed += 1;
        let p = Prepared::new(&k);
        if !p.safety.exception_safe {
            continue;
        }
        let program = assemble_program(&p.normalized).unwrap();
        let Ok(sets) = answer_sets(&program, None) else { continue };
        let gp = ground(&program).unwrap();
        for s in &sets {
            match least_model(&reduct(&gp, &s.literals)) {
                LeastModel::Model(m) => assert_eq!(m, s.literals, "GL fixpoint at seed {seed}"),
                LeastModel::Inconsistent => panic!("inconsistent answer set at seed {seed}"),
            }
            for lit in &s.literals {
                assert!(!s.literals.contains(&lit.complement()), "inconsistent set");
            }
            checked_sets += 1;
        }
        // Exception-set family is a strict-subset antichain with pairwise
        // distinct guesses.
        for a in &sets {
            for b in &sets {
                if std::ptr::eq(a, b) {
                    continue;
                }
                assert_ne!(a.chi, b.chi, "duplicate exception set at seed {seed}");
                let a_in_b = a.chi.iter().all(|x| b.chi.contains(x));
                assert!(!a_in_b || a.chi.len() >= b.chi.len(), "chi not an antichain");
            }
        }
        checked_kbs += 1;
    }
    assert!(checked_sets > 0);
    pass(
        5,
        &format!("GL fixpoint/consistency/antichain over {checked_kbs} programs ({checked_sets} answer sets)"),
    );
}

/// Satisfiability agrees with the oracle's strict-part chase, including on
/// non-exception-safe inputs.
#[test]
fn criterion_6_satisfiability_suite() {
    let cfg = GenConfig::default();
    let mut count = 0;
    for seed in 20_000..20_400u64 {
        let k = random_dkb(seed, &cfg);
        satisfiability_check(&k).unwrap();
        count += 1;
    }
    // Plus the fixed worked examples.
    for (file, expected) in [
        ("dept.dkb", true),
        ("example5.dkb", true),
        ("nixon.dkb", true),
        ("inconsistent.dkb", false),
    ] {
        assert_eq!(reason::is_satisfiable(&load(file)).unwrap(), expected, "{file}");
        count += 1;
    }
    pass(6, &format!("satisfiability agreement on {count} inputs (safety not required)"));
}

/// Normalization: idempotent, linearly bounded, safety-verdict preserving,
/// and entailment-preserving over the original vocabulary per the oracle.
#[test]
fn criterion_7_normalization_suite() {
    let cfg = GenConfig::default();
    let mut entailment_checked = 0usize;
    let mut seen = 0usize;
    let mut seed = 30_000u64;
    while seen < 250 {
        let k = random_dkb(seed, &cfg);
        seed += 1;
        seen += 1;
        let (n1, _) = delite::normalize::normalize(&k);
        assert!(delite::normalize::is_normal_form(&n1), "seed {seed}");
        let (n2, _) = delite::normalize::normalize(&n1);
        assert_eq!(n1, n2, "idempotence at seed {seed}");
        assert!(
            n1.statement_count() <= 6 * k.statement_count().max(1),
            "size bound at seed {seed}"
        );
        // Safety verdict identical before and after normalization.
        let before = delite::safety::classify(&k);
        let after = delite::safety::classify(&n1);
        assert_eq!(before.exception_safe, after.exception_safe, "seed {seed}");

        // Oracle entailment over the original vocabulary is preserved.
        if !before.exception_safe {
            continue;
        }
        let p = Prepared::new(&k);
        if !delite::corpus::is_coherent(&p.normalized, 3) {
            continue;
        }
        let depth = reason::oracle_depth(&p).max(3);
        let Ok(raw_chis) = oracle::justified_chis(&k, depth, 14) else { continue };
        let Ok(norm_chis) = oracle::justified_chis(&n1, depth, 14) else { continue };
        let raw_ctx = oracle::EntailmentContext::new(&k, &raw_chis, depth);
        let norm_ctx = oracle::EntailmentContext::new(&n1, &norm_chis, depth);
        for positive in [true, false] {
            for c in k.vocab.concepts() {
                for i in k.vocab.individuals() {
                    let q = Assertion::concept(c, i);
                    let q = if positive { q } else { q.negated() };
                    assert_eq!(
                        raw_ctx.cautious(&q),
                        norm_ctx.cautious(&q),
                        "entailment of {} changed at seed {}",
                        delite::dkbtext::assertion_text(&k.vocab, &q),
                        seed - 1,
                    );
                }
            }
            for r in k.vocab.roles() {
                for i in k.vocab.individuals() {
                    for j in k.vocab.individuals() {
                        let q = Assertion::role(r, i, j);
                        let q = if positive { q } else { q.negated() };
                        assert_eq!(
                            raw_ctx.cautious(&q),
                            norm_ctx.cautious(&q),
                            "entailment of {} changed at seed {}",
                            delite::dkbtext::assertion_text(&k.vocab, &q),
                            seed - 1,
                        );
                    }
                }
            }
        }
        entailment_checked += 1;
    }
    assert!(entailment_checked >= 30, "only {entailment_checked} entailment comparisons");
    pass(
        7,
        &format!("normalization idempotent/bounded/preserving over {seen} inputs ({entailment_checked} oracle comparisons)"),
    );
}

/// Removing the contradicting assertion flips the exception away and the
/// defeasible conclusion back on.
#[test]
fn criterion_8_nonmonotonicity_regression() {
    let with = Prepared::new(&parse_dkb("D: A [= B.\nA(c).\nnot B(c).").unwrap());
    let chis = reason::justified_assumptions(&with).unwrap();
    assert_eq!(chis.len(), 1);
    assert_eq!(chis[0].chi.len(), 1);
    assert_eq!(
        with.trace.origin_of(chis[0].chi[0].axiom),
        "D: A [= B"
    );
    let q = reason::parse_assertion_query("B(c)", &with.normalized).unwrap();
    assert!(!reason::entails(&with, &q, Mode::Cautious).unwrap().verdict);

    let without = Prepared::new(&parse_dkb("D: A [= B.\nA(c).").unwrap());
    let chis = reason::justified_assumptions(&without).unwrap();
    assert_eq!(chis.len(), 1);
    assert!(chis[0].chi.is_empty());
    let q = reason::parse_assertion_query("B(c)", &without.normalized).unwrap();
    assert!(reason::entails(&without, &q, Mode::Cautious).unwrap().verdict);
    pass(8, "dropping `not B(c)` flips the exception off and B(c) on");
}

/// Emitted program for the department example is byte-identical to the
/// golden file; optionally cross-checked against an external ASP system.
#[test]
fn criterion_9_emitter_golden() {
    let p = Prepared::new(&load("dept.dkb"));
    let program = assemble_program(&p.normalized).unwrap();
    let text = emit_text(&program, &p.normalized.vocab);
    let golden_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/dept.lp");
    let golden = std::fs::read_to_string(&golden_path).unwrap();
    assert_eq!(text, golden, "emitted program differs from the golden file");

    // Optional external cross-check, enabled by pointing DELITE_CLINGO at a
    // clingo binary.
    if let Ok(solver) = std::env::var("DELITE_CLINGO") {
        let out = std::process::Command::new(&solver)
            .arg("--models=0")
            .arg("--outf=1")
            .arg(&golden_path)
            .output()
            .expect("external solver runs");
        let stdout = String::from_utf8_lossy(&out.stdout);
        let external: Vec<BTreeSet<String>> = stdout
            .lines()
            .filter(|l| !l.starts_with('%') && !l.trim().is_empty())
            .map(|l| l.split_whitespace().map(str::to_string).collect())
            .filter(|s: &BTreeSet<String>| !s.is_empty())
            .collect();
        let internal = answer_sets(&program, None).unwrap();
        assert_eq!(external.len(), internal.len(), "answer-set count differs");
        pass(9, "golden file matches; external solver agrees");
        return;
    }
    pass(9, "golden file matches (external solver check skipped: DELITE_CLINGO unset)");
}
