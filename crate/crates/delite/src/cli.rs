//! Command implementations behind the `delite` binary.
//!
//! Exit codes: `check` returns 0 for valid and exception-safe input, 1 for
//! valid but unsafe, 2 for invalid; the reasoning commands return 1 when
//! they refuse an unsafe knowledge base and 2 on malformed input; `fuzz`
//! returns 1 on a differential mismatch.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::asp::AnswerSet;
use crate::corpus::{run_differential, GenConfig};
use crate::dkbtext::parse_dkb;
use crate::dlprog::{assemble_program, emit_text, DConst, Pred};
use crate::kb::{validate_dkb, Args, Dkb};
use crate::normalize::NormalizationTrace;
use crate::reason::{self, ConjunctiveQuery, Mode, Prepared};
use crate::safety::render_report;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
}

fn ok(stdout: String) -> Outcome {
    Outcome { exit_code: 0, stdout }
}

fn fail(exit_code: i32, message: String) -> Outcome {
    Outcome { exit_code, stdout: message }
}

fn load(path: &Path) -> Result<Dkb, Outcome> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Err(fail(2, format!("error: cannot read {}: {e}\n", path.display()))),
    };
    match parse_dkb(&text) {
        Ok(k) => Ok(k),
        Err(e) => {
            let mut out = String::new();
            for d in &e.diagnostics {
                let _ = writeln!(out, "{}: {d}", path.display());
            }
            Err(fail(2, out))
        }
    }
}

/// Validation + normalization + safety classification. `explain` appends
/// the normalization trace (rewrite steps and fresh symbols).
pub fn cmd_check(path: &Path, explain: bool, format: Format) -> Outcome {
    let k = match load(path) {
        Ok(k) => k,
        Err(out) => return out,
    };
    let validation = validate_dkb(&k);
    if !validation.is_valid() {
        let mut out = String::new();
        for e in &validation.errors {
            let _ = writeln!(out, "error: {e}");
        }
        return fail(2, out);
    }
    let p = Prepared::new(&k);
    let report = &p.safety;
    let exit = if report.exception_safe { 0 } else { 1 };
    let stdout = match format {
        Format::Text => {
            let mut out = String::new();
            for w in &validation.warnings {
                let _ = writeln!(out, "warning: {w}");
            }
            out.push_str(&render_report(report, &p.normalized.vocab));
            if explain {
                out.push_str("normalization:
");
                for step in &p.trace.rewrite_steps {
                    if step.produced.len() == 1 && step.produced[0] == step.source {
                        continue;
                    }
                    let _ = writeln!(out, "  {}  =>  {}", step.source, step.produced.join("; "));
                }
                for sym in &p.trace.introduced_symbols {
                    let _ = writeln!(out, "  fresh {} `{}` from: {}", sym.kind, sym.name, sym.origin);
                }
            }
            out
        }
        Format::Json => {
            let witnesses: Vec<Vec<String>> = report
                .witnesses
                .iter()
                .map(|w| {
                    w.steps
                        .iter()
                        .map(|s| s.display(&p.normalized.vocab).to_string())
                        .collect()
                })
                .collect();
            let chain = report.chain_bound.map(|b| b.to_string());
            let trace: Vec<_> = if explain {
                p.trace
                    .rewrite_steps
                    .iter()
                    .map(|s| json!({"source": s.source, "produced": s.produced}))
                    .collect()
            } else {
                Vec::new()
            };
            json_line(json!({
                "command": "check",
                "warnings": validation.warnings,
                "exception_safe": report.exception_safe,
                "chain_bound": chain,
                "recursive": report.recursive,
                "witnesses": witnesses,
                "normalization": trace,
            }))
        }
    };
    Outcome { exit_code: exit, stdout }
}

/// Compile to the datalog program text.
pub fn cmd_compile(path: &Path, out_path: Option<&PathBuf>, format: Format) -> Outcome {
    let k = match load(path) {
        Ok(k) => k,
        Err(out) => return out,
    };
    let p = Prepared::new(&k);
    let program = match assemble_program(&p.normalized) {
        Ok(prog) => prog,
        Err(e) => return refuse(&p, format!("error: {e}\n")),
    };
    let text = emit_text(&program, &p.normalized.vocab);
    match out_path {
        Some(dest) => match fs::write(dest, &text) {
            Ok(()) => ok(format!("wrote {}\n", dest.display())),
            Err(e) => fail(2, format!("error: cannot write {}: {e}\n", dest.display())),
        },
        None => match format {
            Format::Text => ok(text),
            Format::Json => ok(json_line(json!({"command": "compile", "program": text}))),
        },
    }
}

fn refuse(p: &Prepared, message: String) -> Outcome {
    let mut out = message;
    out.push_str(&render_report(&p.safety, &p.normalized.vocab));
    fail(1, out)
}

fn chi_text(p: &Prepared, trace: &NormalizationTrace, chi: &[crate::kb::ClashingAssumption]) -> Vec<String> {
    chi.iter()
        .map(|ca| {
            let origin = trace.origin_of(ca.axiom);
            let origin = origin.strip_prefix("D: ").unwrap_or(origin);
            let args = match ca.args {
                Args::Unary(e) => p.normalized.vocab.individual_name(e).to_string(),
                Args::Binary(e1, e2) => format!(
                    "{},{}",
                    p.normalized.vocab.individual_name(e1),
                    p.normalized.vocab.individual_name(e2)
                ),
            };
            format!("{origin} @ {args}")
        })
        .collect()
}

/// ABox-level rendering of an answer set: instance literals over constants.
fn abox_lines(p: &Prepared, set: &AnswerSet) -> Vec<String> {
    let v = &p.normalized.vocab;
    let name = |c: &DConst| match c {
        DConst::Ind(i) => v.individual_name(*i).to_string(),
        DConst::Aux(n) => format!("aux_{}", n + 1),
        DConst::Cls(c) => v.concept_name(*c).to_string(),
        DConst::Rol(r) => v.role_name(*r).to_string(),
        DConst::Tag(t) => t.name().to_string(),
    };
    let mut lines: Vec<String> = Vec::new();
    for lit in &set.literals {
        let neg = if lit.strong_neg { "not " } else { "" };
        match lit.pred {
            Pred::Instd => {
                lines.push(format!("{neg}{}({})", name(&lit.args[1]), name(&lit.args[0])));
            }
            Pred::Tripled => {
                lines.push(format!(
                    "{neg}{}({},{})",
                    name(&lit.args[1]),
                    name(&lit.args[0]),
                    name(&lit.args[2])
                ));
            }
            _ => {}
        }
    }
    lines.sort();
    lines
}

/// Enumerate answer sets with their exception sets.
pub fn cmd_models(path: &Path, limit: Option<usize>, format: Format) -> Outcome {
    let k = match load(path) {
        Ok(k) => k,
        Err(out) => return out,
    };
    let p = Prepared::new(&k);
    let sets = match reason::models(&p, limit) {
        Ok(sets) => sets,
        Err(e) => return refuse(&p, format!("error: {e}\n")),
    };
    match format {
        Format::Text => {
            let mut out = String::new();
            if sets.is_empty() {
                out.push_str("UNSATISFIABLE (strict)\n");
            }
            for (i, set) in sets.iter().enumerate() {
                let _ = writeln!(out, "model {}:", i + 1);
                for line in chi_text(&p, &p.trace, &set.chi) {
                    let _ = writeln!(out, "  override: {line}");
                }
                for line in abox_lines(&p, set) {
                    let _ = writeln!(out, "  {line}");
                }
            }
            if !sets.is_empty() {
                let _ = writeln!(out, "{} model(s)", sets.len());
            }
            ok(out)
        }
        Format::Json => {
            let models: Vec<_> = sets
                .iter()
                .map(|set| {
                    json!({
                        "overrides": chi_text(&p, &p.trace, &set.chi),
                        "abox": abox_lines(&p, set),
                    })
                })
                .collect();
            ok(json_line(json!({
                "command": "models",
                "satisfiable": !models.is_empty(),
                "models": models,
            })))
        }
    }
}

/// Cautious/brave entailment of one ground assertion.
pub fn cmd_entail(path: &Path, assertion: &str, mode: Mode, format: Format) -> Outcome {
    let k = match load(path) {
        Ok(k) => k,
        Err(out) => return out,
    };
    let p = Prepared::new(&k);
    let q = match reason::parse_assertion_query(assertion, &p.normalized) {
        Ok(q) => q,
        Err(e) => return fail(2, format!("error: {e}\n")),
    };
    let result = match reason::entails(&p, &q, mode) {
        Ok(r) => r,
        Err(e) => return refuse(&p, format!("error: {e}\n")),
    };
    match format {
        Format::Text => {
            let mut out = String::new();
            if result.strict_unsat {
                out.push_str("UNSATISFIABLE (strict): entailment is vacuous\n");
            }
            let _ = writeln!(out, "{} ({} mode)", result.verdict, result.mode);
            for chi in &result.witnesses {
                let role = if result.verdict { "supporting" } else { "refuting" };
                let _ = writeln!(
                    out,
                    "  {role} exceptions: [{}]",
                    chi_text(&p, &p.trace, chi).join("; ")
                );
            }
            ok(out)
        }
        Format::Json => ok(json_line(json!({
            "command": "entail",
            "assertion": assertion,
            "mode": mode.to_string(),
            "verdict": result.verdict,
            "strict_unsat": result.strict_unsat,
            "witnesses": result.witnesses.iter().map(|c| chi_text(&p, &p.trace, c)).collect::<Vec<_>>(),
        }))),
    }
}

/// Certain answers of a conjunctive query.
pub fn cmd_query(path: &Path, query: &str, depth: Option<usize>, format: Format) -> Outcome {
    let k = match load(path) {
        Ok(k) => k,
        Err(out) => return out,
    };
    let p = Prepared::new(&k);
    let q = match ConjunctiveQuery::parse(query, &p.normalized) {
        Ok(q) => q,
        Err(e) => return fail(2, format!("error: {e}\n")),
    };
    let answers = match reason::certain_answers(&p, &q, depth) {
        Ok(a) => a,
        Err(e) => return refuse(&p, format!("error: {e}\n")),
    };
    let tuples: Vec<Vec<String>> = answers
        .tuples
        .iter()
        .map(|t| {
            t.iter()
                .map(|i| p.normalized.vocab.individual_name(*i).to_string())
                .collect()
        })
        .collect();
    match format {
        Format::Text => {
            let mut out = String::new();
            if answers.strict_unsat {
                out.push_str("UNSATISFIABLE (strict): every tuple is certain\n");
            }
            if answers.completeness_warning {
                let _ = writeln!(
                    out,
                    "warning: Skolem depth {} may be too small for completeness",
                    answers.depth_used
                );
            }
            if q.answer_arity == 0 {
                let _ = writeln!(out, "{}", !answers.tuples.is_empty());
            } else if tuples.is_empty() {
                out.push_str("no certain answers\n");
            } else {
                for t in &tuples {
                    let _ = writeln!(out, "({})", t.join(","));
                }
            }
            ok(out)
        }
        Format::Json => ok(json_line(json!({
            "command": "query",
            "query": query,
            "boolean": q.answer_arity == 0,
            "holds": !answers.tuples.is_empty(),
            "answers": tuples,
            "strict_unsat": answers.strict_unsat,
            "completeness_warning": answers.completeness_warning,
            "depth": answers.depth_used,
        }))),
    }
}

/// Differential fuzzing: random knowledge bases, oracle vs pipeline.
pub fn cmd_fuzz(seed: u64, count: usize, format: Format) -> Outcome {
    let cfg = GenConfig::default();
    let (stats, mismatch) = run_differential(seed, count, &cfg);
    match format {
        Format::Text => match mismatch {
            None => ok(format!(
                "checked {} knowledge bases ({} skipped unsafe, {} incoherent, {} over budget): no mismatches\n",
                stats.compared, stats.skipped_unsafe, stats.skipped_incoherent, stats.skipped_budget
            )),
            Some(m) => fail(
                1,
                format!(
                    "MISMATCH at seed {}: {}\nminimized input:\n{}",
                    m.seed, m.detail, m.dkb_text
                ),
            ),
        },
        Format::Json => {
            let (exit, payload) = match mismatch {
                None => (
                    0,
                    json!({
                        "command": "fuzz",
                        "compared": stats.compared,
                        "skipped_unsafe": stats.skipped_unsafe,
                        "skipped_incoherent": stats.skipped_incoherent,
                        "skipped_budget": stats.skipped_budget,
                        "mismatch": null,
                    }),
                ),
                Some(m) => (
                    1,
                    json!({
                        "command": "fuzz",
                        "compared": stats.compared,
                        "mismatch": {"seed": m.seed, "detail": m.detail, "input": m.dkb_text},
                    }),
                ),
            };
            Outcome { exit_code: exit, stdout: json_line(payload) }
        }
    }
}

fn json_line(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(name: &str, content: &str) -> PathBuf {
        let dir = std::env::temp_dir().join("delite-cli-tests");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        path
    }

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

    #[test]
    fn check_exit_codes() {
        let dept = write_temp("dept.dkb", DEPT);
        let out = cmd_check(&dept, false, Format::Text);
        assert_eq!(out.exit_code, 0);
        assert!(out.stdout.contains("chain bound: 1"), "{}", out.stdout);

        let sup = write_temp("sup.dkb", SUPERVISOR);
        let out = cmd_check(&sup, false, Format::Text);
        assert_eq!(out.exit_code, 1);
        assert!(out.stdout.contains("unsafe derivation"));

        let bad = write_temp("bad.dkb", "A [=.");
        let out = cmd_check(&bad, false, Format::Text);
        assert_eq!(out.exit_code, 2);
    }

    #[test]
    fn models_output() {
        let dept = write_temp("dept2.dkb", DEPT);
        let out = cmd_models(&dept, None, Format::Text);
        assert_eq!(out.exit_code, 0);
        assert!(out.stdout.contains("model 1:"));
        assert!(
            out.stdout.contains("override: DeptMember [= exists hasCourse @ bob"),
            "{}",
            out.stdout
        );
        assert!(out.stdout.contains("1 model(s)"));

        let bad = write_temp("inconsistent.dkb", "A(a).\nA [= B.\nA [= not B.\n");
        let out = cmd_models(&bad, None, Format::Text);
        assert_eq!(out.exit_code, 0);
        assert!(out.stdout.contains("UNSATISFIABLE (strict)"));
    }

    #[test]
    fn reasoning_commands_refuse_unsafe_input() {
        let sup = write_temp("sup2.dkb", SUPERVISOR);
        assert_eq!(cmd_models(&sup, None, Format::Text).exit_code, 1);
        assert_eq!(cmd_compile(&sup, None, Format::Text).exit_code, 1);
        assert_eq!(
            cmd_entail(&sup, "Employee(alice)", Mode::Cautious, Format::Text).exit_code,
            1
        );
        assert_eq!(
            cmd_query(&sup, "? :- Employee(alice).", None, Format::Text).exit_code,
            1
        );
    }

    #[test]
    fn entail_and_query_text() {
        let dept = write_temp("dept3.dkb", DEPT);
        let out = cmd_entail(&dept, "_ex_hasCourse(alice)", Mode::Cautious, Format::Text);
        assert_eq!(out.exit_code, 0);
        assert!(out.stdout.starts_with("true"));
        let out = cmd_query(&dept, "?(x) :- DeptMember(x), hasCourse(x,y).", None, Format::Text);
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.stdout.trim(), "(alice)");
    }

    #[test]
    fn json_output_is_valid() {
        let dept = write_temp("dept4.dkb", DEPT);
        for out in [
            cmd_check(&dept, true, Format::Json),
            cmd_models(&dept, None, Format::Json),
            cmd_entail(&dept, "DeptMember(bob)", Mode::Brave, Format::Json),
            cmd_query(&dept, "? :- Professor(alice).", None, Format::Json),
        ] {
            assert_eq!(out.exit_code, 0);
            let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
            assert!(v.get("command").is_some());
        }
    }

    #[test]
    fn fuzz_smoke() {
        let out = cmd_fuzz(1, 5, Format::Text);
        assert_eq!(out.exit_code, 0, "{}", out.stdout);
        let out = cmd_fuzz(1, 0, Format::Text);
        assert_eq!(out.exit_code, 0);
    }
}
