//! Extended differential campaign (not part of the test suite).
use delite::corpus::{run_differential, satisfiability_check, random_dkb, GenConfig};
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let mut total = 0usize;
    let configs = [
        ("default", GenConfig::default()),
        ("no-exists", GenConfig { existentials: false, ..GenConfig::default() }),
        ("heavy-def", GenConfig { defeasible_ratio: 0.75, assertions: 6, ..GenConfig::default() }),
        ("tiny", GenConfig { concepts: 2, roles: 1, individuals: 2, axioms: 4, assertions: 3, ..GenConfig::default() }),
        ("inv-def", GenConfig { oracle_safe_defeasible: false, ..GenConfig::default() }),
        ("many-assert", GenConfig { assertions: 8, axioms: 4, ..GenConfig::default() }),
    ];
    for (name, cfg) in &configs {
        let (stats, mismatch) = run_differential(123_000, 3000, cfg);
        println!(
            "{name}: compared {} (unsafe {}, incoherent {}, budget {}) [{:?}]",
            stats.compared, stats.skipped_unsafe, stats.skipped_incoherent,
            stats.skipped_budget, t0.elapsed()
        );
        total += stats.compared;
        if let Some(m) = mismatch {
            println!("MISMATCH seed {}: {}\n{}", m.seed, m.detail, m.dkb_text);
            std::process::exit(1);
        }
    }
    for seed in 900_000..906_000u64 {
        let k = random_dkb(seed, &GenConfig::default());
        if let Err(e) = satisfiability_check(&k) {
            println!("SAT MISMATCH seed {seed}: {e}\n{}", delite::dkbtext::serialize_dkb(&k));
            std::process::exit(1);
        }
    }
    println!("stress clean: {total} differential inputs + 6000 sat checks in {:?}", t0.elapsed());
}
