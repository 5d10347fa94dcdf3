//! The eight acceptance criteria, one PASS/FAIL line each.

use std::process::ExitCode;
use std::time::Instant;

use valdef_core::decide::{thm_a, Level, Route};
use valdef_core::oracle::{BoxSpec, SuiteConfig};
use valdef_core::replay::{Replay, SuiteResult};
use valdef_core::valfield::{Catalog, Tower};
use valdef_core::Cut;

struct Criterion {
    id: u8,
    title: &'static str,
    suite: &'static str,
    /// Checks made here in addition to the replay suite.
    extra: fn() -> Vec<String>,
}

fn none() -> Vec<String> {
    Vec::new()
}

fn example_two_extra() -> Vec<String> {
    let cat = Catalog::builtin();
    let t = Tower::new(
        cat.get("R").unwrap().clone(),
        vec![r#"["Q"]"#.parse().unwrap(), r#"["Z"]"#.parse().unwrap()],
    );
    match thm_a(&t) {
        Ok(v) if v.level == Level::EmptysetDefinable
            && v.route == Some(Route::HongRank1)
            && v.witness_cut == Some(Cut::AtBoundary(1)) => Vec::new(),
        other => vec![format!("tower verdict: {other:?}")],
    }
}

fn oracle_config_extra() -> Vec<String> {
    let cfg = SuiteConfig::default();
    let mut out = Vec::new();
    if cfg.cases < 200 || cfg.max_rank != 4 || cfg.primes != [2, 3, 5] || cfg.denom_bound != 6 {
        out.push(format!("suite configuration {cfg:?}"));
    }
    for p in &cfg.primes {
        if BoxSpec::for_prime(*p, cfg.denom_bound).radius != 2 * p + 2 {
            out.push(format!("box radius at {p}"));
        }
    }
    out
}

const CRITERIA: [Criterion; 8] = [
    Criterion { id: 1, title: "example two: valuations, verdicts, equivalence", suite: "example_two", extra: example_two_extra },
    Criterion { id: 2, title: "antiregular groups", suite: "antiregular", extra: none },
    Criterion { id: 3, title: "PZ((Q)) parameter-free via the smallest subgroup", suite: "pz_q", extra: none },
    Criterion { id: 4, title: "FJ((Q)) not definable", suite: "fj_q", extra: none },
    Criterion { id: 5, title: "PZ elementary extension: one parameter, tame", suite: "pz_l", extra: none },
    Criterion { id: 6, title: "oracle agreement on random spines", suite: "oracle_agreement", extra: oracle_config_extra },
    Criterion { id: 7, title: "subgroup contracts on random spines", suite: "lemma_contracts", extra: none },
    Criterion { id: 8, title: "verdict monotonicity, witnesses, no guesses", suite: "verdict_properties", extra: none },
];

fn main() -> ExitCode {
    let replay = Replay::builtin();
    let start = Instant::now();
    let mut failed = 0;
    for c in &CRITERIA {
        let t = Instant::now();
        let result: SuiteResult = replay.run(c.suite).expect("known suite");
        let extra = (c.extra)();
        let ok = result.passed() && extra.is_empty();
        println!(
            "{} criterion {}: {} ({} checks, {:.2?})",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            result.checks.len(),
            t.elapsed()
        );
        for f in result.failures() {
            println!("    {}: expected {}, got {}", f.name, f.expected, f.actual);
        }
        for e in &extra {
            println!("    {e}");
        }
        if !ok {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed in {:.2?}", CRITERIA.len() - failed, CRITERIA.len(), start.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
