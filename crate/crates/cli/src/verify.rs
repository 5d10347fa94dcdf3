use std::path::PathBuf;

use serde::Serialize;
use valdef_core::replay::{Fixtures, Replay, SuiteResult, SUITES};
use valdef_core::valfield::Catalog;

use crate::{input_error, to_json, Format, EXIT_MISMATCH};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Run only this suite
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
    suite: Option<String>,

    /// Directory of tower fixtures overriding the built-in ones by file name
    #[arg(long)]
    fixtures: Option<PathBuf>,
}

#[derive(Serialize)]
struct Summary<'a> {
    passed: bool,
    checks: usize,
    failed: usize,
    suites: &'a [SuiteResult],
}

pub fn run(args: Args, catalog: Catalog, format: Format) -> anyhow::Result<u8> {
    let fixtures = match &args.fixtures {
        Some(dir) => Fixtures::with_dir(dir).map_err(|e| input_error(e.to_string()))?,
        None => Fixtures::builtin(),
    };
    let replay = Replay::new(catalog, fixtures);
    let results: Vec<SuiteResult> = match &args.suite {
        Some(s) => vec![replay.run(s).map_err(|e| input_error(e.to_string()))?],
        None => replay.run_all(),
    };
    let checks = results.iter().map(|r| r.checks.len()).sum();
    let failed = results.iter().map(|r| r.failures().count()).sum();
    match format {
        Format::Json => println!(
            "{}",
            to_json(&Summary {
                passed: failed == 0,
                checks,
                failed,
                suites: &results,
            })
        ),
        Format::Human => {
            let width = results.iter().map(|r| r.suite.len()).max().unwrap_or(0);
            for r in &results {
                let ok = r.checks.len() - r.failures().count();
                let status = if r.passed() { "PASS" } else { "FAIL" };
                println!("{status}  {:width$}  {ok}/{} checks", r.suite, r.checks.len());
                for c in r.failures() {
                    println!("      {}", c.name);
                    println!("        - expected: {}", c.expected);
                    println!("        + actual:   {}", c.actual);
                }
            }
            println!("{} of {checks} checks passed", checks - failed);
        }
    }
    Ok(if failed == 0 { 0 } else { EXIT_MISMATCH })
}
