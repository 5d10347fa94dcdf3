use valdef_core::oag::is_prime;
use valdef_core::oracle::{agreement_suite, SuiteConfig};

use crate::{input_error, to_json, Format, EXIT_MISMATCH};

#[derive(clap::Args, Debug)]
pub struct Args {
    #[arg(long, default_value_t = SuiteConfig::default().cases)]
    cases: usize,

    #[arg(long, default_value_t = SuiteConfig::default().max_rank)]
    max_rank: usize,

    #[arg(long, value_delimiter = ',', default_values_t = SuiteConfig::default().primes)]
    primes: Vec<u32>,

    #[arg(long, default_value_t = SuiteConfig::default().denom_bound)]
    denom_bound: u32,

    #[arg(long, default_value_t = SuiteConfig::default().seed)]
    seed: u64,
}

pub fn run(args: Args, format: Format) -> anyhow::Result<u8> {
    if let Some(p) = args.primes.iter().find(|p| !is_prime(**p)) {
        return Err(input_error(format!("{p} is not a prime")));
    }
    if args.primes.is_empty() || args.max_rank == 0 {
        return Err(input_error("need at least one prime and rank"));
    }
    let cfg = SuiteConfig {
        cases: args.cases,
        max_rank: args.max_rank,
        primes: args.primes,
        denom_bound: args.denom_bound,
        seed: args.seed,
    };
    let r = agreement_suite(&cfg);
    match format {
        Format::Json => println!("{}", to_json(&r)),
        Format::Human => {
            println!("cases: {}, agreements: {}", r.cases, r.agreements);
            println!("disagreements: {}", r.disagreements.len());
            for d in &r.disagreements {
                println!("  #{} {} p = {} gamma = {}: {} structural {} oracle {}", d.case, d.spine, d.p, d.gamma, d.check, d.structural, d.oracle);
            }
            println!("contract violations: {}", r.contract_violations.len());
            for d in &r.contract_violations {
                println!("  #{} {} p = {}: {}", d.case, d.spine, d.p, d.check);
            }
            println!(
                "least-subgroup formula set: {} match, {} differ",
                r.delta0_formula_matches, r.delta0_formula_mismatches
            );
            for e in &r.errors {
                println!("error: {e}");
            }
        }
    }
    Ok(if r.passed() { 0 } else { EXIT_MISMATCH })
}
