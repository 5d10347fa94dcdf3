use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};
use valdef_core::oag::{self, Component, Element, Equivalence, Spine};
use valdef_core::oracle::{self, BoxSpec, BruteOutcome};

use crate::{input_error, to_json, Format};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Spine as JSON, e.g. '["Z", {"LeftRay": "Q"}]'
    spine: String,

    predicate: Predicate,

    /// Prime for the p-dependent predicates
    prime: Option<u32>,

    /// Parameter for delta-gamma, as JSON coordinates
    #[arg(long)]
    gamma: Option<String>,

    /// Second spine for `equiv`
    #[arg(long)]
    other: Option<String>,

    /// Largest denominator in the oracle box
    #[arg(long, default_value_t = 6)]
    denom_bound: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Predicate {
    Divisible,
    PDivisible,
    PRegular,
    Regular,
    PAntiregular,
    Antiregular,
    Rank1Quotient,
    Index,
    Delta0,
    DeltaGamma,
    ConvexSubgroups,
    MinimalPositive,
    Normalize,
    Equiv,
}

impl Predicate {
    fn needs_prime(self) -> bool {
        matches!(
            self,
            Predicate::PDivisible
                | Predicate::PRegular
                | Predicate::PAntiregular
                | Predicate::Index
                | Predicate::Delta0
                | Predicate::DeltaGamma
        )
    }
}

#[derive(Serialize)]
struct GroupResult {
    spine: Spine,
    predicate: Predicate,
    #[serde(skip_serializing_if = "Option::is_none")]
    prime: Option<u32>,
    structural: Value,
    /// Brute-force cross-check on a finite box, when available.
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<Value>,
}

fn parse_spine(s: &str) -> anyhow::Result<Spine> {
    s.parse().map_err(|e| input_error(format!("spine {s:?}: {e}")))
}

fn zq_finite(g: &Spine) -> bool {
    g.finite_components()
        .is_some_and(|cs| !cs.is_empty() && cs.iter().all(|c| matches!(c, Component::Z | Component::Q)))
}

fn brute(b: Result<BruteOutcome, oracle::OracleError>) -> Value {
    match b {
        Ok(BruteOutcome::TrueInBox) => json!("true-in-box"),
        Ok(BruteOutcome::Counterexample { elements }) => {
            json!({ "counterexample": elements.iter().map(|e| e.to_string()).collect::<Vec<_>>() })
        }
        Err(e) => json!({ "error": e.to_string() }),
    }
}

pub fn run(args: Args, format: Format) -> anyhow::Result<u8> {
    let g = parse_spine(&args.spine)?;
    // `antiregular 2` reads as the p-version
    let pred = match (args.predicate, args.prime) {
        (Predicate::Divisible, Some(_)) => Predicate::PDivisible,
        (Predicate::Regular, Some(_)) => Predicate::PRegular,
        (Predicate::Antiregular, Some(_)) => Predicate::PAntiregular,
        (pred, _) => pred,
    };
    let p = match (pred.needs_prime(), args.prime) {
        (true, None) => return Err(input_error(format!("{pred:?} needs a prime"))),
        (_, Some(p)) if !oag::is_prime(p) => return Err(input_error(format!("{p} is not a prime"))),
        (_, p) => p,
    };
    let prime = p.unwrap_or(2);
    let bx = BoxSpec::for_prime(prime, args.denom_bound);
    let checkable = zq_finite(&g);
    let (structural, oracle) = match pred {
        Predicate::Divisible => (json!(oag::is_divisible(&g)), None),
        Predicate::PDivisible => (
            json!(oag::is_p_divisible(&g, prime)),
            checkable.then(|| match oracle::bf_subgroup_p_divisible(&g, 0, prime, &bx) {
                Ok(b) => json!(b),
                Err(e) => json!({ "error": e.to_string() }),
            }),
        ),
        Predicate::PRegular => (
            json!(oag::is_p_regular(&g, prime)),
            checkable.then(|| brute(oracle::bf_is_p_regular(&g, prime, &bx))),
        ),
        Predicate::Regular => (json!(oag::is_regular(&g)), None),
        Predicate::PAntiregular => (
            json!(oag::is_p_antiregular(&g, prime)),
            checkable.then(|| brute(oracle::bf_is_p_antiregular(&g, prime, &bx))),
        ),
        Predicate::Antiregular => (json!(oag::is_antiregular(&g)), None),
        Predicate::Rank1Quotient => (json!(oag::has_rank1_quotient(&g)), None),
        Predicate::Index => (json!(oag::index_mod_p(&g, prime).to_string()), None),
        Predicate::Delta0 => {
            let cut = oag::delta0(&g, prime);
            let quotient = g.quotient_at(cut)?;
            (
                json!({ "cut": cut, "quotient": quotient.to_string() }),
                checkable.then(|| match oracle::bf_delta0(&g, prime, &bx) {
                    Ok(c) => json!({ "cut": c }),
                    Err(e) => json!({ "error": e.to_string() }),
                }),
            )
        }
        Predicate::DeltaGamma => {
            let text = args.gamma.as_deref().ok_or_else(|| input_error("delta-gamma needs --gamma"))?;
            let gamma: Element =
                serde_json::from_str(text).map_err(|e| input_error(format!("gamma {text:?}: {e}")))?;
            let cut = oag::delta_gamma(&g, prime, &gamma).map_err(|e| input_error(e.to_string()))?;
            (
                json!({ "cut": cut, "subgroup": g.subgroup_at(cut)?.to_string() }),
                checkable.then(|| {
                    match oracle::bf_delta_gamma_set(&g, prime, &gamma, &bx)
                        .and_then(|set| oracle::cut_index_of_set(&g, &set, &bx))
                    {
                        Ok(i) => json!({ "cut": oracle::bf_convex_subgroup_enum(&g).ok().and_then(|cs| cs.get(i).copied()) }),
                        Err(e) => json!({ "error": e.to_string() }),
                    }
                }),
            )
        }
        Predicate::ConvexSubgroups => {
            let cuts = g.finite_cuts().ok_or_else(|| input_error("infinitely many convex subgroups"))?;
            let listed: Vec<Value> = cuts
                .iter()
                .map(|c| json!({ "cut": c, "quotient": g.quotient_at(*c).map(|q| q.to_string()).unwrap_or_default() }))
                .collect();
            (
                json!(listed),
                checkable.then(|| match oracle::bf_convex_subgroup_enum(&g) {
                    Ok(cs) => json!(cs.len()),
                    Err(e) => json!({ "error": e.to_string() }),
                }),
            )
        }
        Predicate::MinimalPositive => (json!(oag::has_minimal_positive(&g)), None),
        Predicate::Normalize => (json!(oag::equiv_normalize(&g).to_string()), None),
        Predicate::Equiv => {
            let other = parse_spine(args.other.as_deref().ok_or_else(|| input_error("equiv needs --other"))?)?;
            let e = match oag::maybe_equiv(&g, &other) {
                Equivalence::Equivalent => "equivalent",
                Equivalence::Distinct => "distinct",
                Equivalence::Unknown => "unknown",
            };
            (json!(e), None)
        }
    };
    let r = GroupResult {
        spine: g,
        predicate: pred,
        prime: p,
        structural,
        oracle,
    };
    match format {
        Format::Json => println!("{}", to_json(&r)),
        Format::Human => {
            let at = r.prime.map(|p| format!(" at p = {p}")).unwrap_or_default();
            println!("{} {:?}{at}: {}", r.spine, r.predicate, r.structural);
            if let Some(o) = &r.oracle {
                println!("oracle (in box): {o}");
            }
        }
    }
    Ok(0)
}
