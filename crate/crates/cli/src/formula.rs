use clap::ValueEnum;
use serde::Serialize;
use valdef_core::formula::{
    bound_notes, delta0_membership, delta_gamma_membership, eval_bounded, p_antiregularity_sentence,
    p_regularity_sentence, Assignment, EvalConfig, EvalOutcome, OagFormula,
};
use valdef_core::oag::{is_prime, Element, Spine};

use crate::{input_error, to_json, Format};

#[derive(clap::Args, Debug)]
pub struct Args {
    kind: Kind,

    /// The prime of the formula
    #[arg(long, short)]
    prime: Option<u32>,

    /// Formula file (s-expression or JSON) for `--kind file`
    #[arg(long)]
    file: Option<std::path::PathBuf>,

    /// Print the formula as JSON instead of an s-expression
    #[arg(long)]
    json_ast: bool,

    /// Evaluate on this finite spine
    #[arg(long)]
    eval: Option<String>,

    /// Values of free variables, `name=<element JSON>`
    #[arg(long = "assign", value_parser = parse_assignment)]
    assign: Vec<(String, Element)>,

    /// Coordinate bound of the evaluation box
    #[arg(long, default_value_t = EvalConfig::default().radius)]
    radius: u32,

    #[arg(long, default_value_t = EvalConfig::default().denom_bound)]
    denom_bound: u32,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    PRegular,
    PAntiregular,
    Delta0,
    DeltaGamma,
    File,
}

fn parse_assignment(s: &str) -> Result<(String, Element), String> {
    let (name, value) = s.split_once('=').ok_or("expected name=<element>")?;
    let e: Element = serde_json::from_str(value).map_err(|e| e.to_string())?;
    Ok((name.to_string(), e))
}

#[derive(Serialize)]
struct FormulaReport {
    formula: String,
    free: Vec<String>,
    bounds: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    evaluation: Option<EvalOutcome>,
}

fn build(args: &Args) -> anyhow::Result<OagFormula> {
    let prime = || match args.prime {
        Some(p) if is_prime(p) => Ok(p),
        Some(p) => Err(input_error(format!("{p} is not a prime"))),
        None => Err(input_error("this formula needs --prime")),
    };
    Ok(match args.kind {
        Kind::PRegular => p_regularity_sentence(prime()?),
        Kind::PAntiregular => p_antiregularity_sentence(prime()?),
        Kind::Delta0 => delta0_membership(prime()?),
        Kind::DeltaGamma => delta_gamma_membership(prime()?),
        Kind::File => {
            let path = args.file.as_ref().ok_or_else(|| input_error("--kind file needs --file"))?;
            let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
            let parsed = if text.trim_start().starts_with('{') {
                OagFormula::from_json(&text)
            } else {
                OagFormula::from_sexpr(&text)
            };
            parsed.map_err(|e| input_error(format!("{}: {e}", path.display())))?
        }
    })
}

pub fn run(args: Args, format: Format) -> anyhow::Result<u8> {
    let f = build(&args)?;
    let evaluation = match &args.eval {
        None => None,
        Some(s) => {
            let g: Spine = s.parse().map_err(|e| input_error(format!("spine {s:?}: {e}")))?;
            let cfg = EvalConfig {
                radius: args.radius,
                denom_bound: args.denom_bound,
                ..EvalConfig::default()
            };
            let assignment: Assignment = args.assign.iter().cloned().collect();
            Some(eval_bounded(&f, &g, &cfg, &assignment).map_err(|e| input_error(e.to_string()))?)
        }
    };
    let r = FormulaReport {
        formula: if args.json_ast { f.to_json() } else { f.to_sexpr() },
        free: f.free.clone(),
        bounds: bound_notes(&f),
        evaluation,
    };
    match format {
        Format::Json => println!("{}", to_json(&r)),
        Format::Human => {
            println!("{}", r.formula);
            for b in &r.bounds {
                println!("; {b}");
            }
            if let Some(e) = &r.evaluation {
                let value = match e.definite() {
                    Some(v) => v.to_string(),
                    None => format!("undecided (in box: {})", e.in_box_value()),
                };
                println!("value: {value}");
                for step in e.trail() {
                    println!("  {step}");
                }
            }
        }
    }
    Ok(0)
}
