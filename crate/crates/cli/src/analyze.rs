use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use valdef_core::decide::{self, Outcome, PrimeAnalysis, Verdict, DEFAULT_PRIMES};
use valdef_core::oag::{self, is_prime, Spine};
use valdef_core::valfield::{composed_spine, henselian_valuations, residue_at, value_group_at, Catalog, Tower, TowerFile};

use crate::{emit, input_error, to_json, Format, EXIT_INCONCLUSIVE};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Tower files, or inline tower JSON starting with `{`
    #[arg(required = true)]
    towers: Vec<String>,

    /// Primes for the per-prime analyses, comma separated
    #[arg(long, value_delimiter = ',', conflicts_with = "all_primes_structural")]
    primes: Option<Vec<u32>>,

    /// Use one representative prime per component kind instead of a sample
    #[arg(long)]
    all_primes_structural: bool,

    /// Parameter-free criterion
    #[arg(long)]
    thm_a: bool,

    /// One-parameter criterion
    #[arg(long)]
    thm_b: bool,

    /// Equicharacteristic-zero criterion
    #[arg(long)]
    cor00: bool,

    /// Tame-branching analyses per prime
    #[arg(long)]
    tame: bool,

    /// Verdicts for each henselian valuation (finite spines only)
    #[arg(long)]
    valuations: bool,

    /// Group predicates of the composed value group
    #[arg(long)]
    group: bool,

    /// Write the report here instead of stdout
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug)]
struct Selection {
    thm_a: bool,
    thm_b: bool,
    cor00: bool,
    tame: bool,
    valuations: bool,
    group: bool,
}

impl Selection {
    fn from(a: &Args) -> Self {
        let s = Selection {
            thm_a: a.thm_a,
            thm_b: a.thm_b,
            cor00: a.cor00,
            tame: a.tame,
            valuations: a.valuations,
            group: a.group,
        };
        if a.thm_a || a.thm_b || a.cor00 || a.tame || a.valuations || a.group {
            s
        } else {
            Selection {
                thm_a: true,
                thm_b: true,
                cor00: true,
                tame: true,
                valuations: true,
                group: true,
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub source: String,
    pub tower: String,
    pub primes: Vec<u32>,
    /// The most informative verdict among the selected analyses.
    pub verdict: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict_from: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thm_a: Option<Outcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thm_b: Option<Outcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cor00: Option<Outcome>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tame: Vec<PrimeAnalysis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valuations: Option<Result<Vec<ValuationEntry>, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSummary>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationEntry {
    pub valuation: String,
    pub value_group: String,
    pub residue: String,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub spine: Spine,
    pub divisible: bool,
    pub regular: bool,
    pub antiregular: bool,
    pub rank1_quotient: bool,
    pub per_prime: Vec<PrimePredicates>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePredicates {
    pub prime: u32,
    pub p_divisible: bool,
    pub p_regular: bool,
    pub p_antiregular: bool,
    pub index_mod_p: String,
}

fn outcome(r: decide::Result<Verdict>) -> Outcome {
    match r {
        Ok(v) => Outcome::Verdict(v),
        Err(e) => Outcome::Error(e.to_string()),
    }
}

fn load(source: &str, catalog: &Catalog) -> anyhow::Result<Tower> {
    let (label, text) = if source.trim_start().starts_with('{') {
        ("inline tower".to_string(), source.to_string())
    } else {
        let text = std::fs::read_to_string(source).map_err(|e| input_error(format!("{source}: {e}")))?;
        (source.to_string(), text)
    };
    let file: TowerFile = serde_json::from_str(&text).map_err(|e| input_error(format!("{label}: {e}")))?;
    file.resolve(catalog).map_err(|e| input_error(format!("{label}: {e}")))
}

/// One prime per component kind, plus the primes the base annotates.
fn structural_primes(t: &Tower) -> Vec<u32> {
    let mut ps: Vec<u32> = composed_spine(t).representative_primes();
    for g in &t.extensions {
        ps.extend(g.representative_primes());
    }
    ps.extend(t.base.primes.keys().chain(t.base.canonical_p.keys()));
    if let Some(c) = &t.base.canonical {
        ps.extend(c.spine.representative_primes());
    }
    ps.sort();
    ps.dedup();
    ps
}

fn group_summary(g: Spine, primes: &[u32]) -> GroupSummary {
    GroupSummary {
        divisible: oag::is_divisible(&g),
        regular: oag::is_regular(&g),
        antiregular: oag::is_antiregular(&g),
        rank1_quotient: oag::has_rank1_quotient(&g),
        per_prime: primes
            .iter()
            .map(|&p| PrimePredicates {
                prime: p,
                p_divisible: oag::is_p_divisible(&g, p),
                p_regular: oag::is_p_regular(&g, p),
                p_antiregular: oag::is_p_antiregular(&g, p),
                index_mod_p: oag::index_mod_p(&g, p).to_string(),
            })
            .collect(),
        spine: g,
    }
}

fn valuations(t: &Tower) -> Result<Vec<ValuationEntry>, String> {
    let vs = henselian_valuations(t).map_err(|e| e.to_string())?;
    Ok(vs
        .iter()
        .filter_map(|v| {
            let g = value_group_at(t, v).ok()?;
            if g.is_trivial() {
                return None;
            }
            Some(ValuationEntry {
                valuation: v.to_string(),
                value_group: g.to_string(),
                residue: residue_at(t, v).map_or_else(|e| format!("unknown ({e})"), |r| r.describe()),
                outcome: outcome(decide::valuation_verdict(t, v)),
            })
        })
        .collect())
}

fn report(source: &str, t: &Tower, primes: &[u32], sel: Selection) -> Report {
    let a = decide::analyze(t, primes);
    let keep = |on: bool, o: Outcome| on.then_some(o);
    let mut r = Report {
        source: source.to_string(),
        tower: a.tower.clone(),
        primes: primes.to_vec(),
        verdict: None,
        verdict_from: None,
        thm_a: keep(sel.thm_a, a.thm_a),
        thm_b: keep(sel.thm_b, a.thm_b),
        cor00: keep(sel.cor00, a.cor_00),
        tame: if sel.tame { a.primes } else { Vec::new() },
        valuations: sel.valuations.then(|| valuations(t)),
        group: sel.group.then(|| group_summary(composed_spine(t), primes)),
    };
    let mut candidates: Vec<(String, &Outcome)> = Vec::new();
    candidates.extend(r.cor00.as_ref().map(|o| ("equicharacteristic-zero criterion".to_string(), o)));
    candidates.extend(r.thm_b.as_ref().map(|o| ("one-parameter criterion".to_string(), o)));
    candidates.extend(r.thm_a.as_ref().map(|o| ("parameter-free criterion".to_string(), o)));
    for pa in &r.tame {
        candidates.push((format!("henselian tame criterion at {}", pa.prime), &pa.tb));
        candidates.push((format!("p-henselian tame criterion at {}", pa.prime), &pa.ptame));
    }
    let verdicts: Vec<(String, &Verdict)> =
        candidates.into_iter().filter_map(|(n, o)| o.verdict().map(|v| (n, v))).collect();
    let best = verdicts
        .iter()
        .find(|(_, v)| !v.is_inconclusive())
        .or_else(|| verdicts.first())
        .map(|(n, v)| (n.clone(), (*v).clone()));
    if let Some((from, v)) = best {
        r.verdict = Some(v);
        r.verdict_from = Some(from);
    }
    r
}

impl Report {
    pub fn exit_code(&self) -> u8 {
        match &self.verdict {
            Some(v) if !v.is_inconclusive() => 0,
            _ => EXIT_INCONCLUSIVE,
        }
    }

    pub fn human(&self) -> String {
        let mut s = String::new();
        let indent = |o: &Outcome| o.to_string().replace('\n', "\n  ");
        let _ = writeln!(s, "== {}", self.source);
        let _ = writeln!(s, "tower: {}", self.tower);
        match (&self.verdict, &self.verdict_from) {
            (Some(v), Some(from)) => {
                let _ = writeln!(s, "verdict ({from}): {}", v.to_string().replace('\n', "\n  "));
            }
            _ => {
                let _ = writeln!(s, "verdict: none");
            }
        }
        for (name, o) in [
            ("parameter-free criterion", &self.thm_a),
            ("one-parameter criterion", &self.thm_b),
            ("equicharacteristic-zero criterion", &self.cor00),
        ] {
            if let Some(o) = o {
                let _ = writeln!(s, "{name}: {}", indent(o));
            }
        }
        for pa in &self.tame {
            let _ = writeln!(s, "p = {}:", pa.prime);
            if let Some(r) = &pa.canonical_tame {
                let _ = writeln!(
                    s,
                    "  canonical valuation tamely branching: {} (index {})",
                    r.tamely_branching, r.index_mod_p
                );
            }
            let _ = writeln!(s, "  p-henselian tame: {}", indent(&pa.ptame).replace('\n', "\n  "));
            let _ = writeln!(s, "  henselian tame: {}", indent(&pa.tb).replace('\n', "\n  "));
            for a in &pa.annotations {
                let _ = writeln!(s, "  annotation: {a}");
            }
        }
        match &self.valuations {
            Some(Ok(vs)) => {
                let _ = writeln!(s, "henselian valuations: {}", vs.len());
                for v in vs {
                    let _ = writeln!(s, "  {} (value group {}, residue {})", v.valuation, v.value_group, v.residue);
                    let _ = writeln!(s, "    {}", v.outcome.to_string().replace('\n', "\n    "));
                }
            }
            Some(Err(e)) => {
                let _ = writeln!(s, "henselian valuations: {e}");
            }
            None => {}
        }
        if let Some(g) = &self.group {
            let _ = writeln!(
                s,
                "value group {}: divisible {}, regular {}, antiregular {}, rank-1 quotient {}",
                g.spine, g.divisible, g.regular, g.antiregular, g.rank1_quotient
            );
            for p in &g.per_prime {
                let _ = writeln!(
                    s,
                    "  p = {}: p-divisible {}, p-regular {}, p-antiregular {}, index {}",
                    p.prime, p.p_divisible, p.p_regular, p.p_antiregular, p.index_mod_p
                );
            }
        }
        s
    }
}

pub fn run(args: Args, catalog: &Catalog, format: Format) -> anyhow::Result<u8> {
    let sel = Selection::from(&args);
    if let Some(ps) = &args.primes {
        if let Some(p) = ps.iter().find(|p| !is_prime(**p)) {
            return Err(input_error(format!("{p} is not a prime")));
        }
    }
    let towers = args
        .towers
        .iter()
        .map(|s| load(s, catalog).map(|t| (s.as_str(), t)))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let reports: Vec<Report> = towers
        .par_iter()
        .map(|(src, t)| {
            let primes = match (&args.primes, args.all_primes_structural) {
                (_, true) => structural_primes(t),
                (Some(ps), _) => ps.clone(),
                (None, false) => DEFAULT_PRIMES.to_vec(),
            };
            report(src, t, &primes, sel)
        })
        .collect();
    let code = reports.iter().map(Report::exit_code).max().unwrap_or(0);
    let text = match format {
        Format::Json if reports.len() == 1 => to_json(&reports[0]),
        Format::Json => to_json(&reports),
        Format::Human => reports.iter().map(Report::human).collect::<Vec<_>>().join("\n"),
    };
    emit(&text, args.output.as_deref())?;
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tower(json: &str) -> Tower {
        load(json, &Catalog::builtin()).unwrap()
    }

    #[test]
    fn structural_primes_cover_component_kinds() {
        let t = tower(r#"{"base": "R", "extensions": [["Q", {"ZLoc": 5}]]}"#);
        assert_eq!(structural_primes(&t), vec![2, 5]);
    }

    #[test]
    fn report_round_trips_through_json() {
        let t = tower(r#"{"base": "R", "extensions": [["Q"], ["Z"]]}"#);
        let all = Selection::from(&Args {
            towers: vec![],
            primes: None,
            all_primes_structural: false,
            thm_a: false,
            thm_b: false,
            cor00: false,
            tame: false,
            valuations: false,
            group: false,
            output: None,
        });
        let r = report("inline", &t, &DEFAULT_PRIMES, all);
        let back: Report = serde_json::from_str(&to_json(&r)).unwrap();
        assert_eq!(back, r);
        assert_eq!(r.exit_code(), 0);
        assert!(r.human().contains(&r.verdict.as_ref().unwrap().to_string().replace('\n', "\n  ")));
    }
}
