//! Replays the worked examples and property suites as named checks.
//!
//! Every suite yields a list of [`Check`]s comparing an expected rendering
//! with the computed one, so a failure always comes with a readable diff.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decide::{
    self, check_verdict, cor_00, is_tamely_branching, prop_ptame, prop_tb, thm_a, thm_b, valuation_verdict, Level, Verdict, DEFAULT_PRIMES,
};
use crate::oag::{self, Component, Cut, Segment, Spine};
use crate::oracle::{agreement_suite, SuiteConfig, SuiteReport};
use crate::valfield::{
    henselian_valuations, BaseField, Catalog, Flag, Refinement, Tower, TowerFile, ValuationRef,
};

pub const SUITES: [&str; 9] = [
    "example_two",
    "antiregular",
    "pz_q",
    "fj_q",
    "pz_l",
    "tame_cases",
    "oracle_agreement",
    "lemma_contracts",
    "verdict_properties",
];

const BUILTIN_TOWERS: [(&str, &str); 7] = [
    ("example_two", include_str!("../data/towers/example_two.json")),
    ("pz_q", include_str!("../data/towers/pz_q.json")),
    ("fj_q", include_str!("../data/towers/fj_q.json")),
    ("pz_l", include_str!("../data/towers/pz_l.json")),
    ("ptame_residue_closed", include_str!("../data/towers/ptame_residue_closed.json")),
    ("ptame_residue_char", include_str!("../data/towers/ptame_residue_char.json")),
    ("ptame_mixed", include_str!("../data/towers/ptame_mixed.json")),
];

/// Seed of the random towers in `verdict_properties`.
pub const TOWER_SEED: u64 = 0x70_3e5;
pub const RANDOM_TOWERS: usize = 50;

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
}

impl Check {
    fn new(name: impl Into<String>, expected: impl ToString, actual: impl ToString) -> Self {
        Check {
            name: name.into(),
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }

    pub fn passed(&self) -> bool {
        self.expected == self.actual
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

/// Tower fixtures by name, as raw JSON so that a broken file becomes a
/// failed check instead of an aborted run.
#[derive(Clone, Debug)]
pub struct Fixtures(BTreeMap<String, String>);

impl Fixtures {
    pub fn builtin() -> Self {
        Fixtures(BUILTIN_TOWERS.iter().map(|(n, s)| (n.to_string(), s.to_string())).collect())
    }

    /// The builtin fixtures, overridden by every `*.json` file in `dir`.
    pub fn with_dir(dir: &Path) -> Result<Self, ReplayError> {
        let io = |source| ReplayError::Io {
            path: dir.display().to_string(),
            source,
        };
        let mut f = Fixtures::builtin();
        for entry in std::fs::read_dir(dir).map_err(io)? {
            let path = entry.map_err(io)?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let Some(name) = path.file_stem().and_then(|s| s.to_str()) else { continue };
            let text = std::fs::read_to_string(&path).map_err(|source| ReplayError::Io {
                path: path.display().to_string(),
                source,
            })?;
            f.0.insert(name.to_string(), text);
        }
        Ok(f)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn tower(&self, name: &str, catalog: &Catalog) -> Result<Tower, String> {
        let text = self.0.get(name).ok_or_else(|| format!("missing fixture {name}"))?;
        let file: TowerFile = serde_json::from_str(text).map_err(|e| format!("{name}: {e}"))?;
        file.resolve(catalog).map_err(|e| format!("{name}: {e}"))
    }
}

pub struct Replay {
    catalog: Catalog,
    fixtures: Fixtures,
    oracle: OnceLock<SuiteReport>,
}

impl Replay {
    pub fn new(catalog: Catalog, fixtures: Fixtures) -> Self {
        Replay {
            catalog,
            fixtures,
            oracle: OnceLock::new(),
        }
    }

    pub fn builtin() -> Self {
        Replay::new(Catalog::builtin(), Fixtures::builtin())
    }

    pub fn run(&self, suite: &str) -> Result<SuiteResult, ReplayError> {
        let checks = match suite {
            "example_two" => self.with_tower("example_two", example_two),
            "antiregular" => antiregular(),
            "pz_q" => self.with_tower("pz_q", pz_q),
            "fj_q" => self.with_tower("fj_q", fj_q),
            "pz_l" => self.with_tower("pz_l", pz_l),
            "tame_cases" => self.tame_cases(),
            "oracle_agreement" => oracle_agreement(self.oracle()),
            "lemma_contracts" => lemma_contracts(self.oracle()),
            "verdict_properties" => self.verdict_properties(),
            other => return Err(ReplayError::UnknownSuite(other.to_string())),
        };
        Ok(SuiteResult {
            suite: suite.to_string(),
            checks,
        })
    }

    pub fn run_all(&self) -> Vec<SuiteResult> {
        SUITES.iter().map(|s| self.run(s).expect("known suite")).collect()
    }

    pub fn oracle(&self) -> &SuiteReport {
        self.oracle.get_or_init(|| agreement_suite(&SuiteConfig::default()))
    }

    fn with_tower(&self, name: &str, f: fn(&Tower) -> Vec<Check>) -> Vec<Check> {
        match self.fixtures.tower(name, &self.catalog) {
            Ok(t) => f(&t),
            Err(e) => vec![Check::new(format!("{name} loads"), "ok", e)],
        }
    }

    fn tame_cases(&self) -> Vec<Check> {
        let cases = [
            ("ptame_residue_closed", 2, "PtameCase1 at Bottom"),
            ("ptame_residue_char", 2, "PtameCase2"),
            ("ptame_mixed", 3, "PtameCase3 at AtBoundary(1)"),
        ];
        cases
            .iter()
            .map(|&(name, p, expected)| {
                let actual = self.fixtures.tower(name, &self.catalog).and_then(|t| {
                    let v = prop_ptame(&t, p).map_err(|e| e.to_string())?;
                    let route = route_name(&v);
                    Ok(match v.witness_cut {
                        Some(c) if expected.contains(" at ") => format!("{route} at {c:?}"),
                        _ => route,
                    })
                });
                Check::new(format!("{name} p-henselian tame route (p = {p})"), expected, flatten(actual))
            })
            .collect()
    }

    fn verdict_properties(&self) -> Vec<Check> {
        let mut towers = fixture_towers(&self.catalog);
        towers.extend(self.fixtures.names().filter_map(|n| self.fixtures.tower(n, &self.catalog).ok()));
        let mut rng = ChaCha8Rng::seed_from_u64(TOWER_SEED);
        let bases: Vec<&BaseField> = self.catalog.fields().collect();
        let random: Vec<Tower> = (0..RANDOM_TOWERS).map(|_| random_tower(&mut rng, &bases)).collect();
        towers.extend(random.iter().cloned());

        let mut witness = Vec::new();
        let mut monotone = Vec::new();
        let mut agreement = Vec::new();
        for t in &towers {
            let a = decide::analyze(t, &DEFAULT_PRIMES);
            let mut all: Vec<&Verdict> = [&a.thm_a, &a.thm_b, &a.cor_00].into_iter().filter_map(|o| o.verdict()).collect();
            for pa in &a.primes {
                all.extend(pa.ptame.verdict());
                all.extend(pa.tb.verdict());
            }
            for v in all {
                if let Err(e) = check_verdict(t, v) {
                    witness.push(format!("{t}: {e}"));
                }
            }
            if let (Some(va), Some(vb)) = (a.thm_a.verdict(), a.thm_b.verdict()) {
                if va.level == Level::EmptysetDefinable && vb.level.strength() < va.level.strength() {
                    monotone.push(format!("{t}: {} then {}", va.level, vb.level));
                }
            }
            if let (Some(vc), Some(vb)) = (a.cor_00.verdict(), a.thm_b.verdict()) {
                if vc.level.is_positive() && vc.level != vb.level {
                    agreement.push(format!("{t}: {} against {}", vc.level, vb.level));
                }
            }
        }

        let mut guesses = Vec::new();
        let mut blanked = 0;
        for t in &random {
            let (b, completions) = blank_flags(&mut rng, t);
            if completions.is_empty() {
                continue;
            }
            blanked += 1;
            guesses.extend(guess_violations(&b, &completions));
        }
        let unknown = Tower::base_only(BaseField::unknown("K", 0)).extend(Spine::finite(&[Component::Z]));
        let unknown_ok = [thm_a(&unknown), thm_b(&unknown), cor_00(&unknown)]
            .into_iter()
            .all(|r| matches!(r, Ok(v) if v.is_inconclusive()));

        vec![
            Check::new("random towers", RANDOM_TOWERS, random.len()),
            Check::new("witness and route soundness", "no violations", violations(&witness)),
            Check::new("parameter-free implies one-parameter", "no violations", violations(&monotone)),
            Check::new("equicharacteristic-zero agreement", "no violations", violations(&agreement)),
            Check::new(
                format!("no definitive verdict depends on an unknown flag ({blanked} blanked towers)"),
                "no violations",
                violations(&guesses),
            ),
            Check::new("fully unknown base is inconclusive", true, unknown_ok),
        ]
    }
}

fn flatten(r: Result<String, String>) -> String {
    r.unwrap_or_else(|e| format!("error: {e}"))
}

fn route_name(v: &Verdict) -> String {
    v.route.map_or_else(|| "none".to_string(), |r| format!("{r:?}"))
}

fn level_route(r: &decide::Result<Verdict>) -> String {
    match r {
        Ok(v) => format!("{} via {}", v.level, route_name(v)),
        Err(e) => format!("error: {e}"),
    }
}

fn violations(v: &[String]) -> String {
    match v.first() {
        None => "no violations".into(),
        Some(first) => format!("{} violations, first: {first}", v.len()),
    }
}

fn sp(s: &str) -> Spine {
    s.parse().expect("literal spine")
}

fn example_two(t: &Tower) -> Vec<Check> {
    let found = henselian_valuations(t).map(|vs| {
        vs.iter()
            .filter(|v| crate::valfield::value_group_at(t, v).is_ok_and(|g| !g.is_trivial()))
            .count()
    });
    let v1 = ValuationRef::new(Cut::AtBoundary(1), Refinement::None);
    let v1_group = crate::valfield::value_group_at(t, &v1).map(|g| g.to_string());
    let v1_residue = crate::valfield::residue_at(t, &v1).map(|r| r.describe());
    vec![
        Check::new(
            "nontrivial henselian valuations",
            2,
            found.map_or_else(|e| format!("error: {e}"), |n| n.to_string()),
        ),
        Check::new(
            "v1 value group, residue and verdict",
            "[Z] over R((Q)): EmptysetDefinable via HongRank1",
            format!(
                "{} over {}: {}",
                flatten(v1_group.map_err(|e| e.to_string())),
                flatten(v1_residue.map_err(|e| e.to_string())),
                level_route(&valuation_verdict(t, &v1))
            ),
        ),
        Check::new(
            "v2 verdict",
            "NotDefinable via RealClosedResidueCoarsest",
            level_route(&valuation_verdict(t, &ValuationRef::composition())),
        ),
        Check::new(
            "[Z, Q, Q] against [Z, Q]",
            "Equivalent",
            format!("{:?}", oag::maybe_equiv(&sp(r#"["Z", "Q", "Q"]"#), &sp(r#"["Z", "Q"]"#))),
        ),
    ]
}

fn antiregular() -> Vec<Check> {
    let bi = Spine::new(vec![Segment::BiInfinite(Component::Z)]).expect("spine");
    let left = Spine::new(vec![Segment::LeftRay(Component::Z)]).expect("spine");
    let mut checks = Vec::new();
    for (name, g) in [("BiInfinite(Z)", &bi), ("LeftRay(Z)", &left)] {
        for p in DEFAULT_PRIMES {
            checks.push(Check::new(format!("{name} is {p}-antiregular"), true, oag::is_p_antiregular(g, p)));
            checks.push(Check::new(
                format!("{name} index modulo {p}"),
                "infinite",
                if oag::index_mod_p(g, p).is_infinite() { "infinite".into() } else { oag::index_mod_p(g, p).to_string() },
            ));
        }
        checks.push(Check::new(format!("{name} is antiregular"), true, oag::is_antiregular(g)));
        checks.push(Check::new(format!("{name} has a rank-1 quotient"), false, oag::has_rank1_quotient(g)));
    }
    checks.push(Check::new(
        "minimal positive element",
        "BiInfinite(Z): false, LeftRay(Z): true",
        format!(
            "BiInfinite(Z): {}, LeftRay(Z): {}",
            oag::has_minimal_positive(&bi),
            oag::has_minimal_positive(&left)
        ),
    ));
    checks.push(Check::new("BiInfinite(Z) against LeftRay(Z)", "Distinct", format!("{:?}", oag::maybe_equiv(&bi, &left))));
    checks
}

fn pz_q(t: &Tower) -> Vec<Check> {
    let v = thm_a(t);
    let mut checks = vec![Check::new("parameter-free verdict", "EmptysetDefinable", v.as_ref().map_or_else(|e| format!("error: {e}"), |v| v.level.to_string()))];
    let Some(w) = v.ok().and_then(|v| v.witness) else {
        checks.push(Check::new("witness", "present", "missing"));
        return checks;
    };
    let expected_spine = sp(r#"["Q", {"LeftRay": "Z"}]"#);
    checks.push(Check::new("witness spine", &expected_spine, &w.spine));
    checks.push(Check::new("witness cut", "AtBoundary(1)", format!("{:?}", w.valuation.cut)));
    checks.push(Check::new("witness value group", "[Q]", &w.value_group));
    for p in DEFAULT_PRIMES {
        let d0 = oag::delta0(&w.spine, p);
        let q = w.spine.quotient_at(d0).map(|q| oag::is_p_divisible(&q, p));
        checks.push(Check::new(
            format!("smallest subgroup with {p}-divisible quotient"),
            "AtBoundary(1), divisible quotient",
            match q {
                Ok(true) => format!("{d0:?}, divisible quotient"),
                Ok(false) => format!("{d0:?}, non-divisible quotient"),
                Err(e) => format!("error: {e}"),
            },
        ));
    }
    checks
}

fn fj_q(t: &Tower) -> Vec<Check> {
    vec![Check::new(
        "equicharacteristic-zero verdict",
        "NotDefinable via EquicharZeroNegative",
        level_route(&cor_00(t)),
    )]
}

fn pz_l(t: &Tower) -> Vec<Check> {
    let v = ValuationRef::new(Cut::Bottom, Refinement::BaseCanonical);
    let mut checks = Vec::new();
    for p in DEFAULT_PRIMES {
        let tame = match is_tamely_branching(t, &v, p) {
            Ok(r) => format!("tamely branching {}, index {}", r.tamely_branching, r.index_mod_p),
            Err(e) => format!("error: {e}"),
        };
        let infinite = oag::GroupIndex::Infinite.to_string();
        checks.push(Check::new(format!("canonical valuation at {p}"), format!("tamely branching true, index {infinite}"), tame));
        checks.push(Check::new(
            format!("henselian tame verdict at {p}"),
            "ParamDefinable(1) via TbDeltaGamma",
            level_route(&prop_tb(t, p)),
        ));
    }
    let mut emptyset: Vec<String> = [("parameter-free", thm_a(t)), ("one-parameter", thm_b(t))]
        .into_iter()
        .filter(|(_, r)| matches!(r, Ok(v) if v.level == Level::EmptysetDefinable))
        .map(|(n, _)| n.to_string())
        .collect();
    for p in DEFAULT_PRIMES {
        for (n, r) in [("p-henselian tame", prop_ptame(t, p)), ("henselian tame", prop_tb(t, p))] {
            if matches!(r, Ok(v) if v.level == Level::EmptysetDefinable) {
                emptyset.push(format!("{n} at {p}"));
            }
        }
    }
    checks.push(Check::new("parameter-free routes that fire", "none", if emptyset.is_empty() { "none".into() } else { emptyset.join(", ") }));
    checks
}

fn oracle_agreement(r: &SuiteReport) -> Vec<Check> {
    vec![
        Check::new("random spines", ">= 200", if r.cases >= 200 { ">= 200".into() } else { r.cases.to_string() }),
        Check::new("disagreements", 0, r.disagreements.len()),
        Check::new("oracle errors", 0, r.errors.len()),
        Check::new("agreements", r.cases, r.agreements),
    ]
}

fn lemma_contracts(r: &SuiteReport) -> Vec<Check> {
    let first = r.contract_violations.first().map(|d| format!(", first: {} at p = {}: {}", d.spine, d.p, d.check));
    vec![Check::new(
        "subgroup contracts",
        "0 violations",
        format!("{} violations{}", r.contract_violations.len(), first.unwrap_or_default()),
    )]
}

/// Every catalog base, bare and under a few extensions.
pub fn fixture_towers(catalog: &Catalog) -> Vec<Tower> {
    let exts: [&[&str]; 4] = [&[], &[r#"["Z"]"#], &[r#"["Q"]"#], &[r#"["Q"]"#, r#"["Z"]"#]];
    catalog
        .fields()
        .flat_map(|b| exts.iter().map(move |e| Tower::new(b.clone(), e.iter().map(|s| sp(s)).collect())))
        .collect()
}

fn random_component(rng: &mut impl Rng) -> Component {
    if rng.gen_bool(0.5) {
        Component::Z
    } else {
        Component::Q
    }
}

pub fn random_spine(rng: &mut impl Rng) -> Spine {
    let n = rng.gen_range(1..=3);
    let segments = (0..n)
        .map(|_| {
            let c = random_component(rng);
            match rng.gen_range(0..8) {
                0 => Segment::LeftRay(c),
                1 => Segment::RightRay(c),
                2 => Segment::BiInfinite(c),
                _ => Segment::single(c),
            }
        })
        .collect();
    Spine::new(segments).expect("non-empty segments")
}

/// A catalog base under zero to two random extensions.
pub fn random_tower(rng: &mut impl Rng, bases: &[&BaseField]) -> Tower {
    let base = bases[rng.gen_range(0..bases.len())].clone();
    let exts = (0..rng.gen_range(0..=2)).map(|_| random_spine(rng)).collect();
    Tower::new(base, exts)
}

fn flag_slots(b: &mut BaseField) -> Vec<&mut Flag> {
    let mut slots = vec![
        &mut b.separably_closed,
        &mut b.real_closed,
        &mut b.henselian,
        &mut b.t_henselian,
        &mut b.small_absolute_galois,
        &mut b.finite_transcendence_degree,
        &mut b.equiv_to_non_henselian,
    ];
    for pf in b.primes.values_mut().chain(std::iter::once(&mut b.other_primes)) {
        slots.extend([
            &mut pf.has_galois_ext_of_degree_p,
            &mut pf.contains_zeta_p,
            &mut pf.has_sep_ext_degree_div_p_squared,
            &mut pf.sqrt_minus_one,
            &mut pf.p_henselian,
        ]);
    }
    slots
}

/// Forgets one or two known flags of the base; returns the blanked tower
/// and every consistent way of filling the flags back in.
fn blank_flags(rng: &mut impl Rng, t: &Tower) -> (Tower, Vec<Tower>) {
    let mut b = t.clone();
    let known: Vec<usize> = flag_slots(&mut b.base)
        .iter()
        .enumerate()
        .filter(|(_, f)| f.is_some())
        .map(|(i, _)| i)
        .collect();
    if known.is_empty() {
        return (b, Vec::new());
    }
    let k = rng.gen_range(1..=2.min(known.len()));
    let mut picked: Vec<usize> = Vec::new();
    while picked.len() < k {
        let i = known[rng.gen_range(0..known.len())];
        if !picked.contains(&i) {
            picked.push(i);
        }
    }
    {
        let mut slots = flag_slots(&mut b.base);
        for &i in &picked {
            *slots[i] = None;
        }
    }
    let completions = (0..1u32 << k)
        .filter_map(|bits| {
            let mut c = b.clone();
            {
                let mut slots = flag_slots(&mut c.base);
                for (j, &i) in picked.iter().enumerate() {
                    *slots[i] = Some(bits >> j & 1 == 1);
                }
            }
            c.base.validate().ok().map(|_| c)
        })
        .collect();
    (b, completions)
}

fn rule_results(t: &Tower) -> Vec<(String, decide::Result<Verdict>)> {
    let mut out = vec![
        ("parameter-free".to_string(), thm_a(t)),
        ("one-parameter".to_string(), thm_b(t)),
        ("equicharacteristic-zero".to_string(), cor_00(t)),
    ];
    for p in DEFAULT_PRIMES {
        out.push((format!("p-henselian tame at {p}"), prop_ptame(t, p)));
        out.push((format!("henselian tame at {p}"), prop_tb(t, p)));
    }
    out
}

/// A definitive verdict on the blanked tower must be the verdict of every
/// completion; otherwise the engine guessed.
fn guess_violations(blanked: &Tower, completions: &[Tower]) -> Vec<String> {
    let completed: Vec<_> = completions.iter().map(rule_results).collect();
    let mut out = Vec::new();
    for (i, (rule, r)) in rule_results(blanked).into_iter().enumerate() {
        let Ok(v) = r else { continue };
        if v.is_inconclusive() {
            continue;
        }
        for c in &completed {
            let agrees = matches!(&c[i].1, Ok(w) if w.level == v.level);
            if !agrees {
                out.push(format!("{blanked}: {rule} says {}, a completion says {}", v.level, level_route(&c[i].1)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structural_suites_pass() {
        let r = Replay::builtin();
        for s in ["example_two", "antiregular", "pz_q", "fj_q", "pz_l", "tame_cases", "verdict_properties"] {
            let res = r.run(s).unwrap();
            let failed: Vec<_> = res.failures().collect();
            assert!(failed.is_empty(), "{s}: {failed:?}");
        }
        assert_eq!(r.run("example_two").unwrap().checks.len(), 4);
        assert!(matches!(r.run("nope"), Err(ReplayError::UnknownSuite(_))));
    }

    #[test]
    fn broken_fixtures_fail_with_a_diff() {
        let mut f = Fixtures::builtin();
        f.0.insert("fj_q".into(), r#"{ "base": "PZ", "extensions": [["Q"]] }"#.into());
        f.0.insert("pz_q".into(), "{ not json".into());
        let r = Replay::new(Catalog::builtin(), f);
        let fj = r.run("fj_q").unwrap();
        let c = fj.failures().next().unwrap();
        assert_eq!(c.expected, "NotDefinable via EquicharZeroNegative");
        assert_ne!(c.actual, c.expected);
        let pz = r.run("pz_q").unwrap();
        assert_eq!(pz.checks.len(), 1);
        assert!(!pz.passed());
    }

    #[test]
    fn blanking_keeps_completions_consistent() {
        let cat = Catalog::builtin();
        let bases: Vec<&BaseField> = cat.fields().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let t = random_tower(&mut rng, &bases);
            let (b, cs) = blank_flags(&mut rng, &t);
            assert!(cs.iter().all(|c| c.base.validate().is_ok()));
            assert!(cs.iter().all(|c| c.extensions == b.extensions));
        }
    }
}
