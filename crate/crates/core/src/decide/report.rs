//! Running every rule on a tower, and re-checking verdicts.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::rules::{cor_00, thm_a, thm_b, Frame};
use super::tame::{ekn_annotations, is_tamely_branching, prop_ptame, prop_tb};
use super::verdict::{Level, Route, TameBranchReport, Verdict};
use super::Result;
use crate::oag;
use crate::valfield::{canonical_henselian, is_henselian_ref, is_p_henselian_ref, Tower};

/// Primes sampled for "every prime" checks on towers.
pub const DEFAULT_PRIMES: [u32; 4] = [2, 3, 5, 7];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Verdict(Verdict),
    Error(String),
}

impl Outcome {
    fn from(r: Result<Verdict>) -> Self {
        match r {
            Ok(v) => Outcome::Verdict(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    }

    pub fn verdict(&self) -> Option<&Verdict> {
        match self {
            Outcome::Verdict(v) => Some(v),
            Outcome::Error(_) => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Verdict(v) => write!(f, "{v}"),
            Outcome::Error(e) => write!(f, "error: {e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeAnalysis {
    pub prime: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical_tame: Option<TameBranchReport>,
    pub ptame: Outcome,
    pub tb: Outcome,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub annotations: Vec<String>,
}

/// Every rule applied to one tower.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analysis {
    pub tower: String,
    pub thm_a: Outcome,
    pub thm_b: Outcome,
    pub cor_00: Outcome,
    pub primes: Vec<PrimeAnalysis>,
}

impl Analysis {
    /// The most informative verdict: a definitive answer from the
    /// equicharacteristic-zero criterion, else Theorem B, else Theorem A.
    pub fn overall(&self) -> Option<&Verdict> {
        [&self.cor_00, &self.thm_b, &self.thm_a]
            .into_iter()
            .filter_map(Outcome::verdict)
            .find(|v| !v.is_inconclusive())
            .or_else(|| self.thm_b.verdict())
            .or_else(|| self.thm_a.verdict())
    }
}

pub fn analyze(t: &Tower, primes: &[u32]) -> Analysis {
    let canonical = canonical_henselian(t).ok();
    let primes = primes
        .iter()
        .map(|&p| PrimeAnalysis {
            prime: p,
            canonical_tame: canonical
                .as_ref()
                .and_then(|c| is_tamely_branching(t, &c.valuation, p).ok()),
            ptame: Outcome::from(prop_ptame(t, p)),
            tb: Outcome::from(prop_tb(t, p)),
            annotations: ekn_annotations(t, p),
        })
        .collect();
    Analysis {
        tower: t.describe(),
        thm_a: Outcome::from(thm_a(t)),
        thm_b: Outcome::from(thm_b(t)),
        cor_00: Outcome::from(cor_00(t)),
        primes,
    }
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tower: {}", self.tower)?;
        writeln!(f, "parameter-free criterion: {}", self.thm_a)?;
        writeln!(f, "one-parameter criterion: {}", self.thm_b)?;
        writeln!(f, "equicharacteristic-zero criterion: {}", self.cor_00)?;
        for pa in &self.primes {
            writeln!(f, "p = {}:", pa.prime)?;
            if let Some(r) = &pa.canonical_tame {
                writeln!(
                    f,
                    "  canonical valuation tamely branching: {} (index {})",
                    r.tamely_branching, r.index_mod_p
                )?;
            }
            writeln!(f, "  p-henselian tame: {}", pa.ptame.to_string().replace('\n', "\n  "))?;
            writeln!(f, "  henselian tame: {}", pa.tb.to_string().replace('\n', "\n  "))?;
            for a in &pa.annotations {
                writeln!(f, "  annotation: {a}")?;
            }
        }
        Ok(())
    }
}

/// Re-derives the witness of a verdict and checks the invariants its
/// level and route promise.
pub fn check_verdict(t: &Tower, v: &Verdict) -> std::result::Result<(), String> {
    match v.level {
        Level::Inconclusive => return Ok(()),
        Level::NotDefinable => {
            return match v.route {
                Some(Route::EquicharZeroNegative | Route::RealClosedResidueCoarsest) if !v.citations.is_empty() => Ok(()),
                other => Err(format!("negative verdict from route {other:?}")),
            }
        }
        _ => {}
    }
    let w = v.witness.as_ref().ok_or("positive verdict without witness")?;
    if v.witness_cut != Some(w.valuation.cut) {
        return Err("witness cut does not match the witness".into());
    }
    let expected = match w.parameters {
        0 => Level::EmptysetDefinable,
        n => Level::ParamDefinable { max_params: n },
    };
    if v.level != expected || w.parameters > 1 {
        return Err(format!("level {} does not match {} parameters", v.level, w.parameters));
    }
    let frame = Frame::at(t, w.valuation).map_err(|e| e.to_string())?;
    if frame.group != w.value_group {
        return Err(format!("value group {} recomputes as {}", w.value_group, frame.group));
    }
    if frame.group.is_trivial() {
        return Err("witness valuation is trivial".into());
    }
    let hens = match (w.p_henselian_only, w.prime) {
        (true, Some(p)) => is_p_henselian_ref(t, &w.valuation, p),
        (true, None) => return Err("p-henselian witness without a prime".into()),
        (false, _) => is_henselian_ref(t, &w.valuation),
    }
    .map_err(|e| e.to_string())?;
    if hens != Some(true) {
        return Err(format!("witness {} is not known to be henselian", w.valuation));
    }
    let g = &w.value_group;
    match (v.route, w.prime) {
        (Some(Route::HongRank1), Some(p)) if !(g.rank() == Some(1) && !oag::is_p_divisible(g, p)) => {
            Err(format!("rank-1 witness has value group {g}"))
        }
        (Some(Route::HongPRegularPsi | Route::TbHongRegular), Some(p))
            if !(oag::is_p_regular(g, p) && !oag::is_p_divisible(g, p)) =>
        {
            Err(format!("p-regular witness has value group {g}"))
        }
        (Some(Route::LemmaDelta0), Some(p)) if !oag::is_p_divisible(g, p) => {
            Err(format!("quotient {g} by the smallest such subgroup is not {p}-divisible"))
        }
        (Some(Route::TbDeltaGamma | Route::SmalltameComposite), Some(p)) => {
            match is_tamely_branching(t, &w.valuation, p) {
                Ok(r) if r.tamely_branching => Ok(()),
                Ok(_) => Err("witness is not tamely branching".into()),
                Err(e) => Err(e.to_string()),
            }
        }
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valfield::Catalog;

    #[test]
    fn fixtures_pass_their_own_checks() {
        let cat = Catalog::builtin();
        let fixtures: [(&str, &[&str]); 6] = [
            ("R", &[r#"["Q"]"#, r#"["Z"]"#]),
            ("PZ", &[r#"["Q"]"#]),
            ("FJ", &[r#"["Q"]"#]),
            ("PZ_L", &[]),
            ("Q(i)", &[r#"["Z"]"#, r#"["Q"]"#]),
            ("Q_3^h(zeta_3)", &[r#"["Z"]"#]),
        ];
        for (base, exts) in fixtures {
            let t = Tower::new(cat.get(base).unwrap().clone(), exts.iter().map(|s| s.parse().unwrap()).collect());
            let a = analyze(&t, &DEFAULT_PRIMES);
            let mut all: Vec<&Verdict> = [&a.thm_a, &a.thm_b, &a.cor_00].into_iter().filter_map(Outcome::verdict).collect();
            for pa in &a.primes {
                all.extend(pa.ptame.verdict());
                all.extend(pa.tb.verdict());
            }
            for v in all {
                check_verdict(&t, v).unwrap_or_else(|e| panic!("{}: {e}\n{v}", a.tower));
            }
            assert!(a.overall().is_some());
        }
    }
}
