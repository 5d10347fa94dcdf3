use std::fmt;

use serde::{Deserialize, Serialize};

use crate::oag::{Cut, GroupIndex, Spine};
use crate::valfield::ValuationRef;

/// How strongly a valuation is known to be definable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Level {
    EmptysetDefinable,
    ParamDefinable { max_params: u8 },
    NotDefinable,
    Inconclusive,
}

impl Level {
    /// Larger is stronger: parameter-free beats one parameter beats nothing.
    pub fn strength(self) -> u8 {
        match self {
            Level::EmptysetDefinable => 2,
            Level::ParamDefinable { .. } => 1,
            Level::NotDefinable | Level::Inconclusive => 0,
        }
    }

    pub fn is_positive(self) -> bool {
        self.strength() > 0
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::EmptysetDefinable => f.write_str("EmptysetDefinable"),
            Level::ParamDefinable { max_params } => write!(f, "ParamDefinable({max_params})"),
            Level::NotDefinable => f.write_str("NotDefinable"),
            Level::Inconclusive => f.write_str("Inconclusive"),
        }
    }
}

/// The rule that produced a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Route {
    /// The canonical valuation has separably closed residue field.
    ResidueSepClosed,
    /// The residue of the canonical valuation is not t-henselian.
    ResidueNotTHenselian,
    /// A rank-1 quotient that is not `p`-divisible.
    HongRank1,
    /// A `p`-regular quotient that is not `p`-divisible, made parameter-free
    /// by quantifying over the parameters.
    HongPRegularPsi,
    /// The coarsening at the smallest convex subgroup with `p`-divisible quotient.
    LemmaDelta0,
    /// Transfer of a non-divisible value group from a henselian field
    /// elementarily equivalent to the residue field.
    AkeTransfer,
    /// The convex subgroup attached to the value of one parameter.
    NondivDeltaGamma,
    /// Equicharacteristic zero with all three obstructions present.
    EquicharZeroNegative,
    /// Only the coarsest henselian valuation with real closed residue field
    /// can be definable.
    RealClosedResidueCoarsest,
    PtameCase1,
    PtameCase2,
    PtameCase3,
    TbDeltaGamma,
    TbHongRegular,
    SmalltameComposite,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// The valuation a positive verdict exhibits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime: Option<u32>,
    pub valuation: ValuationRef,
    /// The composition the cut lives in.
    pub spine: Spine,
    pub value_group: Spine,
    pub parameters: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub formulas: Vec<String>,
    /// Only `p`-henselian is claimed for the witness.
    #[serde(default)]
    pub p_henselian_only: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub level: Level,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<Route>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_cut: Option<Cut>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default)]
    pub interpretation_steps: Vec<String>,
    #[serde(default)]
    pub citations: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// No parameter-free definition of a nontrivial henselian valuation exists.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub emptyset_excluded: bool,
}

impl Verdict {
    pub fn inconclusive(notes: Vec<String>) -> Self {
        Verdict {
            level: Level::Inconclusive,
            route: None,
            prime: None,
            witness_cut: None,
            witness: None,
            interpretation_steps: Vec::new(),
            citations: Vec::new(),
            notes,
            emptyset_excluded: false,
        }
    }

    pub fn positive(route: Route, witness: Witness, citation: &str) -> Self {
        let level = match witness.parameters {
            0 => Level::EmptysetDefinable,
            n => Level::ParamDefinable { max_params: n },
        };
        Verdict {
            level,
            route: Some(route),
            prime: witness.prime,
            witness_cut: Some(witness.valuation.cut),
            witness: Some(witness),
            interpretation_steps: Vec::new(),
            citations: vec![citation.to_string()],
            notes: Vec::new(),
            emptyset_excluded: false,
        }
    }

    pub fn negative(route: Route, citation: &str) -> Self {
        Verdict {
            level: Level::NotDefinable,
            route: Some(route),
            citations: vec![citation.to_string()],
            ..Verdict::inconclusive(Vec::new())
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn with_step(mut self, step: impl Into<String>) -> Self {
        self.interpretation_steps.push(step.into());
        self
    }

    pub fn is_inconclusive(&self) -> bool {
        self.level == Level::Inconclusive
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.level)?;
        if let Some(r) = self.route {
            write!(f, " via {r}")?;
        }
        if let Some(p) = self.prime {
            write!(f, " at p = {p}")?;
        }
        if let Some(w) = &self.witness {
            write!(f, "\n  witness: {} with value group {}", w.valuation, w.value_group)?;
            if let Some(par) = &w.parameter {
                write!(f, "\n  parameter: {par}")?;
            }
            for phi in &w.formulas {
                write!(f, "\n  formula: {phi}")?;
            }
        }
        if self.emptyset_excluded {
            f.write_str("\n  no parameter-free definition exists")?;
        }
        for s in &self.interpretation_steps {
            write!(f, "\n  step: {s}")?;
        }
        for c in &self.citations {
            write!(f, "\n  because: {c}")?;
        }
        for n in &self.notes {
            write!(f, "\n  note: {n}")?;
        }
        Ok(())
    }
}

/// The three conditions of tame branching at `p`, evaluated for one valuation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TameBranchReport {
    pub prime: u32,
    pub value_group_not_p_div: bool,
    pub index_mod_p: GroupIndex,
    pub residue_char_ok: bool,
    /// `None` when the index is not `p` and the condition is vacuous.
    pub p_squared_ext_ok: Option<bool>,
    pub tamely_branching: bool,
}
