//! Definability verdicts for henselian valuations on towers.
//!
//! Every rule returns a [`Verdict`] naming the route that produced it and,
//! for positive verdicts, a witness valuation that can be re-checked with
//! [`check_verdict`]. Missing annotations never produce a guess: they turn
//! into `Inconclusive`.

mod report;
mod rules;
mod tame;
mod verdict;

use thiserror::Error;

use crate::oag::OagError;
use crate::valfield::ValfieldError;

pub use report::{analyze, check_verdict, Analysis, Outcome, PrimeAnalysis, DEFAULT_PRIMES};
pub use rules::{
    cor_00, cor_1, cor_fin, cor_small, prop_ake, prop_antireg, prop_nondiv, thm_a, thm_b, valuation_verdict,
};
pub use tame::{ekn_annotations, is_tamely_branching, prop_ptame, prop_smalltame, prop_tb};
pub use verdict::{Level, Route, TameBranchReport, Verdict, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no definable valuation possible: {0}")]
    NoDefinableValuation(String),
    #[error(transparent)]
    Field(#[from] ValfieldError),
    #[error(transparent)]
    Group(#[from] OagError),
}

pub type Result<T> = std::result::Result<T, DecideError>;

/// Turns missing annotations into an `Inconclusive` verdict.
fn settle(r: Result<Verdict>) -> Result<Verdict> {
    match r {
        Err(DecideError::Field(ValfieldError::Insufficient(msg))) => Ok(Verdict::inconclusive(vec![msg])),
        other => other,
    }
}
