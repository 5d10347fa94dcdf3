//! Fields as towers of power-series extensions over flag-annotated bases.

mod base;
mod tower;

use thiserror::Error;

use crate::oag::OagError;

pub use base::{BaseField, CanonicalData, Catalog, ElemClass, Flag, PrimeFlags};
pub use tower::{
    base_data, canonical_henselian, canonical_p_henselian, composed_spine, henselian_valuations,
    is_henselian_ref, is_p_henselian_ref, residue_at, spine_for, uniform_definability, value_group_at,
    value_of_p, BaseSpec, CanonicalPValuation, CanonicalValuation, Refinement, Tower, TowerFile,
    ValuationRef,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValfieldError {
    #[error("unknown base field {0:?}")]
    UnknownBase(String),
    #[error("catalog entry {0:?} conflicts with an existing entry of the same name")]
    CatalogConflict(String),
    #[error("base field {0:?} is inconsistent: {1}")]
    Inconsistent(String, String),
    #[error("insufficient annotations: {0}")]
    Insufficient(String),
    #[error("{0} carries no nontrivial henselian valuation")]
    NoHenselianValuation(String),
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("infinitely many henselian valuations")]
    Infinite,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Group(#[from] OagError),
}
