//! Ordered abelian groups presented as lexicographic sums ("spines").

mod component;
mod element;
mod spine;
mod structure;

use thiserror::Error;

pub use component::{is_prime, smallest_prime_outside, Component};
pub use element::{element_cmp, Element};
pub use spine::{Cut, CutKey, Position, Segment, Spine};
pub use structure::{
    delta0, delta_gamma, equiv_normalize, first_non_p_divisible, has_minimal_positive, has_rank1_quotient, index_mod_p,
    is_antiregular, is_divisible, is_p_antiregular, is_p_divisible, is_p_regular, is_regular,
    max_convex_avoiding, max_convex_where, max_divisible_subgroup, max_p_divisible_subgroup,
    maybe_equiv, principal_convex_hull, Equivalence, GroupIndex,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OagError {
    #[error("segments must be non-empty")]
    EmptySegment,
    #[error("no position {0} in the spine")]
    NoSuchPosition(Position),
    #[error("cut {0:?} does not name a convex subgroup of the spine")]
    IllegalCut(Cut),
    #[error("coordinate {value} at {pos} is not an element of {component}")]
    IllegalCoordinate {
        pos: Position,
        value: String,
        component: Component,
    },
    #[error("operation needs a spine with finitely many positions")]
    NotFinite,
    #[error("expected {expected} coordinates, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("element must be positive")]
    NonPositive,
    #[error("element must be nonzero")]
    ZeroElement,
    #[error("parse error: {0}")]
    Parse(String),
}
