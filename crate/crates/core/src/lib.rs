//! Definability of henselian valuations on iterated power-series fields.

pub mod decide;
pub mod formula;
pub mod oag;
pub mod oracle;
pub mod replay;
pub mod valfield;

pub use oag::{Component, Cut, Element, OagError, Position, Segment, Spine};
