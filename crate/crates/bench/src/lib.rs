//! Inputs shared by the benchmarks.

use valdef_core::oag::{Component, Segment, Spine};
use valdef_core::valfield::{Catalog, Tower};

/// A finite spine alternating `Z` and `Q`, starting with `Z`.
pub fn alternating(rank: usize) -> Spine {
    let cs: Vec<Component> = (0..rank).map(|i| if i % 2 == 0 { Component::Z } else { Component::Q }).collect();
    Spine::finite(&cs)
}

/// A spine mixing finite blocks with rays, `blocks` segments long.
pub fn mixed(blocks: usize) -> Spine {
    let segments = (0..blocks)
        .map(|i| match i % 4 {
            0 => Segment::Finite(vec![Component::Q, Component::Z]),
            1 => Segment::LeftRay(Component::Z),
            2 => Segment::Finite(vec![Component::ZLoc(3)]),
            _ => Segment::BiInfinite(Component::Q),
        })
        .collect();
    Spine::new(segments).expect("non-empty segments")
}

/// The worked-example towers.
pub fn towers() -> Vec<(&'static str, Tower)> {
    let cat = Catalog::builtin();
    let tower = |base: &str, exts: &[&str]| {
        Tower::new(cat.get(base).expect("catalog base").clone(), exts.iter().map(|s| s.parse().expect("spine")).collect())
    };
    vec![
        ("R((Q))((Z))", tower("R", &[r#"["Q"]"#, r#"["Z"]"#])),
        ("PZ((Q))", tower("PZ", &[r#"["Q"]"#])),
        ("FJ((Q))", tower("FJ", &[r#"["Q"]"#])),
        ("PZ_L", tower("PZ_L", &[])),
        ("Q(i)((Z))((Q))", tower("Q(i)", &[r#"["Z"]"#, r#"["Q"]"#])),
    ]
}
