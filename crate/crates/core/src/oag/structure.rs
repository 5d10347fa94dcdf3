//! Structural predicates and convex-subgroup constructions on spines.
//!
//! Every rule here is a scan over segments: divisibility of a lexicographic
//! sum is decided componentwise, and convex subgroups are final runs of the
//! index order, so none of these functions ever enumerates elements.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::component::Component;
use super::element::Element;
use super::spine::{Cut, Position, Segment, Spine};
use super::OagError;

/// `[G : pG]`, which is either a finite power of `p` or infinite.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupIndex {
    Finite(BigUint),
    Infinite,
}

impl GroupIndex {
    pub fn is_infinite(&self) -> bool {
        matches!(self, GroupIndex::Infinite)
    }

    pub fn equals(&self, n: u64) -> bool {
        matches!(self, GroupIndex::Finite(k) if *k == BigUint::from(n))
    }
}

impl fmt::Display for GroupIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupIndex::Finite(n) => write!(f, "{n}"),
            GroupIndex::Infinite => write!(f, "infinity"),
        }
    }
}

impl Serialize for GroupIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            GroupIndex::Finite(n) => match u64::try_from(n) {
                Ok(v) => s.serialize_u64(v),
                Err(_) => s.serialize_str(&n.to_string()),
            },
            GroupIndex::Infinite => s.serialize_str("infinity"),
        }
    }
}

impl<'de> Deserialize<'de> for GroupIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(n) => Ok(GroupIndex::Finite(n.into())),
            Repr::Text(t) if t == "infinity" => Ok(GroupIndex::Infinite),
            Repr::Text(t) => t
                .parse::<BigUint>()
                .map(GroupIndex::Finite)
                .map_err(serde::de::Error::custom),
        }
    }
}

fn segment_p_divisible(seg: &Segment, p: u32) -> bool {
    seg.components().iter().all(|c| c.is_p_divisible(p))
}

pub fn is_p_divisible(g: &Spine, p: u32) -> bool {
    g.segments().iter().all(|s| segment_p_divisible(s, p))
}

pub fn is_divisible(g: &Spine) -> bool {
    g.segments().iter().all(|s| s.components().iter().all(|c| c.is_divisible()))
}

pub fn index_mod_p(g: &Spine, p: u32) -> GroupIndex {
    let mut n = BigUint::one();
    for seg in g.segments() {
        match seg {
            Segment::Finite(cs) => {
                for c in cs {
                    n *= c.index_mod_p(p);
                }
            }
            _ => {
                if !segment_p_divisible(seg, p) {
                    return GroupIndex::Infinite;
                }
            }
        }
    }
    GroupIndex::Finite(n)
}

/// Every proper quotient is `p`-divisible: all positions other than a
/// maximal one must carry `p`-divisible components.
pub fn is_p_regular(g: &Spine, p: u32) -> bool {
    let segs = g.segments();
    let Some((last, rest)) = segs.split_last() else {
        return true;
    };
    if !rest.iter().all(|s| segment_p_divisible(s, p)) {
        return false;
    }
    match last {
        Segment::Finite(cs) => cs[..cs.len() - 1].iter().all(|c| c.is_p_divisible(p)),
        // positions other than the last one all carry the uniform component
        Segment::LeftRay(c) | Segment::RightRay(c) | Segment::BiInfinite(c) => c.is_p_divisible(p),
    }
}

pub fn is_regular(g: &Spine) -> bool {
    g.representative_primes().into_iter().all(|p| is_p_regular(g, p))
}

/// The index order has a minimum, so the most significant position alone
/// is a rank-1 quotient.
pub fn has_rank1_quotient(g: &Spine) -> bool {
    g.first_position().is_some()
}

/// Non-`p`-divisible positions are coinitial and there is no rank-1
/// quotient; with uniform infinite segments both reduce to a condition on
/// the first segment.
pub fn is_p_antiregular(g: &Spine, p: u32) -> bool {
    match g.segments().first() {
        Some(Segment::LeftRay(c)) | Some(Segment::BiInfinite(c)) => !c.is_p_divisible(p),
        _ => false,
    }
}

pub fn is_antiregular(g: &Spine) -> bool {
    g.representative_primes().into_iter().all(|p| is_p_antiregular(g, p))
}

/// Smallest convex subgroup with `p`-divisible quotient: everything from the
/// first non-`p`-divisible position on.
pub fn delta0(g: &Spine, p: u32) -> Cut {
    for (s, seg) in g.segments().iter().enumerate() {
        match seg {
            Segment::Finite(cs) => {
                if let Some(j) = cs.iter().position(|c| !c.is_p_divisible(p)) {
                    return g.cut_from(Position::new(s, j as i64)).expect("position in range");
                }
            }
            _ => {
                if !segment_p_divisible(seg, p) {
                    return g.normalize_cut(Cut::AtBoundary(s)).expect("boundary in range");
                }
            }
        }
    }
    Cut::Bottom
}

/// The cut at which the maximal run of positions satisfying `keep`,
/// immediately more significant than `pos`, begins; `pos` itself and
/// everything below belong to the subgroup.
fn extend_upward(g: &Spine, pos: Position, keep: impl Fn(Component) -> bool) -> Cut {
    let segs = g.segments();
    let seg = &segs[pos.seg];
    match seg.uniform_component() {
        Some(c) => {
            let has_pred = seg.min_offset().map_or(true, |m| pos.offset > m);
            if has_pred && !keep(c) {
                return g.cut_from(pos).expect("position in range");
            }
        }
        None => {
            let cs = match seg {
                Segment::Finite(cs) => cs,
                _ => unreachable!(),
            };
            for j in (0..pos.offset as usize).rev() {
                if !keep(cs[j]) {
                    return g.cut_after(Position::new(pos.seg, j as i64)).expect("position in range");
                }
            }
        }
    }
    for s in (0..pos.seg).rev() {
        match &segs[s] {
            Segment::Finite(cs) => {
                for j in (0..cs.len()).rev() {
                    if !keep(cs[j]) {
                        return g.cut_after(Position::new(s, j as i64)).expect("position in range");
                    }
                }
            }
            other => {
                if !keep(other.uniform_component().unwrap()) {
                    return g.normalize_cut(Cut::AtBoundary(s + 1)).expect("boundary in range");
                }
            }
        }
    }
    Cut::Top
}

/// The most significant position whose component is not `p`-divisible, if
/// the set of such positions has a least element.
pub fn first_non_p_divisible(g: &Spine, p: u32) -> Option<Position> {
    for (s, seg) in g.segments().iter().enumerate() {
        match seg {
            Segment::Finite(cs) => {
                if let Some(j) = cs.iter().position(|c| !c.is_p_divisible(p)) {
                    return Some(Position::new(s, j as i64));
                }
            }
            Segment::RightRay(c) if !c.is_p_divisible(p) => return Some(Position::new(s, 0)),
            other if !segment_p_divisible(other, p) => return None,
            _ => {}
        }
    }
    None
}

/// Largest convex subgroup all of whose positions satisfy `keep`.
pub fn max_convex_where(g: &Spine, keep: impl Fn(Component) -> bool) -> Cut {
    let segs = g.segments();
    for s in (0..segs.len()).rev() {
        match &segs[s] {
            Segment::Finite(cs) => {
                if let Some(j) = cs.iter().rposition(|c| !keep(*c)) {
                    return g.cut_after(Position::new(s, j as i64)).expect("position in range");
                }
            }
            other => {
                if !keep(other.uniform_component().unwrap()) {
                    return g.normalize_cut(Cut::AtBoundary(s + 1)).expect("boundary in range");
                }
            }
        }
    }
    g.normalize_cut(Cut::Top).expect("top is legal")
}

/// Largest `p`-divisible convex subgroup.
pub fn max_p_divisible_subgroup(g: &Spine, p: u32) -> Cut {
    max_convex_where(g, |c| c.is_p_divisible(p))
}

/// Largest divisible convex subgroup.
pub fn max_divisible_subgroup(g: &Spine) -> Cut {
    max_convex_where(g, Component::is_divisible)
}

fn leading(g: &Spine, gamma: &Element) -> Result<Position, OagError> {
    gamma.check_on(g)?;
    gamma.leading_position().ok_or(OagError::ZeroElement)
}

/// The convex subgroup `{d : [0, p|d|] in [0, p*gamma] + pG}` for `gamma > 0`:
/// the principal convex subgroup of `gamma`, extended upward across the run
/// of `p`-divisible positions directly above it.
pub fn delta_gamma(g: &Spine, p: u32, gamma: &Element) -> Result<Cut, OagError> {
    let lead = leading(g, gamma)?;
    if !gamma.is_positive() {
        return Err(OagError::NonPositive);
    }
    Ok(extend_upward(g, lead, |c| c.is_p_divisible(p)))
}

/// Convex hull of the subgroup generated by `gamma`.
pub fn principal_convex_hull(g: &Spine, gamma: &Element) -> Result<Cut, OagError> {
    let lead = leading(g, gamma)?;
    g.cut_from(lead)
}

/// Largest convex subgroup not containing `gamma`.
pub fn max_convex_avoiding(g: &Spine, gamma: &Element) -> Result<Cut, OagError> {
    let lead = leading(g, gamma)?;
    g.cut_after(lead)
}

/// Whether the group has a least positive element: the index order has a
/// maximum carrying a discrete component.
pub fn has_minimal_positive(g: &Spine) -> bool {
    match g.last_position() {
        Some(pos) => g.component_at(pos).map(|c| c == Component::Z).unwrap_or(false),
        None => false,
    }
}

/// Normal form up to elementary equivalence of the divisible pieces: every
/// maximal run of `Q` positions (finite or infinite) becomes a single `Q`.
pub fn equiv_normalize(g: &Spine) -> Spine {
    #[derive(PartialEq)]
    enum Atom {
        Div,
        Other(Segment),
    }
    let mut atoms: Vec<Atom> = Vec::new();
    for seg in g.segments() {
        match seg {
            Segment::Finite(cs) => {
                for c in cs {
                    atoms.push(if c.is_divisible() {
                        Atom::Div
                    } else {
                        Atom::Other(Segment::single(*c))
                    });
                }
            }
            other => atoms.push(if other.uniform_component().unwrap().is_divisible() {
                Atom::Div
            } else {
                Atom::Other(other.clone())
            }),
        }
    }
    atoms.dedup_by(|a, b| *a == Atom::Div && *b == Atom::Div);
    let segments = atoms
        .into_iter()
        .map(|a| match a {
            Atom::Div => Segment::single(Component::Q),
            Atom::Other(s) => s,
        })
        .collect();
    Spine::new(segments).expect("atoms are non-empty")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equivalence {
    Equivalent,
    Distinct,
    Unknown,
}

/// Three-valued elementary equivalence test. `Distinct` is reported only
/// when one of the computed elementary invariants differs.
pub fn maybe_equiv(g: &Spine, h: &Spine) -> Equivalence {
    let ng = equiv_normalize(g);
    let nh = equiv_normalize(h);
    if ng == nh {
        return Equivalence::Equivalent;
    }
    let mut primes = g.representative_primes();
    primes.extend(h.representative_primes());
    primes.extend([2, 3, 5, 7]);
    primes.sort();
    primes.dedup();
    let differs = g.is_trivial() != h.is_trivial()
        || has_minimal_positive(g) != has_minimal_positive(h)
        || primes.iter().any(|&p| {
            is_p_divisible(g, p) != is_p_divisible(h, p)
                || is_p_regular(g, p) != is_p_regular(h, p)
                || is_p_antiregular(g, p) != is_p_antiregular(h, p)
        });
    if differs {
        Equivalence::Distinct
    } else {
        Equivalence::Unknown
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Component::*;

    fn sp(json: &str) -> Spine {
        json.parse().unwrap()
    }

    fn left_z() -> Spine {
        sp(r#"[{"LeftRay":"Z"}]"#)
    }

    fn bi_z() -> Spine {
        sp(r#"[{"BiInfinite":"Z"}]"#)
    }

    #[test]
    fn divisibility() {
        for p in [2, 3, 5, 7] {
            assert!(is_p_divisible(&Spine::finite(&[Q]), p));
        }
        assert!(!is_p_divisible(&Spine::finite(&[Z, Q]), 2));
        assert!(is_p_divisible(&Spine::finite(&[ZLoc(3)]), 2));
        assert!(!is_p_divisible(&Spine::finite(&[ZLoc(3)]), 3));
        assert!(is_divisible(&Spine::trivial()));
        assert!(!is_divisible(&Spine::finite(&[ZLoc(3)])));
    }

    #[test]
    fn divisible_final_runs() {
        assert_eq!(max_divisible_subgroup(&Spine::finite(&[Z, Q, Q])), Cut::AtBoundary(1));
        assert_eq!(max_divisible_subgroup(&Spine::finite(&[Q, Z])), Cut::Bottom);
        assert_eq!(max_divisible_subgroup(&Spine::finite(&[Q])), Cut::Top);
        assert_eq!(max_divisible_subgroup(&Spine::trivial()), Cut::Bottom);
        assert_eq!(max_p_divisible_subgroup(&sp(r#"["Z", {"LeftRay":{"ZLoc":3}}]"#), 2), Cut::AtBoundary(1));
        assert_eq!(first_non_p_divisible(&Spine::finite(&[Q, Z]), 2), Some(Position::new(1, 0)));
        assert_eq!(first_non_p_divisible(&sp(r#"["Q", {"LeftRay":"Z"}]"#), 2), None);
        assert_eq!(first_non_p_divisible(&sp(r#"[{"RightRay":"Z"}]"#), 3), Some(Position::new(0, 0)));
        assert_eq!(first_non_p_divisible(&Spine::finite(&[Q]), 3), None);
    }

    #[test]
    fn indices() {
        assert!(index_mod_p(&Spine::finite(&[Z, Z]), 2).equals(4));
        assert!(index_mod_p(&Spine::finite(&[Q]), 5).equals(1));
        assert!(index_mod_p(&bi_z(), 2).is_infinite());
        assert!(index_mod_p(&sp(r#"[{"LeftRay":"Q"}, "Z"]"#), 3).equals(3));
        assert!(index_mod_p(&Spine::finite(&[ZInv(2), ZLoc(3)]), 3).equals(9));
    }

    #[test]
    fn regularity() {
        for p in [2, 3, 5] {
            assert!(is_p_regular(&Spine::finite(&[Z]), p));
        }
        assert!(!is_p_regular(&Spine::finite(&[Z, Q]), 2));
        assert!(is_p_regular(&Spine::finite(&[Q, Z]), 2));
        assert!(is_p_regular(&Spine::trivial(), 2));
        assert!(!is_p_regular(&left_z(), 2));
        assert!(is_p_regular(&sp(r#"[{"LeftRay":"Q"}, "Z"]"#), 2));
        assert!(!is_p_regular(&sp(r#"["Z", {"RightRay":"Q"}]"#), 2));
        assert!(is_regular(&Spine::finite(&[Q, Q, Z])));
    }

    #[test]
    fn antiregularity() {
        for p in [2, 3, 5, 7] {
            assert!(is_p_antiregular(&bi_z(), p));
            assert!(is_p_antiregular(&left_z(), p));
            assert!(!is_p_antiregular(&Spine::finite(&[Q]), p));
        }
        assert!(is_antiregular(&bi_z()) && is_antiregular(&left_z()));
        assert!(!has_rank1_quotient(&bi_z()) && !has_rank1_quotient(&left_z()));
        assert!(!is_p_antiregular(&Spine::finite(&[Z]), 2));
        assert!(has_rank1_quotient(&Spine::finite(&[Z])));
        assert!(!is_p_antiregular(&Spine::trivial(), 2));
        // ZLoc(3) is 2-divisible, so a line of them is not 2-antiregular
        let loc = sp(r#"[{"LeftRay":{"ZLoc":3}}]"#);
        assert!(is_p_antiregular(&loc, 3) && !is_p_antiregular(&loc, 2));
        assert!(!is_antiregular(&loc));
    }

    #[test]
    fn delta0_examples() {
        let qz = Spine::finite(&[Q, Z]);
        for p in [2, 3, 5] {
            let c = delta0(&qz, p);
            assert!(qz.cuts_equal(c, Cut::AtBoundary(1)).unwrap());
            assert_eq!(qz.quotient_at(c).unwrap(), Spine::finite(&[Q]));
        }
        assert_eq!(delta0(&Spine::finite(&[Z, Q]), 2), Cut::Top);
        let pz = sp(r#"["Q", {"LeftRay":"Z"}]"#);
        let c = delta0(&pz, 2);
        assert_eq!(c, Cut::AtBoundary(1));
        assert_eq!(pz.quotient_at(c).unwrap(), Spine::finite(&[Q]));
        assert_eq!(delta0(&Spine::finite(&[Q, Q]), 2), Cut::Bottom);
    }

    #[test]
    fn delta_gamma_examples() {
        let zz = Spine::finite(&[Z, Z]);
        let g01 = Element::from_ints(&zz, &[0, 1]).unwrap();
        assert_eq!(delta_gamma(&zz, 2, &g01).unwrap(), Cut::AtBoundary(1));
        let z = Spine::finite(&[Z]);
        let one = Element::from_ints(&z, &[1]).unwrap();
        assert_eq!(delta_gamma(&z, 2, &one).unwrap(), Cut::Top);
        let qz = Spine::finite(&[Q, Z]);
        let g = Element::from_ints(&qz, &[0, 1]).unwrap();
        assert_eq!(delta_gamma(&qz, 2, &g).unwrap(), Cut::Top);
        assert_eq!(delta_gamma(&zz, 2, &g01.neg()), Err(OagError::NonPositive));
        assert_eq!(delta_gamma(&zz, 2, &Element::zero()), Err(OagError::ZeroElement));
    }

    #[test]
    fn delta_gamma_on_rays() {
        let lz = left_z();
        let g = Element::unit(Position::new(0, 0), num_rational::BigRational::from_integer(1.into()));
        assert_eq!(delta_gamma(&lz, 2, &g).unwrap(), Cut::Inside(0, 0));
        // a right ray above a divisible block stops the run at its boundary
        let h = sp(r#"[{"RightRay":"Z"}, "Q", "Z"]"#);
        let g = Element::unit(Position::new(2, 0), num_rational::BigRational::from_integer(1.into()));
        assert_eq!(delta_gamma(&h, 2, &g).unwrap(), Cut::AtBoundary(1));
        let h = sp(r#"[{"LeftRay":"Q"}, {"Finite":["Z","Q","Q"]}, "Z"]"#);
        assert_eq!(delta_gamma(&h, 3, &g).unwrap(), Cut::Inside(1, 1));
    }

    #[test]
    fn hulls() {
        let zz = Spine::finite(&[Z, Z]);
        let a = Element::from_ints(&zz, &[0, 5]).unwrap();
        assert_eq!(principal_convex_hull(&zz, &a).unwrap(), Cut::AtBoundary(1));
        assert_eq!(max_convex_avoiding(&zz, &a).unwrap(), Cut::Bottom);
        let b = Element::from_ints(&zz, &[1, 0]).unwrap();
        assert_eq!(principal_convex_hull(&zz, &b).unwrap(), Cut::Top);
        assert_eq!(max_convex_avoiding(&zz, &b).unwrap(), Cut::AtBoundary(1));
        for e in [&a, &b] {
            let hull = zz.quotient_at(principal_convex_hull(&zz, e).unwrap()).unwrap();
            let avoid = zz.quotient_at(max_convex_avoiding(&zz, e).unwrap()).unwrap();
            assert_eq!(avoid.rank().unwrap(), hull.rank().unwrap() + 1);
        }
        assert!(principal_convex_hull(&zz, &Element::zero()).is_err());
    }

    #[test]
    fn equivalence() {
        assert_eq!(
            maybe_equiv(&Spine::finite(&[Z, Q, Q]), &Spine::finite(&[Z, Q])),
            Equivalence::Equivalent
        );
        assert_eq!(maybe_equiv(&bi_z(), &left_z()), Equivalence::Distinct);
        assert!(has_minimal_positive(&left_z()) && !has_minimal_positive(&bi_z()));
        let g = sp(r#"["Z", {"LeftRay":"Q"}, "Q", {"BiInfinite":"Z"}]"#);
        assert_eq!(maybe_equiv(&g, &g), Equivalence::Equivalent);
        assert_eq!(equiv_normalize(&g), sp(r#"["Z", "Q", {"BiInfinite":"Z"}]"#));
        // same invariants, different presentation
        assert_eq!(
            maybe_equiv(&Spine::finite(&[Z, Z]), &Spine::finite(&[Z, Z, Z])),
            Equivalence::Unknown
        );
    }
}
