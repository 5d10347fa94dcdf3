use std::fmt;

use serde::{Deserialize, Serialize};

use super::component::{smallest_prime_outside, Component};
use super::OagError;

/// A block of consecutive positions in the index order of a spine.
///
/// Offsets within a segment: `Finite(cs)` uses `0..cs.len()`, `RightRay`
/// uses `0, 1, 2, ...`, `LeftRay` uses `..., -2, -1, 0`, and `BiInfinite`
/// uses every integer. Smaller offsets are more significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SegmentRepr", into = "SegmentRepr")]
pub enum Segment {
    Finite(Vec<Component>),
    RightRay(Component),
    LeftRay(Component),
    BiInfinite(Component),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SegmentRepr {
    Single(Component),
    Tagged(TaggedSegment),
}

#[derive(Serialize, Deserialize)]
enum TaggedSegment {
    Finite(Vec<Component>),
    RightRay(Component),
    LeftRay(Component),
    BiInfinite(Component),
}

impl TryFrom<SegmentRepr> for Segment {
    type Error = String;

    fn try_from(repr: SegmentRepr) -> Result<Self, Self::Error> {
        Ok(match repr {
            SegmentRepr::Single(c) => Segment::Finite(vec![c]),
            SegmentRepr::Tagged(TaggedSegment::Finite(cs)) => {
                if cs.is_empty() {
                    return Err("finite segment must be non-empty".into());
                }
                Segment::Finite(cs)
            }
            SegmentRepr::Tagged(TaggedSegment::RightRay(c)) => Segment::RightRay(c),
            SegmentRepr::Tagged(TaggedSegment::LeftRay(c)) => Segment::LeftRay(c),
            SegmentRepr::Tagged(TaggedSegment::BiInfinite(c)) => Segment::BiInfinite(c),
        })
    }
}

impl From<Segment> for SegmentRepr {
    fn from(s: Segment) -> Self {
        match s {
            Segment::Finite(cs) if cs.len() == 1 => SegmentRepr::Single(cs[0]),
            Segment::Finite(cs) => SegmentRepr::Tagged(TaggedSegment::Finite(cs)),
            Segment::RightRay(c) => SegmentRepr::Tagged(TaggedSegment::RightRay(c)),
            Segment::LeftRay(c) => SegmentRepr::Tagged(TaggedSegment::LeftRay(c)),
            Segment::BiInfinite(c) => SegmentRepr::Tagged(TaggedSegment::BiInfinite(c)),
        }
    }
}

impl Segment {
    pub fn single(c: Component) -> Self {
        Segment::Finite(vec![c])
    }

    /// Number of positions, `None` for the three infinite order types.
    pub fn len(&self) -> Option<usize> {
        match self {
            Segment::Finite(cs) => Some(cs.len()),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Segment::Finite(_))
    }

    pub fn min_offset(&self) -> Option<i64> {
        match self {
            Segment::Finite(_) | Segment::RightRay(_) => Some(0),
            Segment::LeftRay(_) | Segment::BiInfinite(_) => None,
        }
    }

    pub fn max_offset(&self) -> Option<i64> {
        match self {
            Segment::Finite(cs) => Some(cs.len() as i64 - 1),
            Segment::LeftRay(_) => Some(0),
            Segment::RightRay(_) | Segment::BiInfinite(_) => None,
        }
    }

    pub fn contains_offset(&self, k: i64) -> bool {
        self.min_offset().map_or(true, |m| k >= m) && self.max_offset().map_or(true, |m| k <= m)
    }

    /// Component at an offset; the caller checks the offset is in range.
    pub fn component(&self, k: i64) -> Component {
        match self {
            Segment::Finite(cs) => cs[k as usize],
            Segment::RightRay(c) | Segment::LeftRay(c) | Segment::BiInfinite(c) => *c,
        }
    }

    /// The distinct components occurring in the segment.
    pub fn components(&self) -> Vec<Component> {
        match self {
            Segment::Finite(cs) => cs.clone(),
            Segment::RightRay(c) | Segment::LeftRay(c) | Segment::BiInfinite(c) => vec![*c],
        }
    }

    fn uniform(&self) -> Option<Component> {
        match self {
            Segment::Finite(_) => None,
            Segment::RightRay(c) | Segment::LeftRay(c) | Segment::BiInfinite(c) => Some(*c),
        }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Segment::Finite(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
            Segment::RightRay(c) => write!(f, "RightRay({c})"),
            Segment::LeftRay(c) => write!(f, "LeftRay({c})"),
            Segment::BiInfinite(c) => write!(f, "BiInfinite({c})"),
        }
    }
}

/// A position of the index order: segment index plus offset in the segment.
/// The derived order is the significance order (smaller is more significant).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Position {
    pub seg: usize,
    pub offset: i64,
}

impl Position {
    pub fn new(seg: usize, offset: i64) -> Self {
        Position { seg, offset }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.seg, self.offset)
    }
}

/// An ordered abelian group presented as a lexicographic sum of archimedean
/// components. The leftmost position is the most significant; the empty
/// spine is the trivial group.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Spine {
    segments: Vec<Segment>,
}

/// A convex subgroup of a spine, named by where its (final) run of
/// positions begins.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cut {
    /// The whole group.
    Top,
    /// The trivial subgroup.
    Bottom,
    /// Every position in segments `>= s`.
    AtBoundary(usize),
    /// Positions `(s, k')` with `k' >= k`, plus all later segments.
    Inside(usize, i64),
}

/// Totally ordered normal form of a cut: a larger key is a smaller subgroup.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CutKey {
    seg: usize,
    start: Option<i64>,
}

impl Spine {
    pub fn new(segments: Vec<Segment>) -> Result<Self, OagError> {
        if segments.iter().any(|s| s.len() == Some(0)) {
            return Err(OagError::EmptySegment);
        }
        Ok(Spine { segments })
    }

    pub fn trivial() -> Self {
        Spine::default()
    }

    /// A spine of single-component finite segments.
    pub fn finite(components: &[Component]) -> Self {
        Spine {
            segments: components.iter().map(|&c| Segment::single(c)).collect(),
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_trivial(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.segments.iter().all(Segment::is_finite)
    }

    /// Archimedean rank, `None` when the index order is infinite.
    pub fn rank(&self) -> Option<usize> {
        self.segments.iter().map(Segment::len).sum()
    }

    /// Concatenation: `self` is more significant than `other`.
    pub fn concat(&self, other: &Spine) -> Spine {
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().cloned());
        Spine { segments }
    }

    pub fn contains_position(&self, pos: Position) -> bool {
        self.segments
            .get(pos.seg)
            .is_some_and(|s| s.contains_offset(pos.offset))
    }

    pub fn component_at(&self, pos: Position) -> Result<Component, OagError> {
        if !self.contains_position(pos) {
            return Err(OagError::NoSuchPosition(pos));
        }
        Ok(self.segments[pos.seg].component(pos.offset))
    }

    /// Positions of a finite spine in significance order.
    pub fn finite_positions(&self) -> Option<Vec<Position>> {
        if !self.is_finite() {
            return None;
        }
        let mut out = Vec::new();
        for (s, seg) in self.segments.iter().enumerate() {
            for k in 0..seg.len().unwrap() as i64 {
                out.push(Position::new(s, k));
            }
        }
        Some(out)
    }

    /// Components of a finite spine in significance order.
    pub fn finite_components(&self) -> Option<Vec<Component>> {
        if !self.is_finite() {
            return None;
        }
        Some(self.segments.iter().flat_map(Segment::components).collect())
    }

    /// The most significant position, if the index order has a minimum.
    pub fn first_position(&self) -> Option<Position> {
        let seg = self.segments.first()?;
        seg.min_offset().map(|k| Position::new(0, k))
    }

    /// The least significant position, if the index order has a maximum.
    pub fn last_position(&self) -> Option<Position> {
        let s = self.segments.len().checked_sub(1)?;
        self.segments[s].max_offset().map(|k| Position::new(s, k))
    }

    /// Every distinct component kind that occurs.
    pub fn component_kinds(&self) -> Vec<Component> {
        let mut out: Vec<Component> = self.segments.iter().flat_map(Segment::components).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Primes for which checking `p` suffices to decide a "for all primes"
    /// predicate: every prime named by a component, plus one prime named by
    /// none (all unnamed primes behave identically on every component).
    pub fn representative_primes(&self) -> Vec<u32> {
        let mut named: Vec<u32> = self.component_kinds().iter().filter_map(|c| c.prime()).collect();
        named.sort();
        named.dedup();
        let generic = smallest_prime_outside(&named);
        named.push(generic);
        named.sort();
        named
    }

    // ---- cuts ----

    /// Validates a cut and returns its normal form: boundary-equivalent
    /// `Inside` cuts become `AtBoundary`, and `AtBoundary` at either end
    /// becomes `Top` / `Bottom`.
    pub fn normalize_cut(&self, cut: Cut) -> Result<Cut, OagError> {
        let n = self.segments.len();
        let boundary = |s: usize| {
            if s == 0 {
                Cut::Top
            } else if s == n {
                Cut::Bottom
            } else {
                Cut::AtBoundary(s)
            }
        };
        match cut {
            Cut::Top => Ok(if n == 0 { Cut::Bottom } else { Cut::Top }),
            Cut::Bottom => Ok(Cut::Bottom),
            Cut::AtBoundary(s) if s <= n => Ok(boundary(s)),
            Cut::AtBoundary(_) => Err(OagError::IllegalCut(cut)),
            Cut::Inside(s, k) => {
                let seg = self.segments.get(s).ok_or(OagError::IllegalCut(cut))?;
                match seg {
                    Segment::Finite(cs) => {
                        let len = cs.len() as i64;
                        match k {
                            0 => Ok(boundary(s)),
                            k if k == len => Ok(boundary(s + 1)),
                            k if k > 0 && k < len => Ok(cut),
                            _ => Err(OagError::IllegalCut(cut)),
                        }
                    }
                    Segment::RightRay(_) => match k {
                        0 => Ok(boundary(s)),
                        k if k > 0 => Ok(cut),
                        _ => Err(OagError::IllegalCut(cut)),
                    },
                    Segment::LeftRay(_) => match k {
                        1 => Ok(boundary(s + 1)),
                        k if k <= 0 => Ok(cut),
                        _ => Err(OagError::IllegalCut(cut)),
                    },
                    Segment::BiInfinite(_) => Ok(cut),
                }
            }
        }
    }

    pub fn cut_key(&self, cut: Cut) -> Result<CutKey, OagError> {
        Ok(match self.normalize_cut(cut)? {
            Cut::Top => CutKey { seg: 0, start: None },
            Cut::Bottom => CutKey {
                seg: self.segments.len(),
                start: None,
            },
            Cut::AtBoundary(s) => CutKey { seg: s, start: None },
            Cut::Inside(s, k) => CutKey { seg: s, start: Some(k) },
        })
    }

    /// Whether the subgroup of `outer` contains the subgroup of `inner`.
    pub fn cut_contains(&self, outer: Cut, inner: Cut) -> Result<bool, OagError> {
        Ok(self.cut_key(outer)? <= self.cut_key(inner)?)
    }

    pub fn cuts_equal(&self, a: Cut, b: Cut) -> Result<bool, OagError> {
        Ok(self.cut_key(a)? == self.cut_key(b)?)
    }

    /// Whether a position lies in the convex subgroup described by `cut`.
    pub fn cut_contains_position(&self, cut: Cut, pos: Position) -> Result<bool, OagError> {
        let key = self.cut_key(cut)?;
        Ok(match key.start {
            None => pos.seg >= key.seg,
            Some(k) => pos.seg > key.seg || (pos.seg == key.seg && pos.offset >= k),
        })
    }

    /// The cut whose subgroup consists of the positions `>= pos`.
    pub fn cut_from(&self, pos: Position) -> Result<Cut, OagError> {
        if !self.contains_position(pos) {
            return Err(OagError::NoSuchPosition(pos));
        }
        self.normalize_cut(Cut::Inside(pos.seg, pos.offset))
    }

    /// The cut whose subgroup consists of the positions `> pos`.
    pub fn cut_after(&self, pos: Position) -> Result<Cut, OagError> {
        if !self.contains_position(pos) {
            return Err(OagError::NoSuchPosition(pos));
        }
        self.normalize_cut(Cut::Inside(pos.seg, pos.offset + 1))
    }

    /// Every cut of a finite spine, from `Top` down to `Bottom`.
    pub fn finite_cuts(&self) -> Option<Vec<Cut>> {
        let positions = self.finite_positions()?;
        let mut cuts = Vec::with_capacity(positions.len() + 1);
        for p in positions {
            cuts.push(self.cut_from(p).ok()?);
        }
        cuts.push(Cut::Bottom);
        if self.is_trivial() {
            cuts = vec![Cut::Bottom];
        }
        Some(cuts)
    }

    /// The convex subgroup at `cut`, as a spine of its own (a final segment
    /// of the index order).
    pub fn subgroup_at(&self, cut: Cut) -> Result<Spine, OagError> {
        let key = self.cut_key(cut)?;
        let mut segments = Vec::new();
        if key.seg < self.segments.len() {
            let seg = &self.segments[key.seg];
            match key.start {
                None => segments.push(seg.clone()),
                Some(k) => segments.push(suffix(seg, k)),
            }
            segments.extend(self.segments[key.seg + 1..].iter().cloned());
        }
        Ok(Spine { segments })
    }

    /// The quotient by the convex subgroup at `cut` (an initial segment).
    pub fn quotient_at(&self, cut: Cut) -> Result<Spine, OagError> {
        let key = self.cut_key(cut)?;
        let mut segments: Vec<Segment> = self.segments[..key.seg].to_vec();
        if let Some(k) = key.start {
            segments.push(prefix(&self.segments[key.seg], k));
        }
        Ok(Spine { segments })
    }
}

impl Spine {
    /// Translates a cut of `self.quotient_at(cut)` into the matching cut of
    /// `self`.
    pub fn lift_quotient_cut(&self, cut: Cut, qcut: Cut) -> Result<Cut, OagError> {
        let key = self.cut_key(cut)?;
        let q = self.quotient_at(cut)?;
        let qkey = q.cut_key(qcut)?;
        if qkey.seg == q.segments.len() {
            return self.normalize_cut(cut);
        }
        match qkey.start {
            Some(k2) if Some(qkey.seg) == key.start.map(|_| key.seg) => {
                // a truncated ray is renumbered so that its last offset is 0
                let shift = match (&self.segments[key.seg], key.start) {
                    (Segment::LeftRay(_) | Segment::BiInfinite(_), Some(k)) => k - 1,
                    _ => 0,
                };
                self.normalize_cut(Cut::Inside(qkey.seg, k2 + shift))
            }
            Some(k2) => self.normalize_cut(Cut::Inside(qkey.seg, k2)),
            None => self.normalize_cut(Cut::AtBoundary(qkey.seg)),
        }
    }
}

/// Positions `>= k` of a segment, for a normalized inside offset `k`.
fn suffix(seg: &Segment, k: i64) -> Segment {
    match seg {
        Segment::Finite(cs) => Segment::Finite(cs[k as usize..].to_vec()),
        Segment::RightRay(c) | Segment::BiInfinite(c) => Segment::RightRay(*c),
        Segment::LeftRay(c) => Segment::Finite(vec![*c; (1 - k) as usize]),
    }
}

/// Positions `< k` of a segment, for a normalized inside offset `k`.
fn prefix(seg: &Segment, k: i64) -> Segment {
    match seg {
        Segment::Finite(cs) => Segment::Finite(cs[..k as usize].to_vec()),
        Segment::RightRay(c) => Segment::Finite(vec![*c; k as usize]),
        Segment::LeftRay(c) | Segment::BiInfinite(c) => Segment::LeftRay(*c),
    }
}

impl Segment {
    pub(crate) fn uniform_component(&self) -> Option<Component> {
        self.uniform()
    }
}

impl fmt::Display for Spine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "]")
    }
}

impl std::str::FromStr for Spine {
    type Err = OagError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_str(s).map_err(|e| OagError::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Component::*;

    fn sp(json: &str) -> Spine {
        json.parse().unwrap()
    }

    #[test]
    fn lifting_quotient_cuts() {
        let g = sp(r#"["Z", {"BiInfinite":"Z"}]"#);
        let cut = Cut::Inside(1, 3);
        let q = g.quotient_at(cut).unwrap();
        assert_eq!(q, sp(r#"["Z", {"LeftRay":"Z"}]"#));
        // offset 0 of the quotient ray is offset 2 of the original
        assert_eq!(g.lift_quotient_cut(cut, Cut::Inside(1, 0)).unwrap(), Cut::Inside(1, 2));
        assert_eq!(g.lift_quotient_cut(cut, Cut::AtBoundary(1)).unwrap(), Cut::AtBoundary(1));
        assert_eq!(g.lift_quotient_cut(cut, Cut::Bottom).unwrap(), cut);
        assert_eq!(g.lift_quotient_cut(cut, Cut::Top).unwrap(), Cut::Top);
        let f = sp(r#"[{"Finite":["Z","Q","Z"]}]"#);
        assert_eq!(f.lift_quotient_cut(Cut::Inside(0, 2), Cut::Inside(0, 1)).unwrap(), Cut::Inside(0, 1));
    }

    #[test]
    fn json_forms() {
        let g = sp(r#"["Z", {"LeftRay":"Z"}, {"Finite":["Q","Z"]}, {"ZLoc":3}]"#);
        assert_eq!(g.segments().len(), 4);
        assert_eq!(g.segments()[1], Segment::LeftRay(Z));
        assert_eq!(g.segments()[3], Segment::single(ZLoc(3)));
        let back = serde_json::to_string(&g).unwrap();
        assert_eq!(back, r#"["Z",{"LeftRay":"Z"},{"Finite":["Q","Z"]},{"ZLoc":3}]"#);
        assert!(r#"[{"Finite":[]}]"#.parse::<Spine>().is_err());
    }

    #[test]
    fn subgroup_and_quotient_of_example_group() {
        let g = Spine::finite(&[Z, Q]);
        assert_eq!(g.subgroup_at(Cut::AtBoundary(1)).unwrap(), Spine::finite(&[Q]));
        assert_eq!(g.quotient_at(Cut::AtBoundary(1)).unwrap(), Spine::finite(&[Z]));
        assert_eq!(g.subgroup_at(Cut::Top).unwrap(), g);
        assert!(g.quotient_at(Cut::Top).unwrap().is_trivial());
        assert!(g.subgroup_at(Cut::Bottom).unwrap().is_trivial());
    }

    #[test]
    fn biinfinite_quotients_are_left_rays() {
        let g = sp(r#"[{"BiInfinite":"Z"}]"#);
        for k in [-3, 0, 7] {
            let q = g.quotient_at(Cut::Inside(0, k)).unwrap();
            assert_eq!(q, Spine::new(vec![Segment::LeftRay(Z)]).unwrap());
            let s = g.subgroup_at(Cut::Inside(0, k)).unwrap();
            assert_eq!(s, Spine::new(vec![Segment::RightRay(Z)]).unwrap());
        }
    }

    #[test]
    fn cut_normalization() {
        let g = sp(r#"[{"Finite":["Z","Q","Z"]}, {"LeftRay":"Z"}, {"RightRay":"Q"}]"#);
        assert_eq!(g.normalize_cut(Cut::Inside(0, 0)).unwrap(), Cut::Top);
        assert_eq!(g.normalize_cut(Cut::Inside(0, 3)).unwrap(), Cut::AtBoundary(1));
        assert_eq!(g.normalize_cut(Cut::Inside(1, 1)).unwrap(), Cut::AtBoundary(2));
        assert_eq!(g.normalize_cut(Cut::Inside(2, 0)).unwrap(), Cut::AtBoundary(2));
        assert_eq!(g.normalize_cut(Cut::AtBoundary(3)).unwrap(), Cut::Bottom);
        assert!(g.normalize_cut(Cut::Inside(0, 4)).is_err());
        assert!(g.normalize_cut(Cut::Inside(1, 2)).is_err());
        assert!(g.normalize_cut(Cut::Inside(2, -1)).is_err());
        assert!(g.normalize_cut(Cut::AtBoundary(4)).is_err());
        assert!(g.cut_contains(Cut::Inside(1, -5), Cut::Inside(1, 0)).unwrap());
        assert!(!g.cut_contains(Cut::Inside(2, 4), Cut::AtBoundary(2)).unwrap());
    }

    #[test]
    fn left_ray_pieces() {
        let g = sp(r#"[{"LeftRay":"Z"}]"#);
        let s = g.subgroup_at(Cut::Inside(0, -2)).unwrap();
        assert_eq!(s, Spine::finite(&[Z, Z, Z]).concat(&Spine::trivial()).clone().segments_as_one());
        let q = g.quotient_at(Cut::Inside(0, -2)).unwrap();
        assert_eq!(q.segments(), &[Segment::LeftRay(Z)]);
    }

    impl Spine {
        fn segments_as_one(&self) -> Spine {
            Spine {
                segments: vec![Segment::Finite(self.finite_components().unwrap())],
            }
        }
    }

    #[test]
    fn finite_cut_enumeration() {
        assert_eq!(Spine::finite(&[Z, Q]).finite_cuts().unwrap().len(), 3);
        assert_eq!(Spine::finite(&[Z, Z, Z]).finite_cuts().unwrap().len(), 4);
        assert!(sp(r#"[{"LeftRay":"Z"}]"#).finite_cuts().is_none());
    }

    #[test]
    fn representative_primes() {
        assert_eq!(Spine::finite(&[Z, Q]).representative_primes(), vec![2]);
        assert_eq!(Spine::finite(&[ZLoc(2), ZInv(3)]).representative_primes(), vec![2, 3, 5]);
    }
}
