use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::spine::{Position, Spine};
use super::OagError;

/// A group element: finitely many nonzero coordinates, each legal for the
/// component at its position.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<CoordRepr>", into = "Vec<CoordRepr>")]
pub struct Element {
    support: BTreeMap<Position, BigRational>,
}

#[derive(Serialize, Deserialize)]
struct CoordRepr {
    seg: usize,
    offset: i64,
    value: String,
}

impl TryFrom<Vec<CoordRepr>> for Element {
    type Error = String;

    fn try_from(coords: Vec<CoordRepr>) -> Result<Self, Self::Error> {
        let mut e = Element::zero();
        for c in coords {
            let v = parse_rational(&c.value).ok_or_else(|| format!("bad rational {:?}", c.value))?;
            e.set(Position::new(c.seg, c.offset), v);
        }
        Ok(e)
    }
}

impl From<Element> for Vec<CoordRepr> {
    fn from(e: Element) -> Self {
        e.support
            .into_iter()
            .map(|(p, v)| CoordRepr {
                seg: p.seg,
                offset: p.offset,
                value: v.to_string(),
            })
            .collect()
    }
}

pub(crate) fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n.trim().parse().ok()?, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    /// The element with a single coordinate.
    pub fn unit(pos: Position, value: impl Into<BigRational>) -> Self {
        let mut e = Element::zero();
        e.set(pos, value.into());
        e
    }

    /// Builds an element of a finite spine from one coordinate per position.
    pub fn from_coords(g: &Spine, coords: &[BigRational]) -> Result<Self, OagError> {
        let positions = g.finite_positions().ok_or(OagError::NotFinite)?;
        if positions.len() != coords.len() {
            return Err(OagError::ArityMismatch {
                expected: positions.len(),
                got: coords.len(),
            });
        }
        let mut e = Element::zero();
        for (p, v) in positions.into_iter().zip(coords) {
            e.set(p, v.clone());
        }
        e.check_on(g)?;
        Ok(e)
    }

    pub fn from_ints(g: &Spine, coords: &[i64]) -> Result<Self, OagError> {
        let coords: Vec<BigRational> = coords.iter().map(|&c| BigRational::from_integer(c.into())).collect();
        Element::from_coords(g, &coords)
    }

    fn set(&mut self, pos: Position, value: BigRational) {
        if value.is_zero() {
            self.support.remove(&pos);
        } else {
            self.support.insert(pos, value);
        }
    }

    pub fn support(&self) -> &BTreeMap<Position, BigRational> {
        &self.support
    }

    pub fn coord(&self, pos: Position) -> BigRational {
        self.support.get(&pos).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    /// The most significant position with a nonzero coordinate.
    pub fn leading_position(&self) -> Option<Position> {
        self.support.keys().next().copied()
    }

    /// Sign of the most significant nonzero coordinate.
    pub fn signum(&self) -> Ordering {
        match self.support.values().next() {
            None => Ordering::Equal,
            Some(v) if v.is_positive() => Ordering::Greater,
            Some(_) => Ordering::Less,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    /// Checks every coordinate sits at a position of `g` and is legal for
    /// the component there.
    pub fn check_on(&self, g: &Spine) -> Result<(), OagError> {
        for (pos, v) in &self.support {
            let c = g.component_at(*pos)?;
            if !c.admits(v) {
                return Err(OagError::IllegalCoordinate {
                    pos: *pos,
                    value: v.to_string(),
                    component: c,
                });
            }
        }
        Ok(())
    }

    pub fn neg(&self) -> Element {
        Element {
            support: self.support.iter().map(|(p, v)| (*p, -v)).collect(),
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (p, v) in &other.support {
            let sum = out.coord(*p) + v;
            out.set(*p, sum);
        }
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.add(&other.neg())
    }

    pub fn scale(&self, n: i64) -> Element {
        let n = BigRational::from_integer(n.into());
        let mut out = Element::zero();
        for (p, v) in &self.support {
            out.set(*p, v * &n);
        }
        out
    }

    pub fn abs(&self) -> Element {
        if self.signum() == Ordering::Less {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Whether the element lies in `p` times the group.
    pub fn is_p_multiple(&self, g: &Spine, p: u32) -> Result<bool, OagError> {
        for (pos, v) in &self.support {
            if !g.component_at(*pos)?.admits_multiple(p, v) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Lexicographic comparison, most significant position first.
    pub fn lex_cmp(&self, other: &Element) -> Ordering {
        self.sub(other).signum()
    }
}

/// Compares two elements of the same spine.
pub fn element_cmp(g: &Spine, a: &Element, b: &Element) -> Result<Ordering, OagError> {
    a.check_on(g)?;
    b.check_on(g)?;
    Ok(a.lex_cmp(b))
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.support.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{{")?;
        for (i, (p, v)) in self.support.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p} -> {v}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oag::Component::*;

    #[test]
    fn comparisons() {
        let g = Spine::finite(&[Z, Q]);
        let a = Element::from_ints(&g, &[1, 0]).unwrap();
        let b = Element::from_ints(&g, &[0, 100]).unwrap();
        assert_eq!(element_cmp(&g, &a, &b).unwrap(), Ordering::Greater);
        assert_eq!(element_cmp(&g, &a, &a).unwrap(), Ordering::Equal);
        let h = Spine::finite(&[Z, Z]);
        let c = Element::from_ints(&h, &[0, -3]).unwrap();
        let d = Element::from_ints(&h, &[0, -5]).unwrap();
        assert_eq!(element_cmp(&h, &c, &d).unwrap(), Ordering::Greater);
    }

    #[test]
    fn mismatched_spine_is_rejected() {
        let g = Spine::finite(&[Z, Q]);
        let h = Spine::finite(&[Z]);
        let a = Element::from_ints(&g, &[1, 1]).unwrap();
        assert!(element_cmp(&h, &a, &a).is_err());
        let half = BigRational::new(1.into(), 2.into());
        let z = BigRational::zero();
        assert!(Element::from_coords(&g, &[half, z]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = Spine::finite(&[Z, Q]);
        let a = Element::from_coords(&g, &[BigRational::from_integer(2.into()), BigRational::new((-1).into(), 3.into())]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"[{"seg":0,"offset":0,"value":"2"},{"seg":1,"offset":0,"value":"-1/3"}]"#);
        let back: Element = serde_json::from_str(&s).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn abs_and_multiples() {
        let g = Spine::finite(&[Z, Z]);
        let a = Element::from_ints(&g, &[-1, 4]).unwrap();
        assert_eq!(a.abs(), Element::from_ints(&g, &[1, -4]).unwrap());
        assert!(!a.is_p_multiple(&g, 2).unwrap());
        assert!(a.scale(2).is_p_multiple(&g, 2).unwrap());
    }
}
