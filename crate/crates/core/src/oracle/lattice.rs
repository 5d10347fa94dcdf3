//! Integer coordinates for finite `Z`/`Q` spines and an exact test for
//! whether an interval meets a coset of `p` times the group.
//!
//! `Q` coordinates are stored multiplied by `scale = lcm(1..=denom_bound)`,
//! so every box value is an integer and comparisons stay exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::{BoxSpec, OracleError};
use crate::oag::{Component, Element, Position, Spine};

pub(crate) type Pt = Vec<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Kind {
    Z,
    Q,
}

pub(crate) struct Lattice {
    pub kinds: Vec<Kind>,
    pub positions: Vec<Position>,
    pub scale: i64,
    /// Sorted box values per coordinate.
    pub values: Vec<Vec<i64>>,
}

impl Lattice {
    pub fn new(g: &Spine, bx: &BoxSpec) -> Result<Lattice, OracleError> {
        let comps = g.finite_components().ok_or(OracleError::NotFinite)?;
        let positions = g.finite_positions().ok_or(OracleError::NotFinite)?;
        let kinds = comps
            .iter()
            .map(|c| match c {
                Component::Z => Ok(Kind::Z),
                Component::Q => Ok(Kind::Q),
                other => Err(OracleError::UnsupportedComponent(*other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let scale = (1..=i64::from(bx.denom_bound.max(1))).fold(1i64, |acc, d| acc.lcm(&d));
        let r = i64::from(bx.radius);
        let values = kinds
            .iter()
            .map(|k| match k {
                Kind::Z => (-r..=r).collect(),
                Kind::Q => {
                    let mut v: Vec<i64> = (1..=i64::from(bx.denom_bound.max(1)))
                        .flat_map(|d| (-r..=r).map(move |n| n * (scale / d)))
                        .collect();
                    v.sort_unstable();
                    v.dedup();
                    v
                }
            })
            .collect();
        Ok(Lattice {
            kinds,
            positions,
            scale,
            values,
        })
    }

    /// The lattice of the first `k` coordinates (the quotient by the
    /// subgroup of the remaining positions).
    pub fn prefix(&self, k: usize) -> Lattice {
        Lattice {
            kinds: self.kinds[..k].to_vec(),
            positions: self.positions[..k].to_vec(),
            scale: self.scale,
            values: self.values[..k].to_vec(),
        }
    }

    /// The lattice of coordinates `k..`, i.e. the convex subgroup itself.
    pub fn suffix(&self, k: usize) -> Lattice {
        Lattice {
            kinds: self.kinds[k..].to_vec(),
            positions: self.positions[k..].to_vec(),
            scale: self.scale,
            values: self.values[k..].to_vec(),
        }
    }

    pub fn rank(&self) -> usize {
        self.kinds.len()
    }

    pub fn box_len(&self) -> u64 {
        self.values.iter().map(|v| v.len() as u64).product()
    }

    /// Visits the box in increasing lexicographic order until `f` returns false.
    pub fn for_each(&self, mut f: impl FnMut(&[i64]) -> bool) {
        let n = self.rank();
        let mut idx = vec![0usize; n];
        let mut cur: Pt = self.values.iter().map(|v| v[0]).collect();
        loop {
            if !f(&cur) {
                return;
            }
            let mut j = n;
            loop {
                if j == 0 {
                    return;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < self.values[j].len() {
                    cur[j] = self.values[j][idx[j]];
                    break;
                }
                idx[j] = 0;
                cur[j] = self.values[j][0];
            }
        }
    }

    /// Position of `x` in the lexicographic enumeration of the box.
    pub fn index_of(&self, x: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for (vals, v) in self.values.iter().zip(x) {
            idx = idx * vals.len() + vals.binary_search(v).ok()?;
        }
        Some(idx)
    }

    fn coord_in_coset(&self, j: usize, v: i64, r: i64, p: i64) -> bool {
        match self.kinds[j] {
            Kind::Q => true,
            Kind::Z => (v - r).rem_euclid(p) == 0,
        }
    }

    pub fn in_coset(&self, x: &[i64], r: &[i64], p: i64) -> bool {
        (0..self.rank()).all(|j| self.coord_in_coset(j, x[j], r[j], p))
    }

    pub fn is_p_multiple(&self, x: &[i64], p: i64) -> bool {
        (0..self.rank()).all(|j| self.coord_in_coset(j, x[j], 0, p))
    }

    /// Representatives of the group modulo `p` times the group.
    pub fn residues(&self, p: i64) -> Vec<Pt> {
        let mut out: Vec<Pt> = vec![Vec::new()];
        for k in &self.kinds {
            let range: Vec<i64> = match k {
                Kind::Z => (0..p).collect(),
                Kind::Q => vec![0],
            };
            out = out
                .into_iter()
                .flat_map(|pre| {
                    range.iter().map(move |&t| {
                        let mut v = pre.clone();
                        v.push(t);
                        v
                    })
                })
                .collect();
        }
        out
    }

    /// Whether some group element `x` (not just a box element) with
    /// `lo <= x <= hi` (strict where not closed) lies in `r + pG`.
    pub fn meets(&self, lo: &[i64], lo_closed: bool, hi: &[i64], hi_closed: bool, r: &[i64], p: i64) -> bool {
        let n = self.rank();
        let Some(i) = (0..n).find(|&i| lo[i] != hi[i]) else {
            return lo_closed && hi_closed && self.in_coset(lo, r, p);
        };
        if lo[i] > hi[i] {
            return false;
        }
        if !(0..i).all(|j| self.coord_in_coset(j, lo[j], r[j], p)) {
            return false;
        }
        // strictly between at coordinate i, tail unconstrained
        match self.kinds[i] {
            Kind::Q => return true,
            Kind::Z => {
                let t = lo[i] + 1 + (r[i] - lo[i] - 1).rem_euclid(p);
                if t < hi[i] {
                    return true;
                }
            }
        }
        // equal to an endpoint at coordinate i: with a tail left, a large
        // tail coordinate of the right class moves strictly inside
        let has_tail = i + 1 < n;
        let via_lo = self.coord_in_coset(i, lo[i], r[i], p) && (has_tail || (lo_closed && self.in_coset(lo, r, p)));
        let via_hi = self.coord_in_coset(i, hi[i], r[i], p) && (has_tail || (hi_closed && self.in_coset(hi, r, p)));
        via_lo || via_hi
    }

    pub fn to_element(&self, x: &[i64]) -> Element {
        let mut e = Element::zero();
        for (j, (&v, pos)) in x.iter().zip(&self.positions).enumerate() {
            let q = match self.kinds[j] {
                Kind::Z => BigRational::from_integer(v.into()),
                Kind::Q => BigRational::new(v.into(), self.scale.into()),
            };
            e = e.add(&Element::unit(*pos, q));
        }
        e
    }

    pub fn from_element(&self, e: &Element) -> Result<Pt, OracleError> {
        self.positions
            .iter()
            .enumerate()
            .map(|(j, pos)| {
                let v = e.coord(*pos);
                let scaled = match self.kinds[j] {
                    Kind::Z => v,
                    Kind::Q => v * BigRational::from_integer(BigInt::from(self.scale)),
                };
                if !scaled.is_integer() {
                    return Err(OracleError::OffGrid(e.to_string()));
                }
                scaled.to_integer().to_i64().ok_or_else(|| OracleError::OffGrid(e.to_string()))
            })
            .collect()
    }
}

pub(crate) fn sign(x: &[i64]) -> std::cmp::Ordering {
    x.iter().find(|v| **v != 0).map_or(std::cmp::Ordering::Equal, |v| v.cmp(&0))
}

pub(crate) fn times(x: &[i64], c: i64) -> Pt {
    x.iter().map(|v| v * c).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oag::Component::{Q, Z};

    fn lat(comps: &[Component]) -> Lattice {
        Lattice::new(
            &Spine::finite(comps),
            &BoxSpec {
                radius: 3,
                denom_bound: 2,
            },
        )
        .unwrap()
    }

    #[test]
    fn box_is_sorted_and_complete() {
        let l = lat(&[Z, Q]);
        let mut all = Vec::new();
        l.for_each(|x| {
            all.push(x.to_vec());
            true
        });
        assert_eq!(all.len() as u64, l.box_len());
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        // Q values n/d with |n| <= 3, d <= 2, scaled by 2
        assert_eq!(l.values[1], vec![-6, -4, -3, -2, -1, 0, 1, 2, 3, 4, 6]);
    }

    #[test]
    fn interval_meets_coset() {
        let l = lat(&[Z, Z]);
        // [(1,0), (1,2)] contains no element of 2G
        assert!(!l.meets(&[1, 0], true, &[1, 2], true, &[0, 0], 2));
        assert!(l.meets(&[1, 0], true, &[1, 2], true, &[1, 1], 2));
        // [(0,0), (2,0)] reaches every class through (1, t)
        for r in l.residues(2) {
            assert!(l.meets(&[0, 0], true, &[2, 0], true, &r, 2));
        }
        assert!(!l.meets(&[0, 0], false, &[0, 1], false, &[0, 0], 2));
        assert!(l.meets(&[0, 0], false, &[1, 0], false, &[0, 0], 2));
        let q = lat(&[Q, Z]);
        assert!(q.meets(&[0, 5], false, &[1, 0], false, &[0, 0], 3));
    }

    #[test]
    fn element_round_trip() {
        let l = lat(&[Z, Q]);
        let e = l.to_element(&[2, -3]);
        assert_eq!(e.to_string(), "{0:0 -> 2, 1:0 -> -3/2}");
        assert_eq!(l.from_element(&e).unwrap(), vec![2, -3]);
    }
}
