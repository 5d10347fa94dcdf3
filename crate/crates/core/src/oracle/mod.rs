//! Brute-force reference procedures over lattice boxes of finite `Z`/`Q`
//! spines, independent of the structural rules in [`crate::oag`].
//!
//! Universal quantifiers over group elements range over the box ("in-box"
//! truth). Inner quantifiers over intervals are decided exactly over the
//! whole group by [`lattice::Lattice::meets`], so a reported counterexample
//! is a genuine one.

mod lattice;
mod suite;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::oag::{Component, Cut, Element, OagError, Spine};
use lattice::{times, Lattice};

pub use suite::{agreement_suite, random_case, Case, Disagreement, SuiteConfig, SuiteReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("the oracle needs a spine with finitely many positions")]
    NotFinite,
    #[error("the oracle supports only Z and Q components, found {0}")]
    UnsupportedComponent(Component),
    #[error("box radius {radius} is below 2p+2 = {needed} for p = {p}")]
    RadiusTooSmall { radius: u32, p: u32, needed: u32 },
    #[error("element {0} is not on the box grid")]
    OffGrid(String),
    #[error("gamma must be positive")]
    NonPositive,
    #[error(transparent)]
    Group(#[from] OagError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxSpec {
    /// Bound on `|coordinate|` for `Z` and on `|numerator|` for `Q`.
    pub radius: u32,
    /// Largest denominator of `Q` coordinates.
    pub denom_bound: u32,
}

impl BoxSpec {
    /// The smallest box considered adequate for `p`.
    pub fn for_prime(p: u32, denom_bound: u32) -> BoxSpec {
        BoxSpec {
            radius: 2 * p + 2,
            denom_bound,
        }
    }

    pub fn check(&self, p: u32) -> Result<(), OracleError> {
        let needed = 2 * p + 2;
        if self.radius < needed {
            return Err(OracleError::RadiusTooSmall {
                radius: self.radius,
                p,
                needed,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum BruteOutcome {
    TrueInBox,
    /// A definitive refutation, with the elements that witness it.
    Counterexample { elements: Vec<Element> },
}

impl BruteOutcome {
    pub fn holds_in_box(&self) -> bool {
        matches!(self, BruteOutcome::TrueInBox)
    }
}

/// Searches the box for `g0 < ... < gp` with no element of `pG` in
/// `[g0, gp]`. It suffices to test `p + 1` consecutive box elements: any
/// longer chain's interval contains such a window.
pub fn bf_is_p_regular(g: &Spine, p: u32, bx: &BoxSpec) -> Result<BruteOutcome, OracleError> {
    bx.check(p)?;
    let lat = Lattice::new(g, bx)?;
    let n = lat.rank();
    let w = p as usize + 1;
    let pi = i64::from(p);
    let zero = vec![0i64; n];
    let mut ring = vec![0i64; w * n];
    let mut seen = 0usize;
    let mut found = None;
    lat.for_each(|x| {
        let slot = seen % w;
        ring[slot * n..(slot + 1) * n].copy_from_slice(x);
        seen += 1;
        if seen >= w {
            let first = (seen - w) % w;
            let a = &ring[first * n..(first + 1) * n];
            if !lat.meets(a, true, x, true, &zero, pi) {
                let chain = (0..w)
                    .map(|k| {
                        let s = (seen - w + k) % w;
                        lat.to_element(&ring[s * n..(s + 1) * n])
                    })
                    .collect();
                found = Some(chain);
                return false;
            }
        }
        true
    });
    Ok(match found {
        Some(elements) => BruteOutcome::Counterexample { elements },
        None => BruteOutcome::TrueInBox,
    })
}

/// Searches the box for `g` such that every class modulo `pG` meets
/// `[-p|g|, p|g|]`, refuting the antiregularity sentence.
pub fn bf_is_p_antiregular(g: &Spine, p: u32, bx: &BoxSpec) -> Result<BruteOutcome, OracleError> {
    bx.check(p)?;
    let lat = Lattice::new(g, bx)?;
    let pi = i64::from(p);
    let residues = lat.residues(pi);
    let mut found = None;
    let (mut lo, mut hi) = (vec![0i64; lat.rank()], vec![0i64; lat.rank()]);
    lat.for_each(|x| {
        scaled_abs_into(x, pi, &mut hi);
        scaled_abs_into(x, -pi, &mut lo);
        if residues.iter().all(|r| lat.meets(&lo, true, &hi, true, r, pi)) {
            found = Some(lat.to_element(x));
            return false;
        }
        true
    });
    Ok(match found {
        Some(e) => BruteOutcome::Counterexample { elements: vec![e] },
        None => BruteOutcome::TrueInBox,
    })
}

/// A subset of the box, in increasing lexicographic order of the box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxSet {
    pub box_len: u64,
    pub members: Vec<bool>,
}

impl BoxSet {
    pub fn count(&self) -> usize {
        self.members.iter().filter(|m| **m).count()
    }

    /// Members form one contiguous run of the sorted box.
    pub fn is_contiguous(&self) -> bool {
        let first = self.members.iter().position(|m| *m);
        let last = self.members.iter().rposition(|m| *m);
        match (first, last) {
            (Some(a), Some(b)) => self.members[a..=b].iter().all(|m| *m),
            _ => true,
        }
    }

    /// The box is symmetric under negation, which reverses its order.
    pub fn is_symmetric(&self) -> bool {
        self.members.iter().eq(self.members.iter().rev())
    }
}

fn box_set(lat: &Lattice, mut member: impl FnMut(&[i64]) -> bool) -> BoxSet {
    let mut members = Vec::with_capacity(lat.box_len() as usize);
    lat.for_each(|x| {
        members.push(member(x));
        true
    });
    BoxSet {
        box_len: lat.box_len(),
        members,
    }
}

/// `{d in box : [0, p|d|] is contained in [0, p*gamma] + pG}`, each
/// membership decided exactly over the group: `d` belongs iff every class
/// modulo `pG` met by `[0, p|d|]` is also met by `[0, p*gamma]`.
pub fn bf_delta_gamma_set(g: &Spine, p: u32, gamma: &Element, bx: &BoxSpec) -> Result<BoxSet, OracleError> {
    bx.check(p)?;
    let lat = Lattice::new(g, bx)?;
    let pi = i64::from(p);
    let gm = lat.from_element(gamma)?;
    if !lattice::sign(&gm).is_gt() {
        return Err(OracleError::NonPositive);
    }
    let n = lat.rank();
    let zero = vec![0i64; n];
    let top = times(&gm, pi);
    let outside: Vec<Vec<i64>> = lat
        .residues(pi)
        .into_iter()
        .filter(|r| !lat.meets(&zero, true, &top, true, r, pi))
        .collect();
    let mut reach = vec![0i64; n];
    Ok(box_set(&lat, |d| {
        scaled_abs_into(d, pi, &mut reach);
        !outside.iter().any(|r| lat.meets(&zero, true, &reach, true, r, pi))
    }))
}

/// Writes `c * |x|` into `out` without allocating.
fn scaled_abs_into(x: &[i64], c: i64, out: &mut [i64]) {
    let c = if lattice::sign(x).is_lt() { -c } else { c };
    for (o, v) in out.iter_mut().zip(x) {
        *o = v * c;
    }
}

/// Box elements `g` satisfying `exists e forall a (|a| < |g| -> e - a not in pG)`,
/// i.e. some class modulo `pG` misses the open interval `(-|g|, |g|)`.
pub fn bf_delta0_formula_set(g: &Spine, p: u32, bx: &BoxSpec) -> Result<BoxSet, OracleError> {
    bx.check(p)?;
    let lat = Lattice::new(g, bx)?;
    let pi = i64::from(p);
    let residues = lat.residues(pi);
    let (mut lo, mut hi) = (vec![0i64; lat.rank()], vec![0i64; lat.rank()]);
    Ok(box_set(&lat, |x| {
        scaled_abs_into(x, 1, &mut hi);
        scaled_abs_into(x, -1, &mut lo);
        residues.iter().any(|r| !lat.meets(&lo, false, &hi, false, r, pi))
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaSets {
    pub delta_gamma: BoxSet,
    pub delta0_formula: BoxSet,
}

pub fn bf_delta_sets(g: &Spine, p: u32, gamma: &Element, bx: &BoxSpec) -> Result<DeltaSets, OracleError> {
    Ok(DeltaSets {
        delta_gamma: bf_delta_gamma_set(g, p, gamma, bx)?,
        delta0_formula: bf_delta0_formula_set(g, p, bx)?,
    })
}

/// Every convex subgroup of a finite spine, from the whole group down to
/// the trivial one; the `k`-th cut keeps positions `k..`.
pub fn bf_convex_subgroup_enum(g: &Spine) -> Result<Vec<Cut>, OracleError> {
    let positions = g.finite_positions().ok_or(OracleError::NotFinite)?;
    let mut cuts = Vec::with_capacity(positions.len() + 1);
    for k in 0..=positions.len() {
        cuts.push(match positions.get(k) {
            None => Cut::Bottom,
            Some(_) if k == 0 => Cut::Top,
            Some(pos) => g.cut_from(*pos)?,
        });
    }
    Ok(cuts)
}

/// Whether every box element of `lat` lies in `p` times the group.
fn box_p_divisible(lat: &Lattice, p: i64) -> bool {
    let mut ok = true;
    lat.for_each(|x| {
        ok = lat.is_p_multiple(x, p);
        ok
    });
    ok
}

/// Whether the quotient by the `k`-th convex subgroup is `p`-divisible
/// (checked on every element of the quotient's box).
pub fn bf_quotient_p_divisible(g: &Spine, k: usize, p: u32, bx: &BoxSpec) -> Result<bool, OracleError> {
    let lat = Lattice::new(g, bx)?;
    Ok(box_p_divisible(&lat.prefix(k.min(lat.rank())), i64::from(p)))
}

/// Whether the `k`-th convex subgroup itself is `p`-divisible on the box.
pub fn bf_subgroup_p_divisible(g: &Spine, k: usize, p: u32, bx: &BoxSpec) -> Result<bool, OracleError> {
    let lat = Lattice::new(g, bx)?;
    Ok(box_p_divisible(&lat.suffix(k.min(lat.rank())), i64::from(p)))
}

/// The smallest convex subgroup with `p`-divisible quotient, found by
/// testing every cut.
pub fn bf_delta0(g: &Spine, p: u32, bx: &BoxSpec) -> Result<Cut, OracleError> {
    bx.check(p)?;
    let cuts = bf_convex_subgroup_enum(g)?;
    let mut best = 0;
    for k in 0..cuts.len() {
        if bf_quotient_p_divisible(g, k, p, bx)? {
            best = k;
        }
    }
    Ok(cuts[best])
}

/// Index of the smallest cut whose subgroup's box lies inside `set`, i.e.
/// the convex subgroup a box set describes: one past the largest leading
/// index of a non-member.
pub fn cut_index_of_set(g: &Spine, set: &BoxSet, bx: &BoxSpec) -> Result<usize, OracleError> {
    let lat = Lattice::new(g, bx)?;
    let n = lat.rank();
    let mut k = 0usize;
    let mut i = 0usize;
    lat.for_each(|x| {
        if !set.members[i] {
            let lead = x.iter().position(|v| *v != 0).unwrap_or(n);
            k = k.max(lead + 1);
        }
        i += 1;
        true
    });
    Ok(k.min(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oag::Component::{Q, Z};

    fn bx(p: u32) -> BoxSpec {
        BoxSpec::for_prime(p, 6)
    }

    #[test]
    fn regularity_examples() {
        let zz = Spine::finite(&[Z, Z]);
        match bf_is_p_regular(&zz, 2, &bx(2)).unwrap() {
            BruteOutcome::Counterexample { elements } => assert_eq!(elements.len(), 3),
            other => panic!("{other:?}"),
        }
        assert!(bf_is_p_regular(&Spine::finite(&[Z]), 3, &bx(3)).unwrap().holds_in_box());
        assert!(bf_is_p_regular(&Spine::finite(&[Q, Z]), 2, &bx(2)).unwrap().holds_in_box());
    }

    #[test]
    fn radius_is_enforced() {
        let s = BoxSpec {
            radius: 5,
            denom_bound: 2,
        };
        assert!(matches!(
            bf_is_p_regular(&Spine::finite(&[Z]), 2, &s),
            Err(OracleError::RadiusTooSmall { needed: 6, .. })
        ));
    }

    #[test]
    fn delta_gamma_bitmaps() {
        let zz = Spine::finite(&[Z, Z]);
        let gamma = Element::from_ints(&zz, &[0, 1]).unwrap();
        let set = bf_delta_gamma_set(&zz, 2, &gamma, &bx(2)).unwrap();
        // exactly the elements (0, b): 13 of 169
        assert_eq!(set.count(), 13);
        assert!(set.is_contiguous() && set.is_symmetric());
        let z = Spine::finite(&[Z]);
        let one = Element::from_ints(&z, &[1]).unwrap();
        let set = bf_delta_gamma_set(&z, 2, &one, &bx(2)).unwrap();
        assert_eq!(set.count() as u64, set.box_len);
    }

    #[test]
    fn cut_enumeration() {
        assert_eq!(bf_convex_subgroup_enum(&Spine::finite(&[Z, Q])).unwrap().len(), 3);
        assert_eq!(bf_convex_subgroup_enum(&Spine::finite(&[Z, Z, Z])).unwrap().len(), 4);
        let g = Spine::finite(&[Z, Q]);
        let quotients: Vec<Spine> = bf_convex_subgroup_enum(&g)
            .unwrap()
            .into_iter()
            .map(|c| g.quotient_at(c).unwrap())
            .collect();
        assert_eq!(quotients, vec![Spine::trivial(), Spine::finite(&[Z]), g.clone()]);
    }

    #[test]
    fn delta0_by_enumeration() {
        let qz = Spine::finite(&[Q, Z]);
        assert_eq!(bf_delta0(&qz, 2, &bx(2)).unwrap(), Cut::AtBoundary(1));
        assert_eq!(bf_delta0(&Spine::finite(&[Z, Q]), 3, &bx(3)).unwrap(), Cut::Top);
        assert_eq!(bf_delta0(&Spine::finite(&[Q, Q]), 5, &bx(5)).unwrap(), Cut::Bottom);
    }

    #[test]
    fn antiregularity_fails_on_finite_spines() {
        for comps in [vec![Z], vec![Q], vec![Z, Q, Z]] {
            let g = Spine::finite(&comps);
            assert!(!bf_is_p_antiregular(&g, 2, &bx(2)).unwrap().holds_in_box());
        }
    }

    #[test]
    fn delta0_formula_contains_zero() {
        let g = Spine::finite(&[Q, Z]);
        let set = bf_delta0_formula_set(&g, 2, &bx(2)).unwrap();
        let lat = Lattice::new(&g, &bx(2)).unwrap();
        let mut i = 0;
        let mut zero_idx = 0;
        lat.for_each(|x| {
            if x.iter().all(|v| *v == 0) {
                zero_idx = i;
            }
            i += 1;
            true
        });
        assert!(set.members[zero_idx]);
    }
}
