//! Valuations tamely branching at a prime.

use num_rational::BigRational;

use super::rules::{canonical, check_prime, insufficient, require_henselian, zeta_step, Frame};
use super::verdict::{Route, TameBranchReport, Verdict};
use super::{settle, DecideError, Result};
use crate::oag::{self, Cut, Element, Position, Segment, Spine};
use crate::valfield::{
    canonical_p_henselian, is_henselian_ref, is_p_henselian_ref, residue_at, value_group_at, value_of_p, Flag,
    Tower, ValfieldError, ValuationRef,
};

const CITE_PTAME: &str = "a field with a p-henselian valuation tamely branching at p carries a parameter-free \
    definable such valuation, given zeta_p (and sqrt(-1) when p = 2 in characteristic 0)";
const CITE_TB: &str = "a field with a henselian valuation tamely branching at p carries one definable with at most \
    one parameter";
const CITE_SMALLTAME: &str =
    "with a small absolute Galois group some parameter-free definable coarsening is still tamely branching";

pub fn is_tamely_branching(t: &Tower, v: &ValuationRef, p: u32) -> Result<TameBranchReport> {
    check_prime(p)?;
    let g = value_group_at(t, v)?;
    let res = residue_at(t, v)?;
    let value_group_not_p_div = !oag::is_p_divisible(&g, p);
    let index_mod_p = oag::index_mod_p(&g, p);
    let residue_char_ok = res.characteristic() != p;
    let p_squared_ext_ok = if index_mod_p.equals(p.into()) {
        match res.has_sep_ext_degree_div_p_squared(p) {
            Some(b) => Some(b),
            None => {
                return Err(insufficient(format!(
                    "unknown whether {res} has a separable extension of degree divisible by {}",
                    p * p
                )))
            }
        }
    } else {
        None
    };
    Ok(TameBranchReport {
        prime: p,
        value_group_not_p_div,
        index_mod_p,
        residue_char_ok,
        p_squared_ext_ok,
        tamely_branching: value_group_not_p_div && residue_char_ok && p_squared_ext_ok != Some(false),
    })
}

/// Cuts to try: all of them on a finite spine, otherwise the boundaries
/// plus one interior cut per infinite segment. `Top` is left out.
fn candidate_cuts(g: &Spine) -> Vec<Cut> {
    if let Some(cuts) = g.finite_cuts() {
        return cuts.into_iter().rev().filter(|c| *c != Cut::Top).collect();
    }
    let mut out = vec![Cut::Bottom];
    for (s, seg) in g.segments().iter().enumerate().rev() {
        let interior = match seg {
            Segment::Finite(cs) => (1..cs.len() as i64).rev().map(|k| Cut::Inside(s, k)).collect(),
            Segment::RightRay(_) => vec![Cut::Inside(s, 1)],
            Segment::LeftRay(_) | Segment::BiInfinite(_) => vec![Cut::Inside(s, 0)],
        };
        out.extend(interior);
        if s > 0 {
            out.push(Cut::AtBoundary(s));
        }
    }
    let mut seen = Vec::new();
    out.into_iter()
        .filter_map(|c| g.normalize_cut(c).ok())
        .filter(|c| {
            let fresh = *c != Cut::Top && !seen.contains(c);
            seen.push(*c);
            fresh
        })
        .collect()
}

enum Need {
    Henselian,
    PHenselian(u32),
}

/// A tamely branching valuation among the coarsenings of `frame`'s
/// composition, finest first. Unknown flags on a candidate make a miss
/// inconclusive.
fn find_tame(t: &Tower, frame: &Frame, p: u32, need: Need) -> Result<(ValuationRef, TameBranchReport)> {
    let mut unknown = None;
    for cut in candidate_cuts(&frame.spine) {
        let v = ValuationRef::new(cut, frame.valuation.refinement);
        let ok: Flag = match need {
            Need::Henselian => is_henselian_ref(t, &v)?,
            Need::PHenselian(q) => is_p_henselian_ref(t, &v, q)?,
        };
        match is_tamely_branching(t, &v, p) {
            Ok(r) if r.tamely_branching && ok == Some(true) => return Ok((v, r)),
            Ok(r) if r.tamely_branching => unknown = Some(format!("unknown whether {v} is henselian")),
            Ok(_) => {}
            Err(DecideError::Field(ValfieldError::Insufficient(m))) => unknown = Some(m),
            Err(e) => return Err(e),
        }
    }
    match unknown {
        Some(m) => Err(insufficient(m)),
        None => Err(DecideError::Precondition(format!(
            "no {}henselian valuation tamely branching at {p}",
            if matches!(need, Need::PHenselian(_)) { "p-" } else { "" }
        ))),
    }
}

fn side_condition(flag: Flag, what: String) -> Result<()> {
    match flag {
        Some(true) => Ok(()),
        Some(false) => Err(DecideError::Precondition(what)),
        None => Err(insufficient(format!("unknown: {what}"))),
    }
}

/// `e` in the coordinates of `g / cut`.
fn project(g: &Spine, cut: Cut, e: &Element) -> Result<Element> {
    let key_cut = g.normalize_cut(cut)?;
    let shift = match key_cut {
        Cut::Inside(s, k) if matches!(g.segments()[s], Segment::LeftRay(_) | Segment::BiInfinite(_)) => Some((s, k - 1)),
        _ => None,
    };
    let mut out = Element::zero();
    for (pos, x) in e.support() {
        if g.cut_contains_position(key_cut, *pos)? {
            continue;
        }
        let pos = match shift {
            Some((s, d)) if pos.seg == s => Position::new(s, pos.offset - d),
            _ => *pos,
        };
        out = out.add(&Element::unit(pos, x.clone()));
    }
    Ok(out)
}

/// A parameter-free definable `p`-henselian valuation tamely branching at
/// `p`, following the three cases of the construction.
pub fn prop_ptame(t: &Tower, p: u32) -> Result<Verdict> {
    check_prime(p)?;
    settle(ptame_core(t, p, true))
}

fn ptame_core(t: &Tower, p: u32, enforce: bool) -> Result<Verdict> {
    if enforce {
        side_condition(Some(t.characteristic() != p), format!("characteristic differs from {p}"))?;
        side_condition(t.contains_zeta_p(p), format!("primitive root of unity of order {p} in K"))?;
        if p == 2 && t.characteristic() == 0 {
            side_condition(t.sqrt_minus_one(), "square root of -1 in K".into())?;
        }
    }
    let cp = canonical_p_henselian(t, p)?;
    let vp = Frame::of(&cp.valuation);
    let (v, _) = find_tame(t, &vp, p, Need::PHenselian(p))?;
    let kv = residue_at(t, &v)?;
    let (route, qcut, note) = match kv.is_p_closed(p) {
        None => return Err(insufficient(format!("unknown whether {kv} has a Galois extension of degree {p}"))),
        Some(true) => (Route::PtameCase1, Cut::Bottom, "the tame valuation has p-closed residue field"),
        Some(false) if cp.valuation.residue.characteristic() != p => (
            Route::PtameCase2,
            Cut::Bottom,
            "the canonical p-henselian valuation has residue characteristic different from p",
        ),
        Some(false) => {
            let gamma = value_of_p(t, cp.valuation.valuation.refinement)?
                .ok_or_else(|| insufficient(format!("value of {p} not annotated")))?;
            let gamma = project(&vp.spine, vp.valuation.cut, &gamma)?;
            let delta = oag::delta_gamma(&vp.group, p, &gamma)?;
            if vp.group.cuts_equal(delta, Cut::Top)? {
                return Err(DecideError::Precondition(format!(
                    "the convex subgroup attached to v({p}) is the whole group"
                )));
            }
            (Route::PtameCase3, delta, "coarsening by the convex subgroup attached to v(p)")
        }
    };
    let mut w = vp.witness(t, qcut, Some(p), 0)?;
    w.p_henselian_only = is_henselian_ref(t, &w.valuation)? != Some(true);
    let mut verdict = Verdict::positive(route, w, CITE_PTAME)
        .with_note(note)
        .with_note(format!("tamely branching valuation found: {v}"));
    if route == Route::PtameCase3 {
        verdict.witness.as_mut().unwrap().formulas.push(format!("Delta_gamma with gamma = v({p})"));
    }
    Ok(verdict)
}

/// Positions of `g` to try as values of a parameter, least significant first.
fn sample_positions(g: &Spine) -> Vec<Position> {
    let mut out = Vec::new();
    for (s, seg) in g.segments().iter().enumerate().rev() {
        match seg {
            Segment::Finite(cs) => out.extend((0..cs.len() as i64).rev().map(|k| Position::new(s, k))),
            _ => out.push(Position::new(s, 0)),
        }
    }
    out
}

/// A henselian valuation tamely branching at `p`, definable with at most
/// one parameter.
pub fn prop_tb(t: &Tower, p: u32) -> Result<Verdict> {
    check_prime(p)?;
    settle(tb_core(t, p))
}

fn tb_core(t: &Tower, p: u32) -> Result<Verdict> {
    let canon = canonical(t)?;
    find_tame(t, &Frame::of(&canon), p, Need::Henselian)?;
    let step = zeta_step(t, p);
    let mut verdict = match canon.residue.is_p_closed(p) {
        None => {
            return Err(insufficient(format!(
                "unknown whether {} has a Galois extension of degree {p}",
                canon.residue
            )))
        }
        Some(true) => ptame_core(t, p, false)?.with_note("the canonical residue field is p-closed"),
        Some(false) => {
            let cp = canonical_p_henselian(t, p)?;
            let whole = Frame::at(t, ValuationRef::new(Cut::Bottom, cp.valuation.valuation.refinement))?;
            let (v, _) = find_tame(t, &whole, p, Need::Henselian)?;
            let g = &whole.spine;
            let mut found = None;
            for pos in sample_positions(g) {
                if g.cut_contains_position(v.cut, pos)? {
                    continue;
                }
                if !oag::is_p_divisible(&g.quotient_at(g.cut_from(pos)?)?, p) {
                    found = Some(pos);
                    break;
                }
            }
            match found {
                Some(pos) => {
                    let gamma = Element::unit(pos, BigRational::from_integer(1.into()));
                    let delta = oag::delta_gamma(g, p, &gamma)?;
                    let mut w = whole.witness(t, delta, Some(p), 1)?;
                    w.parameter = Some(format!("t with v(t) = {gamma}"));
                    w.formulas.push(format!("Delta_gamma = {{d : [0, {p}|d|] within [0, {p}*gamma] + {p}*G}}"));
                    Verdict::positive(Route::TbDeltaGamma, w, CITE_TB)
                }
                None => {
                    let fv = Frame::at(t, v)?;
                    if !oag::is_p_regular(&fv.group, p) || oag::is_p_divisible(&fv.group, p) {
                        return Err(DecideError::Precondition(format!(
                            "value group {} of the tame valuation is not {p}-regular and non-{p}-divisible",
                            fv.group
                        )));
                    }
                    let w = fv.witness(t, Cut::Bottom, Some(p), 0)?;
                    Verdict::positive(Route::TbHongRegular, w, CITE_TB)
                }
            }
        }
    };
    if let Some(s) = step {
        verdict = verdict.with_step(s);
    }
    Ok(verdict)
}

/// With a small absolute Galois group the tame valuation has a
/// parameter-free definable tamely branching coarsening.
pub fn prop_smalltame(t: &Tower, p: u32) -> Result<Verdict> {
    check_prime(p)?;
    settle(smalltame_core(t, p))
}

fn smalltame_core(t: &Tower, p: u32) -> Result<Verdict> {
    match t.small_absolute_galois() {
        Some(true) => {}
        Some(false) => return Err(DecideError::Precondition(format!("{t} has a large absolute Galois group"))),
        None => return Err(insufficient("unknown whether the absolute Galois group is small".into())),
    }
    require_henselian(t)?;
    let canon = canonical(t)?;
    let (v, _) = find_tame(t, &Frame::of(&canon), p, Need::Henselian)?;
    let fv = Frame::at(t, v)?;
    let pos = oag::first_non_p_divisible(&fv.group, p).ok_or_else(|| {
        DecideError::Precondition(format!(
            "value group {} has no least non-{p}-divisible position, impossible with a small absolute Galois group",
            fv.group
        ))
    })?;
    let w = fv.witness(t, fv.group.cut_after(pos)?, Some(p), 0)?;
    let mut verdict = Verdict::positive(Route::SmalltameComposite, w, CITE_SMALLTAME)
        .with_note(format!("coarsening of the tame valuation {v}"));
    if let Some(s) = zeta_step(t, p) {
        verdict = verdict.with_step(s);
    }
    Ok(verdict)
}

/// Galois-theoretic readings of the tame results; empty when the flags
/// they need are missing.
pub fn ekn_annotations(t: &Tower, p: u32) -> Vec<String> {
    let mut out = Vec::new();
    if !oag::is_prime(p) {
        return out;
    }
    if t.characteristic() != p && t.contains_zeta_p(p) == Some(true) {
        if let Ok(v) = prop_ptame(t, p) {
            if v.level.is_positive() {
                out.push(format!(
                    "G_K({p}) has a non-trivial normal abelian subgroup (when G_K({p}) is not Z_{p}{})",
                    if p == 2 { ", Z/2 or Z_2 x| Z/2" } else { "" }
                ));
            }
        }
    }
    let tame = canonical(t)
        .ok()
        .map(|c| find_tame(t, &Frame::of(&c), p, Need::Henselian).is_ok())
        .unwrap_or(false);
    if tame {
        out.push(format!(
            "G_K has a non-procyclic Sylow {p}-subgroup, not Z_2 x| Z/2, with a non-trivial abelian normal closed subgroup"
        ));
        if t.equiv_to_non_henselian() == Some(true) {
            out.push(format!(
                "an elementarily equivalent field carries no henselian valuation tamely branching at {p}: tame branching is not an elementary property"
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decide::Level;
    use crate::valfield::{Catalog, Refinement};

    fn tower(base: &str, exts: &[&str]) -> Tower {
        let cat = Catalog::builtin();
        Tower::new(cat.get(base).unwrap().clone(), exts.iter().map(|s| s.parse().unwrap()).collect())
    }

    #[test]
    fn pz_extension_is_tame_everywhere() {
        let t = tower("PZ_L", &[]);
        let v = ValuationRef::new(Cut::Bottom, Refinement::BaseCanonical);
        for p in [2, 3, 5, 7] {
            let r = is_tamely_branching(&t, &v, p).unwrap();
            assert!(r.tamely_branching && r.index_mod_p.is_infinite(), "{p}");
            let tb = prop_tb(&t, p).unwrap();
            assert_eq!(tb.level, Level::ParamDefinable { max_params: 1 }, "{p}");
            assert_eq!(tb.route, Some(Route::TbDeltaGamma));
        }
        assert!(ekn_annotations(&t, 3).iter().any(|a| a.contains("not an elementary property")));
    }

    #[test]
    fn tame_conditions() {
        // Z with a residue field lacking degree-p^2 extensions
        let t = tower("R", &[r#"["Z"]"#]);
        let r = is_tamely_branching(&t, &ValuationRef::composition(), 2).unwrap();
        assert_eq!(r.p_squared_ext_ok, Some(false));
        assert!(!r.tamely_branching);
        let t = tower("F_2^alg", &[r#"["Z"]"#]);
        assert!(!is_tamely_branching(&t, &ValuationRef::composition(), 2).unwrap().residue_char_ok);
    }

    #[test]
    fn ptame_cases() {
        let v = prop_ptame(&tower("C", &[r#"["Z"]"#, r#"["Z"]"#]), 2).unwrap();
        assert_eq!((v.route, v.witness_cut), (Some(Route::PtameCase1), Some(Cut::Bottom)));
        let v = prop_ptame(&tower("Q(i)", &[r#"["Z"]"#]), 2).unwrap();
        assert_eq!(v.route, Some(Route::PtameCase2));
        let v = prop_ptame(&tower("Q_3^h(zeta_3)", &[r#"["Z"]"#]), 3).unwrap();
        assert_eq!((v.route, v.witness_cut), (Some(Route::PtameCase3), Some(Cut::AtBoundary(1))));
        assert!(matches!(prop_ptame(&tower("R", &[r#"["Z"]"#]), 2), Err(DecideError::Precondition(_))));
    }

    #[test]
    fn tb_hong_regular() {
        let v = prop_tb(&tower("Q(i)", &[r#"["Z"]"#, r#"["Q"]"#]), 2).unwrap();
        assert_eq!((v.level, v.route), (Level::EmptysetDefinable, Some(Route::TbHongRegular)));
    }

    #[test]
    fn smalltame_coarsening() {
        let v = prop_smalltame(&tower("C", &[r#"["Z", "Z"]"#]), 3).unwrap();
        assert_eq!((v.route, v.witness_cut), (Some(Route::SmalltameComposite), Some(Cut::AtBoundary(1))));
    }
}
