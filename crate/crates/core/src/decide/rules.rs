//! The parameter-free and one-parameter criteria for henselian fields.

use num_rational::BigRational;

use super::verdict::{Level, Route, Verdict, Witness};
use super::{settle, DecideError, Result};
use crate::oag::{self, Cut, Element, Segment, Spine};
use crate::valfield::{
    canonical_henselian, canonical_p_henselian, is_henselian_ref, residue_at, spine_for, CanonicalValuation,
    ElemClass, Flag, Tower, ValfieldError, ValuationRef,
};

const CITE_SEP_CLOSED: &str =
    "the canonical henselian valuation is parameter-free definable when its residue field is separably closed";
const CITE_NOT_T_HENSELIAN: &str =
    "the canonical henselian valuation is parameter-free definable when its residue field is not t-henselian";
const CITE_RANK1: &str =
    "a henselian valuation with regular non-divisible value group is parameter-free definable; a rank-1 quotient is regular";
const CITE_PSI: &str = "a p-henselian valuation with p-regular non-p-divisible value group is definable; \
    taking the union over all admissible parameters removes them";
const CITE_DELTA0: &str = "the coarsening of the canonical p-henselian valuation by the smallest convex subgroup \
    with p-divisible quotient is parameter-free definable";
const CITE_AKE: &str = "the residue field is elementarily equivalent to a henselian field with non-divisible value \
    group, and the transfer principle carries a parameter-free definition back";
const CITE_NONDIV: &str =
    "a henselian valuation with non-p-divisible value group yields a coarsening definable with one parameter";
const CITE_EQUICHAR0: &str = "in equicharacteristic zero no nontrivial henselian valuation is definable when the \
    residue field is not separably closed, is equivalent to a henselian field with divisible value group, and the \
    value group is divisible";
const CITE_REAL_CLOSED: &str =
    "the only henselian valuation with real closed residue field that can be definable is the coarsest such";

const PSI_DESCRIPTOR: &str = "psi(x) := exists t in X (x in phi(K, t)), where X is the set of parameters t for \
    which phi(K, t) is a valuation ring whose value group is p-regular and not p-divisible";

/// A valuation together with the composition it coarsens and its value group.
#[derive(Clone, Debug)]
pub(crate) struct Frame {
    pub valuation: ValuationRef,
    pub spine: Spine,
    pub group: Spine,
}

impl Frame {
    pub fn of(c: &CanonicalValuation) -> Frame {
        Frame {
            valuation: c.valuation,
            spine: c.spine.clone(),
            group: c.value_group.clone(),
        }
    }

    pub fn at(t: &Tower, valuation: ValuationRef) -> Result<Frame> {
        let spine = spine_for(t, valuation.refinement)?;
        let group = spine.quotient_at(valuation.cut)?;
        Ok(Frame { valuation, spine, group })
    }

    /// The coarsening whose value group is `group / qcut`.
    pub fn witness(&self, t: &Tower, qcut: Cut, prime: Option<u32>, parameters: u8) -> Result<Witness> {
        let cut = self.spine.lift_quotient_cut(self.valuation.cut, qcut)?;
        let valuation = ValuationRef::new(cut, self.valuation.refinement);
        let value_group = self.spine.quotient_at(cut)?;
        if value_group.is_trivial() {
            return Err(DecideError::Precondition(format!("the coarsening at {cut:?} is trivial")));
        }
        let p_henselian_only = is_henselian_ref(t, &valuation)? != Some(true);
        Ok(Witness {
            prime,
            valuation,
            spine: self.spine.clone(),
            value_group,
            parameters,
            parameter: None,
            formulas: Vec::new(),
            p_henselian_only,
        })
    }
}

pub(crate) fn check_prime(p: u32) -> Result<()> {
    if oag::is_prime(p) {
        Ok(())
    } else {
        Err(ValfieldError::NotPrime(p).into())
    }
}

pub(crate) fn insufficient(msg: String) -> DecideError {
    ValfieldError::Insufficient(msg).into()
}

/// Henselian, and known to be neither separably nor real closed.
pub(crate) fn require_henselian(t: &Tower) -> Result<()> {
    match t.is_separably_closed() {
        Some(true) => {
            return Err(DecideError::NoDefinableValuation(format!(
                "{t} is separably closed and defines no nontrivial valuation"
            )))
        }
        None => return Err(insufficient(format!("unknown whether {t} is separably closed"))),
        Some(false) => {}
    }
    match t.is_real_closed() {
        Some(true) => {
            return Err(DecideError::NoDefinableValuation(format!(
                "{t} is real closed and defines no nontrivial valuation"
            )))
        }
        None => return Err(insufficient(format!("unknown whether {t} is real closed"))),
        Some(false) => {}
    }
    match t.is_henselian() {
        Some(true) => Ok(()),
        Some(false) => Err(DecideError::Precondition(format!("{t} is not henselian"))),
        None => Err(insufficient(format!("unknown whether {t} is henselian"))),
    }
}

pub(crate) fn canonical(t: &Tower) -> Result<CanonicalValuation> {
    require_henselian(t)?;
    let c = canonical_henselian(t)?;
    if c.is_trivial() {
        return Err(DecideError::Precondition(format!(
            "the canonical henselian valuation of {t} is trivial"
        )));
    }
    Ok(c)
}

pub(crate) fn zeta_step(t: &Tower, p: u32) -> Option<String> {
    (t.characteristic() != p && t.contains_zeta_p(p) != Some(true)).then(|| {
        format!("adjoin a primitive root of unity of order {p}: K(zeta_{p}) is parameter-free interpretable in K and its degree is prime to {p}")
    })
}

fn show(f: Flag) -> &'static str {
    match f {
        Some(true) => "yes",
        Some(false) => "no",
        None => "unknown",
    }
}

/// Sufficient conditions for a parameter-free definable nontrivial
/// henselian valuation, tried in order.
pub fn thm_a(t: &Tower) -> Result<Verdict> {
    settle(thm_a_core(t))
}

fn thm_a_core(t: &Tower) -> Result<Verdict> {
    let canon = canonical(t)?;
    let frame = Frame::of(&canon);
    let res = &canon.residue;

    let sep_closed = res.is_separably_closed();
    if sep_closed == Some(true) {
        let w = frame.witness(t, Cut::Bottom, None, 0)?;
        return Ok(Verdict::positive(Route::ResidueSepClosed, w, CITE_SEP_CLOSED));
    }
    let t_hens = res.is_t_henselian();
    if t_hens == Some(false) {
        let w = frame.witness(t, Cut::Bottom, None, 0)?;
        return Ok(Verdict::positive(Route::ResidueNotTHenselian, w, CITE_NOT_T_HENSELIAN));
    }
    let g = &canon.value_group;
    for p in g.representative_primes() {
        if !oag::is_p_divisible(g, p) && !oag::is_p_antiregular(g, p) {
            return antireg_on(t, &frame, p);
        }
    }
    let ake = prop_ake_core(t, &canon)?;
    if ake.level.is_positive() {
        return Ok(ake);
    }
    let mut v = Verdict::inconclusive(vec![
        format!("residue field not separably closed: {}", show(sep_closed.map(|b| !b))),
        format!("residue field t-henselian: {}", show(t_hens)),
        "value group p-divisible or p-antiregular for every prime: yes".to_string(),
    ]);
    v.notes.extend(ake.notes);
    if t.equiv_to_non_henselian() == Some(true) {
        v.emptyset_excluded = true;
        v.notes.push("the field is elementarily equivalent to a field without nontrivial henselian valuations".into());
    }
    Ok(v)
}

/// A non-`p`-divisible, non-`p`-antiregular value group of the canonical
/// valuation gives a parameter-free definable coarsening.
pub fn prop_antireg(t: &Tower, p: u32) -> Result<Verdict> {
    check_prime(p)?;
    settle(canonical(t).and_then(|c| antireg_on(t, &Frame::of(&c), p)))
}

/// The case split of the antiregular criterion: rank-1 quotient, then a
/// least non-`p`-divisible position, then the smallest convex subgroup with
/// `p`-divisible quotient on the canonical `p`-henselian valuation.
pub(crate) fn antireg_on(t: &Tower, frame: &Frame, p: u32) -> Result<Verdict> {
    let g = &frame.group;
    if oag::is_p_divisible(g, p) || oag::is_p_antiregular(g, p) {
        return Err(DecideError::Precondition(format!(
            "value group {g} must be neither {p}-divisible nor {p}-antiregular"
        )));
    }
    let rank1 = match g.first_position() {
        Some(pos) if !g.component_at(pos)?.is_p_divisible(p) => Some(pos),
        _ => None,
    };
    let mut v = if let Some(pos) = rank1 {
        let w = frame.witness(t, g.cut_after(pos)?, Some(p), 0)?;
        Verdict::positive(Route::HongRank1, w, CITE_RANK1)
    } else if let Some(pos) = oag::first_non_p_divisible(g, p) {
        let mut w = frame.witness(t, g.cut_after(pos)?, Some(p), 0)?;
        w.formulas.push(PSI_DESCRIPTOR.to_string());
        Verdict::positive(Route::HongPRegularPsi, w, CITE_PSI)
    } else {
        let (vp, note) = match canonical_p_henselian(t, p) {
            Ok(c) if !oag::is_p_divisible(&c.valuation.value_group, p) => (Frame::of(&c.valuation), None),
            Ok(_) => (frame.clone(), Some("canonical p-henselian value group is p-divisible")),
            Err(ValfieldError::Insufficient(_)) => (frame.clone(), Some("canonical p-henselian valuation not annotated")),
            Err(e) => return Err(e.into()),
        };
        let w = vp.witness(t, oag::delta0(&vp.group, p), Some(p), 0)?;
        let mut v = Verdict::positive(Route::LemmaDelta0, w, CITE_DELTA0);
        if let Some(n) = note {
            v.notes.push(format!("{n}; the smallest convex subgroup with {p}-divisible quotient is taken in the given valuation"));
        }
        v
    };
    if let Some(s) = zeta_step(t, p) {
        v = v.with_step(s);
    }
    Ok(v)
}

/// Transfer from a henselian field equivalent to the residue field, when
/// the value group of the canonical valuation is divisible.
pub fn prop_ake(t: &Tower) -> Result<Verdict> {
    settle(canonical(t).and_then(|c| prop_ake_core(t, &c)))
}

fn prop_ake_core(t: &Tower, canon: &CanonicalValuation) -> Result<Verdict> {
    let res = &canon.residue;
    if res.characteristic() != 0 {
        return Ok(Verdict::inconclusive(vec!["transfer needs residue characteristic 0".into()]));
    }
    if !oag::is_divisible(&canon.value_group) {
        return Ok(Verdict::inconclusive(vec![
            "transfer not applicable: the canonical value group is not divisible".into(),
        ]));
    }
    match res.elem_class() {
        Some(ElemClass::SomeNonDivisible) => {}
        Some(ElemClass::AllDivisible) => {
            return Ok(Verdict::inconclusive(vec![
                "transfer not applicable: every henselian field equivalent to the residue field has divisible value group"
                    .into(),
            ]))
        }
        None => {
            return Ok(Verdict::inconclusive(vec![format!(
                "unknown whether {res} is equivalent to a henselian field with non-divisible value group"
            )]))
        }
    }
    let mut primes: Vec<u32> = t.base.canonical_p.keys().copied().chain(super::DEFAULT_PRIMES).collect();
    primes.sort();
    primes.dedup();
    for p in primes {
        let Ok(c) = canonical_p_henselian(t, p) else { continue };
        let g = &c.valuation.value_group;
        if g.is_trivial() || oag::is_p_divisible(g, p) || oag::is_p_antiregular(g, p) {
            continue;
        }
        let inner = antireg_on(t, &Frame::of(&c.valuation), p)?;
        let Some(w) = inner.witness else { continue };
        let mut v = Verdict::positive(Route::AkeTransfer, w, CITE_AKE);
        v.citations.extend(inner.citations);
        v.interpretation_steps = inner.interpretation_steps;
        v.notes.push(format!(
            "witness via {} on the canonical {p}-henselian valuation",
            inner.route.expect("positive verdicts carry a route")
        ));
        return Ok(v);
    }
    let w = Frame::of(canon).witness(t, Cut::Bottom, None, 0)?;
    Ok(Verdict::positive(Route::AkeTransfer, w, CITE_AKE)
        .with_note("witness recorded symbolically as the canonical henselian valuation"))
}

/// Theorem A first, then one parameter for a non-divisible value group.
pub fn thm_b(t: &Tower) -> Result<Verdict> {
    let a = thm_a(t)?;
    if a.level == Level::EmptysetDefinable {
        return Ok(a);
    }
    let canon = match canonical(t) {
        Ok(c) => c,
        Err(DecideError::Field(ValfieldError::Insufficient(_))) => return Ok(a),
        Err(e) => return Err(e),
    };
    let g = &canon.value_group;
    if let Some(p) = g.representative_primes().into_iter().find(|&p| !oag::is_p_divisible(g, p)) {
        let mut v = prop_nondiv(t, p)?;
        v.emptyset_excluded |= a.emptyset_excluded;
        return Ok(v);
    }
    let mut v = a.with_note("value group divisible: only the equicharacteristic-zero criterion can decide");
    v.level = Level::Inconclusive;
    Ok(v)
}

/// The least significant position of the last non-`p`-divisible segment.
fn non_p_divisible_unit(g: &Spine, p: u32) -> Option<Element> {
    for (s, seg) in g.segments().iter().enumerate().rev() {
        let pos = match seg {
            Segment::Finite(cs) => match cs.iter().rposition(|c| !c.is_p_divisible(p)) {
                Some(j) => j as i64,
                None => continue,
            },
            other if other.components().iter().all(|c| c.is_p_divisible(p)) => continue,
            _ => 0,
        };
        return Some(Element::unit(oag::Position::new(s, pos), BigRational::from_integer(1.into())));
    }
    None
}

/// One parameter suffices when the canonical value group is not
/// `p`-divisible.
pub fn prop_nondiv(t: &Tower, p: u32) -> Result<Verdict> {
    check_prime(p)?;
    settle(prop_nondiv_core(t, p))
}

fn prop_nondiv_core(t: &Tower, p: u32) -> Result<Verdict> {
    let canon = canonical(t)?;
    let g = &canon.value_group;
    if oag::is_p_divisible(g, p) {
        return Err(DecideError::Precondition(format!("value group {g} is {p}-divisible")));
    }
    let frame = Frame::of(&canon);
    if !oag::is_p_antiregular(g, p) {
        return antireg_on(t, &frame, p);
    }
    let gamma = non_p_divisible_unit(g, p).expect("not p-divisible");
    debug_assert!(!gamma.is_p_multiple(g, p)?);
    let delta = oag::delta_gamma(g, p, &gamma)?;
    if g.cuts_equal(delta, Cut::Top)? {
        return Err(DecideError::Precondition(format!(
            "the convex subgroup attached to {gamma} is the whole group"
        )));
    }
    let mut w = frame.witness(t, delta, Some(p), 1)?;
    w.parameter = Some(format!("t with v(t) = {gamma}, not divisible by {p}"));
    w.formulas.push(format!(
        "Delta_gamma = {{d : [0, {p}|d|] within [0, {p}*gamma] + {p}*G}}, gamma = v(t)"
    ));
    let mut v = Verdict::positive(Route::NondivDeltaGamma, w, CITE_NONDIV)
        .with_note(format!("{p}-antiregular and gamma outside {p}G, so Delta_gamma is a proper subgroup"));
    if let Some(s) = zeta_step(t, p) {
        v = v.with_step(s);
    }
    Ok(v)
}

/// The definitive criterion in equicharacteristic zero.
pub fn cor_00(t: &Tower) -> Result<Verdict> {
    if t.characteristic() != 0 {
        return Err(DecideError::Precondition(format!(
            "{t} has characteristic {}; a definitive negative needs equicharacteristic 0",
            t.characteristic()
        )));
    }
    let canon = match canonical(t) {
        Ok(c) => c,
        Err(DecideError::Field(ValfieldError::Insufficient(m))) => return Ok(Verdict::inconclusive(vec![m])),
        Err(e) => return Err(e),
    };
    let res = &canon.residue;
    if res.characteristic() != 0 {
        return Err(DecideError::Precondition(format!(
            "residue characteristic {} is not 0",
            res.characteristic()
        )));
    }
    let c1 = res.is_separably_closed().map(|b| !b);
    let c2 = match (res.elem_class(), res.is_t_henselian()) {
        (Some(ElemClass::AllDivisible), _) => Some(true),
        (Some(ElemClass::SomeNonDivisible), _) | (_, Some(false)) => Some(false),
        _ => None,
    };
    let c3 = Some(oag::is_divisible(&canon.value_group));
    let conds = [c1, c2, c3];
    if conds.iter().all(|c| *c == Some(true)) {
        let mut v = Verdict::negative(Route::EquicharZeroNegative, CITE_EQUICHAR0);
        v.emptyset_excluded = true;
        return Ok(v);
    }
    if conds.contains(&Some(false)) {
        return thm_b(t);
    }
    Ok(Verdict::inconclusive(vec![
        format!("residue field not separably closed: {}", show(c1)),
        format!("residue field equivalent to a henselian field with divisible value group: {}", show(c2)),
        format!("value group divisible: {}", show(c3)),
    ]))
}

/// Theorem A, with the observation that small absolute Galois groups and
/// finite transcendence degree force finite indices `[G : pG]`.
pub fn cor_1(t: &Tower) -> Result<Verdict> {
    match (t.small_absolute_galois(), t.finite_transcendence_degree()) {
        (Some(true), _) | (_, Some(true)) => {}
        (None, _) | (_, None) => {
            return Ok(Verdict::inconclusive(vec![
                "unknown whether the absolute Galois group is small or the transcendence degree finite".into(),
            ]))
        }
        _ => {
            return Err(DecideError::Precondition(
                "needs a small absolute Galois group or finite transcendence degree".into(),
            ))
        }
    }
    let v = thm_a(t)?;
    Ok(if v.is_inconclusive() {
        v.with_note("every index [G : pG] is finite, so the value group is never p-antiregular; the only exception is a divisible value group over a t-henselian residue field that is not separably closed")
    } else {
        v
    })
}

/// Finite transcendence degree, neither separably nor real closed:
/// always parameter-free definable.
pub fn cor_fin(t: &Tower) -> Result<Verdict> {
    match t.finite_transcendence_degree() {
        Some(true) => {}
        Some(false) => return Err(DecideError::Precondition(format!("{t} has infinite transcendence degree"))),
        None => return Ok(Verdict::inconclusive(vec!["unknown transcendence degree".into()])),
    }
    let v = thm_a(t)?;
    if v.level.is_positive() {
        return Ok(v);
    }
    let canon = match canonical(t) {
        Ok(c) => c,
        Err(DecideError::Field(ValfieldError::Insufficient(_))) => return Ok(v),
        Err(e) => return Err(e),
    };
    if canon.residue.is_t_henselian() == Some(true) {
        return Ok(v.with_note("inconsistent flags: a t-henselian residue field of finite transcendence degree is henselian"));
    }
    let w = Frame::of(&canon).witness(t, Cut::Bottom, None, 0)?;
    Ok(Verdict::positive(Route::ResidueNotTHenselian, w, CITE_NOT_T_HENSELIAN)
        .with_note("finite transcendence degree: the residue field cannot be t-henselian without being henselian"))
}

/// Small absolute Galois group and residue characteristic 0: no
/// parameter-free definition exactly when the field is equivalent to its
/// residue field.
pub fn cor_small(t: &Tower) -> Result<Verdict> {
    match t.small_absolute_galois() {
        Some(true) => {}
        Some(false) => return Err(DecideError::Precondition(format!("{t} has a large absolute Galois group"))),
        None => return Ok(Verdict::inconclusive(vec!["unknown whether the absolute Galois group is small".into()])),
    }
    let canon = match canonical(t) {
        Ok(c) => c,
        Err(DecideError::Field(ValfieldError::Insufficient(m))) => return Ok(Verdict::inconclusive(vec![m])),
        Err(e) => return Err(e),
    };
    let res = &canon.residue;
    if res.characteristic() != 0 {
        return Err(DecideError::Precondition("residue characteristic must be 0".into()));
    }
    let parts = [
        Some(oag::is_divisible(&canon.value_group)),
        res.is_t_henselian(),
        res.is_separably_closed().map(|b| !b),
    ];
    let equiv = if parts.contains(&Some(false)) {
        Some(false)
    } else if parts.iter().all(|x| *x == Some(true)) {
        Some(true)
    } else {
        None
    };
    match equiv {
        Some(true) => {
            let mut v = thm_b(t)?;
            if v.level == Level::EmptysetDefinable {
                return Ok(Verdict::inconclusive(vec![
                    "inconsistent flags: a parameter-free route fired although K is equivalent to its residue field".into(),
                ]));
            }
            v.emptyset_excluded = true;
            Ok(v.with_note("K is elementarily equivalent to its residue field"))
        }
        Some(false) => Ok(thm_a(t)?.with_note("K is not elementarily equivalent to its residue field")),
        None => Ok(Verdict::inconclusive(vec![
            "unknown whether K is elementarily equivalent to its residue field".into(),
        ])),
    }
}

/// A verdict for one given henselian valuation.
pub fn valuation_verdict(t: &Tower, v: &ValuationRef) -> Result<Verdict> {
    settle(valuation_verdict_core(t, v))
}

fn valuation_verdict_core(t: &Tower, v: &ValuationRef) -> Result<Verdict> {
    if is_henselian_ref(t, v)? != Some(true) {
        return Err(insufficient(format!("unknown whether {v} is henselian")));
    }
    let frame = Frame::at(t, *v)?;
    if frame.group.is_trivial() {
        return Ok(Verdict::inconclusive(vec!["the valuation is trivial".into()]));
    }
    let res = residue_at(t, v)?;
    if res.is_real_closed() == Some(true) {
        if let Some(cuts) = frame.spine.finite_cuts() {
            for c in cuts {
                if frame.spine.cuts_equal(c, Cut::Top)? || !frame.spine.cut_contains(c, v.cut)? {
                    continue;
                }
                if frame.spine.cuts_equal(c, v.cut)? {
                    continue;
                }
                let u = ValuationRef::new(c, v.refinement);
                if residue_at(t, &u)?.is_real_closed() == Some(true) {
                    return Ok(Verdict::negative(Route::RealClosedResidueCoarsest, CITE_REAL_CLOSED)
                        .with_note(format!("{u} is a proper coarsening with real closed residue field")));
                }
            }
        }
    }
    let g = &frame.group;
    if oag::is_divisible(g) || !oag::is_regular(g) {
        return Ok(Verdict::inconclusive(vec![format!(
            "value group {g} is not regular and non-divisible"
        )]));
    }
    let p = g.representative_primes().into_iter().find(|&p| !oag::is_p_divisible(g, p));
    let w = frame.witness(t, Cut::Bottom, p, 0)?;
    let route = if g.rank() == Some(1) { Route::HongRank1 } else { Route::HongPRegularPsi };
    Ok(Verdict::positive(route, w, CITE_RANK1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valfield::{Catalog, Refinement};

    fn tower(base: &str, exts: &[&str]) -> Tower {
        let cat = Catalog::builtin();
        Tower::new(cat.get(base).unwrap().clone(), exts.iter().map(|s| s.parse().unwrap()).collect())
    }

    fn sp(s: &str) -> Spine {
        s.parse().unwrap()
    }

    #[test]
    fn example_two_is_rank_one() {
        let t = tower("R", &["[\"Q\"]", "[\"Z\"]"]);
        let v = thm_a(&t).unwrap();
        assert_eq!(v.level, Level::EmptysetDefinable);
        assert_eq!(v.route, Some(Route::HongRank1));
        assert_eq!(v.witness_cut, Some(Cut::AtBoundary(1)));
        assert_eq!(v.witness.unwrap().value_group, sp("[\"Z\"]"));
        assert_eq!(thm_b(&t).unwrap().route, Some(Route::HongRank1));
        assert!(cor_00(&t).unwrap().level.is_positive());
    }

    #[test]
    fn example_two_valuations() {
        let t = tower("R", &["[\"Q\"]", "[\"Z\"]"]);
        let v1 = valuation_verdict(&t, &ValuationRef::new(Cut::AtBoundary(1), Refinement::None)).unwrap();
        assert_eq!((v1.level, v1.route), (Level::EmptysetDefinable, Some(Route::HongRank1)));
        let v2 = valuation_verdict(&t, &ValuationRef::composition()).unwrap();
        assert_eq!((v2.level, v2.route), (Level::NotDefinable, Some(Route::RealClosedResidueCoarsest)));
    }

    #[test]
    fn pz_over_q_transfers() {
        let t = tower("PZ", &["[\"Q\"]"]);
        let v = thm_a(&t).unwrap();
        assert_eq!(v.level, Level::EmptysetDefinable);
        assert_eq!(v.route, Some(Route::AkeTransfer));
        let w = v.witness.unwrap();
        assert_eq!(w.spine, sp(r#"["Q", {"LeftRay": "Z"}]"#));
        assert_eq!(w.valuation, ValuationRef::new(Cut::AtBoundary(1), Refinement::BaseCanonicalP(2)));
        assert_eq!(w.value_group, sp("[\"Q\"]"));
        assert!(!w.p_henselian_only);
    }

    #[test]
    fn fj_over_q_is_not_definable() {
        let t = tower("FJ", &["[\"Q\"]"]);
        assert!(thm_a(&t).unwrap().is_inconclusive());
        assert!(thm_b(&t).unwrap().is_inconclusive());
        let v = cor_00(&t).unwrap();
        assert_eq!((v.level, v.route), (Level::NotDefinable, Some(Route::EquicharZeroNegative)));
        let s = cor_small(&t).unwrap();
        assert!(s.emptyset_excluded);
    }

    #[test]
    fn antireg_sub_routes() {
        let cases = [
            (r#"["Z", "Q"]"#, Route::HongRank1, Cut::AtBoundary(1)),
            (r#"["Q", "Z"]"#, Route::HongPRegularPsi, Cut::Bottom),
        ];
        for (g, route, cut) in cases {
            let t = tower("R", &[g]);
            let v = prop_antireg(&t, 2).unwrap();
            assert_eq!(v.route, Some(route), "{g}");
            assert_eq!(v.witness_cut, Some(cut), "{g}");
        }
        let t = tower("R", &[r#"["Q", {"LeftRay": "Z"}]"#]);
        let v = prop_antireg(&t, 2).unwrap();
        assert_eq!((v.route, v.witness_cut), (Some(Route::LemmaDelta0), Some(Cut::AtBoundary(1))));
        let t = tower("R", &[r#"["Q"]"#]);
        assert!(matches!(prop_antireg(&t, 2), Err(DecideError::NoDefinableValuation(_))));
    }

    #[test]
    fn pz_elementary_extension_needs_a_parameter() {
        let t = tower("PZ_L", &[]);
        let a = thm_a(&t).unwrap();
        assert!(a.is_inconclusive() && a.emptyset_excluded);
        let b = thm_b(&t).unwrap();
        assert_eq!(b.level, Level::ParamDefinable { max_params: 1 });
        assert_eq!(b.route, Some(Route::NondivDeltaGamma));
        assert_eq!(b.witness_cut, Some(Cut::Inside(0, 0)));
        assert!(b.emptyset_excluded);
    }

    #[test]
    fn nondiv_errors_and_delegation() {
        let t = tower("R", &[r#"["Z", "Q"]"#]);
        assert_eq!(prop_nondiv(&t, 2).unwrap().witness.unwrap().parameters, 0);
        let q = tower("Q_2^h", &[r#"["Q"]"#]);
        assert!(prop_nondiv(&tower("R_alg", &[r#"["Q"]"#]), 2).is_err());
        assert!(prop_nondiv(&q, 2).is_ok());
    }

    #[test]
    fn mixed_characteristic_refuses_definitive_negative() {
        let t = tower("Q_3^h", &[r#"["Z"]"#]);
        assert!(matches!(cor_00(&t), Err(DecideError::Precondition(_))));
    }

    #[test]
    fn unknown_flags_are_inconclusive() {
        let mut b = crate::valfield::BaseField::unknown("k", 0);
        b.henselian = Some(false);
        b.separably_closed = Some(false);
        b.real_closed = Some(false);
        let t = Tower::new(b, vec![sp(r#"["Q"]"#)]);
        assert!(thm_a(&t).unwrap().is_inconclusive());
        assert!(prop_ake(&t).unwrap().is_inconclusive());
        assert!(cor_1(&t).unwrap().is_inconclusive());
    }
}
