//! Towers of power-series extensions and the henselian valuations on them.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::base::{BaseField, CanonicalData, Catalog, ElemClass, Flag};
use super::ValfieldError;
use crate::oag::{self, Cut, Element, Position, Spine};

/// `base((G_1))((G_2))...`; `extensions` lists the groups innermost first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tower {
    pub base: BaseField,
    pub extensions: Vec<Spine>,
}

/// On-disk form of a tower: the base is a catalog name or inline flags.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerFile {
    pub base: BaseSpec,
    #[serde(default)]
    pub extensions: Vec<Spine>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BaseSpec {
    Name(String),
    Inline(BaseField),
}

impl TowerFile {
    pub fn resolve(self, catalog: &Catalog) -> Result<Tower, ValfieldError> {
        let base = match self.base {
            BaseSpec::Name(n) => catalog.get(&n)?.clone(),
            BaseSpec::Inline(f) => {
                f.validate()?;
                f
            }
        };
        Ok(Tower::new(base, self.extensions))
    }
}

/// Which base-internal valuation, if any, refines the power-series
/// composition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Refinement {
    #[default]
    None,
    BaseCanonical,
    BaseCanonicalP(u32),
}

/// A valuation on a tower: the coarsening, by the convex subgroup named by
/// `cut`, of the composition selected by `refinement`. `Cut::Bottom` is the
/// finest valuation of that composition and `Cut::Top` the trivial one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ValuationRef {
    pub cut: Cut,
    #[serde(default)]
    pub refinement: Refinement,
}

impl ValuationRef {
    pub fn new(cut: Cut, refinement: Refinement) -> Self {
        ValuationRef { cut, refinement }
    }

    /// The full power-series valuation.
    pub fn composition() -> Self {
        ValuationRef::new(Cut::Bottom, Refinement::None)
    }
}

impl fmt::Display for ValuationRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.refinement {
            Refinement::None => write!(f, "{:?}", self.cut),
            Refinement::BaseCanonical => write!(f, "{:?} (refined by the base canonical valuation)", self.cut),
            Refinement::BaseCanonicalP(p) => {
                write!(f, "{:?} (refined by the base canonical {p}-henselian valuation)", self.cut)
            }
        }
    }
}

/// A distinguished valuation together with its value group and residue.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalValuation {
    pub valuation: ValuationRef,
    /// The composition the cut lives in.
    pub spine: Spine,
    pub value_group: Spine,
    pub residue: Tower,
}

impl CanonicalValuation {
    pub fn is_trivial(&self) -> bool {
        self.value_group.is_trivial()
    }
}

/// The canonical `p`-henselian valuation plus whether it is known to be
/// parameter-free definable uniformly in the prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalPValuation {
    pub prime: u32,
    #[serde(flatten)]
    pub valuation: CanonicalValuation,
    pub definable_uniformly: bool,
    pub side_conditions: Vec<String>,
}

impl Tower {
    pub fn new(base: BaseField, extensions: Vec<Spine>) -> Self {
        Tower { base, extensions }
    }

    pub fn base_only(base: BaseField) -> Self {
        Tower::new(base, Vec::new())
    }

    pub fn from_json(s: &str, catalog: &Catalog) -> Result<Tower, ValfieldError> {
        let file: TowerFile = serde_json::from_str(s).map_err(|e| ValfieldError::Parse(e.to_string()))?;
        file.resolve(catalog)
    }

    /// `self((g))`.
    pub fn extend(&self, g: Spine) -> Tower {
        let mut t = self.clone();
        t.extensions.push(g);
        t
    }

    pub fn characteristic(&self) -> u32 {
        self.base.characteristic
    }

    fn nontrivial_extensions(&self) -> impl Iterator<Item = &Spine> {
        self.extensions.iter().filter(|g| !g.is_trivial())
    }

    pub fn has_extensions(&self) -> bool {
        self.nontrivial_extensions().next().is_some()
    }

    /// The composed value group of all extensions.
    pub fn extension_group(&self) -> Spine {
        composed_spine(self)
    }

    /// Power-series fields are henselian; otherwise ask the base.
    pub fn is_henselian(&self) -> Flag {
        if self.has_extensions() {
            Some(true)
        } else {
            self.base.henselian
        }
    }

    pub fn is_t_henselian(&self) -> Flag {
        if self.is_separably_closed() == Some(true) {
            return None;
        }
        match self.is_henselian() {
            Some(true) => Some(true),
            _ => self.base.t_henselian,
        }
    }

    /// `k((G))` is separably closed iff `k` is and `G` is divisible.
    pub fn is_separably_closed(&self) -> Flag {
        if self.nontrivial_extensions().any(|g| !oag::is_divisible(g)) {
            return Some(false);
        }
        self.base.separably_closed
    }

    /// `k((G))` is real closed iff `k` is and `G` is divisible.
    pub fn is_real_closed(&self) -> Flag {
        if self.nontrivial_extensions().any(|g| !oag::is_divisible(g)) {
            return Some(false);
        }
        self.base.real_closed
    }

    pub fn contains_zeta_p(&self, p: u32) -> Flag {
        if self.is_separably_closed() == Some(true) && self.characteristic() != p {
            return Some(true);
        }
        self.base.contains_zeta_p(p)
    }

    pub fn sqrt_minus_one(&self) -> Flag {
        if self.characteristic() == 2 || self.is_separably_closed() == Some(true) {
            return Some(true);
        }
        if self.is_real_closed() == Some(true) {
            return Some(false);
        }
        self.base.prime_flags(2).sqrt_minus_one
    }

    /// No Galois extension of degree `p`. A non-`p`-divisible value group
    /// gives one by an Artin-Schreier or Kummer extension; without `zeta_p`
    /// the answer is left open.
    pub fn is_p_closed(&self, p: u32) -> Flag {
        if self.nontrivial_extensions().any(|g| !oag::is_p_divisible(g, p)) {
            if self.characteristic() == p || self.base.contains_zeta_p(p) == Some(true) {
                return Some(false);
            }
            return None;
        }
        self.base.is_p_closed(p)
    }

    /// A finite separable extension of degree divisible by `p^2`. With a
    /// non-`p`-divisible value group and `p` different from the
    /// characteristic, a `p^2`-th root of a uniformizing element works.
    pub fn has_sep_ext_degree_div_p_squared(&self, p: u32) -> Flag {
        if self.characteristic() != p && self.nontrivial_extensions().any(|g| !oag::is_p_divisible(g, p)) {
            return Some(true);
        }
        if self.is_separably_closed() == Some(true) {
            return Some(false);
        }
        self.base.prime_flags(p).has_sep_ext_degree_div_p_squared
    }

    /// `G_K` is small iff the base is and every `[G : pG]` is finite.
    pub fn small_absolute_galois(&self) -> Flag {
        for g in self.nontrivial_extensions() {
            if g.representative_primes().into_iter().any(|p| oag::index_mod_p(g, p).is_infinite()) {
                return Some(false);
            }
        }
        self.base.small_absolute_galois
    }

    /// Power series over a field have infinite transcendence degree.
    pub fn finite_transcendence_degree(&self) -> Flag {
        if self.has_extensions() {
            Some(false)
        } else {
            self.base.finite_transcendence_degree
        }
    }

    /// Assertions about henselian elementary extensions, known only for a
    /// bare base.
    pub fn elem_class(&self) -> Option<ElemClass> {
        if self.has_extensions() {
            None
        } else {
            self.base.elem_class
        }
    }

    /// Known only for a bare base.
    pub fn equiv_to_non_henselian(&self) -> Flag {
        if self.has_extensions() {
            None
        } else {
            self.base.equiv_to_non_henselian
        }
    }

    /// Human-readable name, e.g. `R((Q))((Z))`.
    pub fn describe(&self) -> String {
        let mut s = self.base.name.clone();
        for g in &self.extensions {
            s.push_str("((");
            s.push_str(&compact(g));
            s.push_str("))");
        }
        s
    }
}

fn compact(g: &Spine) -> String {
    let inner = g.to_string();
    match inner.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
        Some(body) if g.segments().len() == 1 => body.trim_matches('"').to_string(),
        _ => inner,
    }
}

impl fmt::Display for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Concatenation of the extension groups, outermost most significant.
pub fn composed_spine(t: &Tower) -> Spine {
    t.extensions.iter().rev().fold(Spine::trivial(), |acc, g| acc.concat(g))
}

/// The base-internal valuation data a refinement refers to; `None` when it
/// is trivial on the base.
pub fn base_data(base: &BaseField, refinement: Refinement) -> Result<Option<CanonicalData>, ValfieldError> {
    match refinement {
        Refinement::None => Ok(None),
        Refinement::BaseCanonical => match (&base.canonical, base.henselian) {
            (Some(d), _) => Ok(Some(d.clone())),
            (None, Some(false)) => Ok(None),
            (None, _) if base.separably_closed == Some(true) => Ok(None),
            (None, _) => Err(ValfieldError::Insufficient(format!(
                "{}: canonical henselian valuation not annotated",
                base.name
            ))),
        },
        Refinement::BaseCanonicalP(p) => base_p_data(base, p),
    }
}

fn base_p_data(base: &BaseField, p: u32) -> Result<Option<CanonicalData>, ValfieldError> {
    if base.is_p_closed(p) == Some(true) {
        return Ok(None);
    }
    if let Some(d) = base.canonical_p.get(&p) {
        return Ok(Some(d.clone()));
    }
    if base.prime_flags(p).p_henselian == Some(false) {
        return Ok(None);
    }
    // a henselian base whose residue carries no further p-henselian
    // valuation: the canonical valuation serves, coarsened later if the
    // residue is p-closed
    if let Some(d) = &base.canonical {
        let r = &d.residue;
        if r.is_p_closed(p) == Some(true) || r.prime_flags(p).p_henselian == Some(false) {
            return Ok(Some(d.clone()));
        }
    }
    Err(ValfieldError::Insufficient(format!(
        "{}: canonical {p}-henselian valuation not annotated",
        base.name
    )))
}

/// The composed spine of a refinement: extension groups, then the base
/// block (least significant).
pub fn spine_for(t: &Tower, refinement: Refinement) -> Result<Spine, ValfieldError> {
    let g = composed_spine(t);
    Ok(match base_data(&t.base, refinement)? {
        Some(d) => g.concat(&d.spine),
        None => g,
    })
}

/// `v(p)` in the spine of the refinement, for a mixed-characteristic base.
pub fn value_of_p(t: &Tower, refinement: Refinement) -> Result<Option<Element>, ValfieldError> {
    let Some(d) = base_data(&t.base, refinement)? else {
        return Ok(None);
    };
    let Some(v) = &d.value_of_p else {
        return Ok(None);
    };
    let shift = composed_spine(t).segments().len();
    let mut e = Element::zero();
    for (pos, x) in v.support() {
        e = e.add(&Element::unit(Position::new(pos.seg + shift, pos.offset), x.clone()));
    }
    Ok(Some(e))
}

pub fn value_group_at(t: &Tower, v: &ValuationRef) -> Result<Spine, ValfieldError> {
    Ok(spine_for(t, v.refinement)?.quotient_at(v.cut)?)
}

/// Segment index and inside offset of a normalized cut.
fn cut_parts(g: &Spine, cut: Cut) -> Result<(usize, Option<i64>), ValfieldError> {
    Ok(match g.normalize_cut(cut)? {
        Cut::Top => (0, None),
        Cut::Bottom => (g.segments().len(), None),
        Cut::AtBoundary(s) => (s, None),
        Cut::Inside(s, k) => (s, Some(k)),
    })
}

/// The residue field of a valuation, as a tower: the extensions (or parts
/// of them) lying in the killed subgroup over the appropriate base.
pub fn residue_at(t: &Tower, v: &ValuationRef) -> Result<Tower, ValfieldError> {
    let data = base_data(&t.base, v.refinement)?;
    let full = spine_for(t, v.refinement)?;
    let (seg, start) = cut_parts(&full, v.cut)?;

    // significance-ordered blocks: outermost extension first, base block last
    let n_ext = t.extensions.len();
    let mut offset = 0usize;
    for i in (0..n_ext).rev() {
        let g = &t.extensions[i];
        let len = g.segments().len();
        if seg < offset + len {
            // the cut falls inside this extension: keep its final part and
            // every inner extension
            let local = match start {
                Some(k) => Cut::Inside(seg - offset, k),
                None => Cut::AtBoundary(seg - offset),
            };
            let part = g.subgroup_at(local)?;
            let mut extensions = t.extensions[..i].to_vec();
            if !part.is_trivial() {
                extensions.push(part);
            }
            return Ok(Tower::new(t.base.clone(), extensions));
        }
        offset += len;
    }
    // the killed subgroup lies within the base block
    let Some(d) = data else {
        return Ok(Tower::base_only(t.base.clone()));
    };
    let local = match start {
        Some(k) => Cut::Inside(seg - offset, k),
        None => Cut::AtBoundary(seg - offset),
    };
    Ok(Tower::base_only(coarsened_base(&t.base, &d, local)?))
}

/// The residue field of the base under the coarsening of its valuation `d`
/// by the convex subgroup at `cut`.
fn coarsened_base(base: &BaseField, d: &CanonicalData, cut: Cut) -> Result<BaseField, ValfieldError> {
    let cut = d.spine.normalize_cut(cut)?;
    match cut {
        Cut::Top => return Ok(base.clone()),
        Cut::Bottom => return Ok((*d.residue).clone()),
        _ => {}
    }
    let sub = d.spine.subgroup_at(cut)?;
    let r = &d.residue;
    let characteristic = if base.characteristic == r.characteristic {
        r.characteristic
    } else {
        // mixed characteristic: p is a unit of the coarsening iff v(p) is killed
        match &d.value_of_p {
            Some(vp) => {
                let lead = vp.leading_position().ok_or(crate::oag::OagError::ZeroElement)?;
                if d.spine.cut_contains_position(cut, lead)? {
                    base.characteristic
                } else {
                    r.characteristic
                }
            }
            None => {
                return Err(ValfieldError::Insufficient(format!(
                    "{}: value of p needed to find the residue characteristic",
                    base.name
                )))
            }
        }
    };
    let mut f = BaseField::unknown(format!("{} residue at {cut:?}", base.name), characteristic);
    f.henselian = Some(true);
    f.t_henselian = Some(true);
    if r.separably_closed == Some(false) {
        f.separably_closed = Some(false);
    }
    f.real_closed = match (r.real_closed, oag::is_divisible(&sub)) {
        (_, false) | (Some(false), _) => Some(false),
        (Some(true), true) => Some(true),
        (None, true) => None,
    };
    f.finite_transcendence_degree = base.finite_transcendence_degree;
    // v(p) survives in the subgroup exactly when p became a unit
    let value_of_p = match &d.value_of_p {
        Some(vp) if characteristic == 0 && r.characteristic != 0 => {
            let (cs, k) = cut_parts(&d.spine, cut)?;
            let mut e = Element::zero();
            for (pos, x) in vp.support() {
                let offset = if pos.seg == cs { pos.offset - k.unwrap_or(0) } else { pos.offset };
                e = e.add(&Element::unit(Position::new(pos.seg - cs, offset), x.clone()));
            }
            Some(e)
        }
        _ => None,
    };
    f.canonical = Some(CanonicalData {
        spine: sub,
        residue: r.clone(),
        value_of_p,
    });
    Ok(f)
}

/// Whether the valuation is henselian.
pub fn is_henselian_ref(t: &Tower, v: &ValuationRef) -> Result<Flag, ValfieldError> {
    match v.refinement {
        Refinement::None | Refinement::BaseCanonical => {
            spine_for(t, v.refinement)?;
            Ok(Some(true))
        }
        Refinement::BaseCanonicalP(p) => {
            let full = spine_for(t, v.refinement)?;
            let composed = composed_spine(t);
            // coarsenings that kill the whole base block are power-series valuations
            let (seg, start) = cut_parts(&full, v.cut)?;
            if seg < composed.segments().len() || (seg == composed.segments().len() && start.is_none()) {
                return Ok(Some(true));
            }
            let same = match (&t.base.canonical, base_p_data(&t.base, p)?) {
                (Some(c), Some(d)) => *c == d,
                _ => false,
            };
            Ok(if same { Some(true) } else { None })
        }
    }
}

/// Henselian valuations are `p`-henselian; the canonical `p`-henselian
/// composition and its coarsenings are `p`-henselian by construction.
pub fn is_p_henselian_ref(t: &Tower, v: &ValuationRef, p: u32) -> Result<Flag, ValfieldError> {
    match v.refinement {
        Refinement::BaseCanonicalP(q) if q == p => {
            spine_for(t, v.refinement)?;
            Ok(Some(true))
        }
        _ => is_henselian_ref(t, v),
    }
}

fn build(t: &Tower, valuation: ValuationRef, spine: Spine) -> Result<CanonicalValuation, ValfieldError> {
    Ok(CanonicalValuation {
        value_group: spine.quotient_at(valuation.cut)?,
        residue: residue_at(t, &valuation)?,
        valuation,
        spine,
    })
}

/// The coarsest henselian valuation with separably closed residue field, or
/// the finest henselian valuation if there is none.
pub fn canonical_henselian(t: &Tower) -> Result<CanonicalValuation, ValfieldError> {
    let base = &t.base;
    let refinement = match (base.separably_closed, base.henselian) {
        (Some(true), _) => Refinement::None,
        (_, Some(true)) => Refinement::BaseCanonical,
        (_, Some(false)) => Refinement::None,
        (_, None) => {
            return Err(ValfieldError::Insufficient(format!(
                "{}: unknown whether the base is henselian",
                base.name
            )))
        }
    };
    if !t.has_extensions() && refinement == Refinement::None {
        return Err(ValfieldError::NoHenselianValuation(t.describe()));
    }
    let spine = spine_for(t, refinement)?;
    let finest_residue = match base_data(base, refinement)? {
        Some(d) => *d.residue,
        None => base.clone(),
    };
    let cut = match finest_residue.separably_closed {
        Some(true) => oag::max_divisible_subgroup(&spine),
        Some(false) => Cut::Bottom,
        None => {
            return Err(ValfieldError::Insufficient(format!(
                "{}: unknown whether the residue field is separably closed",
                finest_residue.name
            )))
        }
    };
    build(t, ValuationRef::new(cut, refinement), spine)
}

/// The coarsest `p`-henselian valuation with `p`-closed residue field, or
/// the finest `p`-henselian valuation if there is none; trivial when the
/// field is `p`-closed and carries no such valuation.
pub fn canonical_p_henselian(t: &Tower, p: u32) -> Result<CanonicalPValuation, ValfieldError> {
    if !oag::is_prime(p) {
        return Err(ValfieldError::NotPrime(p));
    }
    let base = &t.base;
    let data = base_p_data(base, p)?;
    let refinement = if data.is_some() {
        Refinement::BaseCanonicalP(p)
    } else {
        Refinement::None
    };
    let spine = spine_for(t, refinement)?;
    let finest_residue = match data {
        Some(d) => *d.residue,
        None => base.clone(),
    };
    let cut = match finest_residue.is_p_closed(p) {
        Some(true) => oag::max_p_divisible_subgroup(&spine, p),
        Some(false) => Cut::Bottom,
        None => {
            return Err(ValfieldError::Insufficient(format!(
                "{}: unknown whether the residue field has a Galois extension of degree {p}",
                finest_residue.name
            )))
        }
    };
    let valuation = build(t, ValuationRef::new(cut, refinement), spine)?;
    let (definable_uniformly, side_conditions) = uniform_definability(t, p);
    Ok(CanonicalPValuation {
        prime: p,
        valuation,
        definable_uniformly,
        side_conditions,
    })
}

/// Side conditions under which the canonical `p`-henselian valuation is
/// parameter-free definable by a formula depending only on `p`:
/// characteristic different from `p`, `zeta_p` in the field, `sqrt(-1)` in
/// the field when `p = 2` in characteristic 0, and a Galois extension of
/// degree `p`.
pub fn uniform_definability(t: &Tower, p: u32) -> (bool, Vec<String>) {
    let mut ok = true;
    let mut notes = Vec::new();
    let mut need = |flag: Flag, what: &str| match flag {
        Some(true) => notes.push(format!("{what}: yes")),
        Some(false) => {
            ok = false;
            notes.push(format!("{what}: no"));
        }
        None => {
            ok = false;
            notes.push(format!("{what}: unknown"));
        }
    };
    need(Some(t.characteristic() != p), &format!("characteristic differs from {p}"));
    need(t.contains_zeta_p(p), &format!("primitive root of unity of order {p}"));
    if p == 2 && t.characteristic() == 0 {
        need(t.sqrt_minus_one(), "square root of -1");
    }
    need(t.is_p_closed(p).map(|b| !b), &format!("Galois extension of degree {p}"));
    (ok, notes)
}

/// Every nontrivial henselian valuation, coarsest first. Assumes, for bases
/// that are not henselian, that these are exactly the coarsenings of the
/// power-series composition.
pub fn henselian_valuations(t: &Tower) -> Result<Vec<ValuationRef>, ValfieldError> {
    let refinement = match (t.base.separably_closed, t.base.henselian) {
        (Some(true), _) | (_, Some(false)) => Refinement::None,
        (_, Some(true)) => Refinement::BaseCanonical,
        (_, None) => {
            return Err(ValfieldError::Insufficient(format!(
                "{}: unknown whether the base is henselian",
                t.base.name
            )))
        }
    };
    let spine = spine_for(t, refinement)?;
    let cuts = spine.finite_cuts().ok_or(ValfieldError::Infinite)?;
    Ok(cuts
        .into_iter()
        .filter(|c| *c != Cut::Top && !spine.is_trivial())
        .map(|c| ValuationRef::new(c, refinement))
        .collect())
}
