//! Base fields described by flags, and the catalog of named bases.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ValfieldError;
use crate::oag::{self, Element, Spine};

/// A tri-state flag: `None` means the property is not known.
pub type Flag = Option<bool>;

/// Facts about a field that depend on a prime.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimeFlags {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub has_galois_ext_of_degree_p: Flag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contains_zeta_p: Flag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub has_sep_ext_degree_div_p_squared: Flag,
    /// Only consulted for `p = 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sqrt_minus_one: Flag,
    /// Carries a nontrivial `p`-henselian valuation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_henselian: Flag,
}

/// What the base asserts about the canonical value groups of its
/// elementary extensions that carry a henselian valuation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElemClass {
    /// Every henselian elementary extension has divisible canonical value group.
    AllDivisible,
    /// Some henselian elementary extension has non-divisible canonical value group.
    SomeNonDivisible,
}

/// A valuation on the base field: its value group and residue field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanonicalData {
    pub spine: Spine,
    pub residue: Box<BaseField>,
    /// The value of the element `p` when the residue characteristic is a
    /// prime `p` and the base has characteristic zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_of_p: Option<Element>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseField {
    pub name: String,
    /// `0` or a prime.
    pub characteristic: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separably_closed: Flag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub real_closed: Flag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub henselian: Flag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_henselian: Flag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub small_absolute_galois: Flag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finite_transcendence_degree: Flag,
    /// Elementarily equivalent to a field with no nontrivial henselian
    /// valuation, which rules out parameter-free definitions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equiv_to_non_henselian: Flag,
    /// Flags for explicitly listed primes.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub primes: BTreeMap<u32, PrimeFlags>,
    /// Flags for every prime not listed in `primes`.
    #[serde(default, skip_serializing_if = "is_default")]
    pub other_primes: PrimeFlags,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elem_class: Option<ElemClass>,
    /// The canonical henselian valuation, when nontrivial.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical: Option<CanonicalData>,
    /// The canonical `p`-henselian valuation per prime, when nontrivial.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub canonical_p: BTreeMap<u32, CanonicalData>,
}

fn is_default(f: &PrimeFlags) -> bool {
    *f == PrimeFlags::default()
}

impl BaseField {
    /// A field about which nothing but the name and characteristic is known.
    pub fn unknown(name: impl Into<String>, characteristic: u32) -> Self {
        BaseField {
            name: name.into(),
            characteristic,
            separably_closed: None,
            real_closed: None,
            henselian: None,
            t_henselian: None,
            small_absolute_galois: None,
            finite_transcendence_degree: None,
            equiv_to_non_henselian: None,
            primes: BTreeMap::new(),
            other_primes: PrimeFlags::default(),
            elem_class: None,
            canonical: None,
            canonical_p: BTreeMap::new(),
        }
    }

    pub fn prime_flags(&self, p: u32) -> &PrimeFlags {
        self.primes.get(&p).unwrap_or(&self.other_primes)
    }

    /// `zeta_p` lies in the field; `-1` is always a square root of unity
    /// of order 2 outside characteristic 2.
    pub fn contains_zeta_p(&self, p: u32) -> Flag {
        if self.characteristic == p {
            return Some(false);
        }
        if p == 2 {
            return Some(true);
        }
        self.prime_flags(p).contains_zeta_p
    }

    /// `K(p) = K`, i.e. no Galois extension of degree `p`.
    pub fn is_p_closed(&self, p: u32) -> Flag {
        if self.separably_closed == Some(true) {
            return Some(true);
        }
        self.prime_flags(p).has_galois_ext_of_degree_p.map(|b| !b)
    }

    /// Checks the flag invariants and recurses into residue data.
    pub fn validate(&self) -> Result<(), ValfieldError> {
        let bad = |msg: &str| Err(ValfieldError::Inconsistent(self.name.clone(), msg.to_string()));
        if self.characteristic != 0 && !oag::is_prime(self.characteristic) {
            return bad("characteristic must be 0 or a prime");
        }
        if self.separably_closed == Some(true) {
            if self.t_henselian.is_some() {
                return bad("t_henselian must be unset on a separably closed field");
            }
            if self.real_closed == Some(true) {
                return bad("separably closed and real closed are exclusive");
            }
        }
        if self.henselian == Some(true) && self.t_henselian == Some(false) {
            return bad("henselian implies t_henselian");
        }
        if self.equiv_to_non_henselian == Some(true) && self.t_henselian == Some(false) {
            return bad("a field equivalent to a non-henselian one is t-henselian only if henselian fields share its theory");
        }
        if self.real_closed == Some(true) && self.characteristic != 0 {
            return bad("real closed fields have characteristic 0");
        }
        if self.henselian == Some(true) && self.separably_closed != Some(true) && self.canonical.is_none() {
            return bad("henselian base needs canonical valuation data");
        }
        for (p, flags) in &self.primes {
            if !oag::is_prime(*p) {
                return bad("per-prime flags must be keyed by primes");
            }
            if flags.p_henselian == Some(true)
                && self.is_p_closed(*p) == Some(false)
                && !self.canonical_p.contains_key(p)
                && self.canonical.is_none()
            {
                return bad("p-henselian base needs canonical p-henselian data");
            }
        }
        if self.henselian == Some(true)
            && self.primes.values().chain([&self.other_primes]).any(|f| f.p_henselian == Some(false))
        {
            return bad("henselian implies p-henselian for every prime");
        }
        // a p-closed field has p-divisible value groups
        let mut primes: Vec<u32> = self.primes.keys().chain(self.canonical_p.keys()).copied().collect();
        primes.extend(self.canonical.iter().flat_map(|c| c.spine.representative_primes()));
        primes.push(oag::smallest_prime_outside(&primes));
        for p in primes {
            let groups = self.canonical.iter().chain(self.canonical_p.get(&p)).map(|c| &c.spine);
            if self.is_p_closed(p) == Some(true) && groups.into_iter().any(|g| !oag::is_p_divisible(g, p)) {
                return bad("a field without Galois extensions of degree p has p-divisible value groups");
            }
        }
        for (p, data) in &self.canonical_p {
            if !oag::is_prime(*p) {
                return bad("canonical p-henselian data must be keyed by primes");
            }
            data.validate()?;
        }
        if let Some(data) = &self.canonical {
            data.validate()?;
        }
        Ok(())
    }
}

impl CanonicalData {
    fn validate(&self) -> Result<(), ValfieldError> {
        if let Some(v) = &self.value_of_p {
            v.check_on(&self.spine)?;
        }
        self.residue.validate()
    }
}

/// Named base fields. The built-in catalog ships with the crate; user
/// catalogs are merged on top by name.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Catalog {
    fields: BTreeMap<String, BaseField>,
}

const BUILTIN: &str = include_str!("../../data/catalog.json");

impl Catalog {
    pub fn builtin() -> Catalog {
        Catalog::from_json(BUILTIN).expect("built-in catalog is valid")
    }

    /// Parses a catalog: a JSON list of base fields.
    pub fn from_json(s: &str) -> Result<Catalog, ValfieldError> {
        let list: Vec<BaseField> = serde_json::from_str(s).map_err(|e| ValfieldError::Parse(e.to_string()))?;
        let mut cat = Catalog::default();
        for f in list {
            cat.insert(f)?;
        }
        Ok(cat)
    }

    /// Adds a field. Re-adding an identical entry is a no-op; a different
    /// entry under an existing name is a conflict.
    pub fn insert(&mut self, f: BaseField) -> Result<(), ValfieldError> {
        f.validate()?;
        match self.fields.get(&f.name) {
            Some(old) if *old == f => Ok(()),
            Some(_) => Err(ValfieldError::CatalogConflict(f.name)),
            None => {
                self.fields.insert(f.name.clone(), f);
                Ok(())
            }
        }
    }

    pub fn merge(&mut self, other: Catalog) -> Result<(), ValfieldError> {
        for f in other.fields.into_values() {
            self.insert(f)?;
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&BaseField, ValfieldError> {
        self.fields
            .get(name)
            .ok_or_else(|| ValfieldError::UnknownBase(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.fields.keys().map(String::as_str)
    }

    pub fn fields(&self) -> impl Iterator<Item = &BaseField> {
        self.fields.values()
    }

    pub fn to_json(&self) -> String {
        let list: Vec<&BaseField> = self.fields.values().collect();
        serde_json::to_string_pretty(&list).expect("catalog serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_entries_validate() {
        let cat = Catalog::builtin();
        for name in ["R", "C", "PZ", "PZ_L", "FJ", "F_2^alg", "Q_2^h", "Q_3^h"] {
            assert!(cat.get(name).is_ok(), "{name}");
        }
        assert!(matches!(cat.get("nope"), Err(ValfieldError::UnknownBase(_))));
    }

    #[test]
    fn merge_detects_conflicts() {
        let mut cat = Catalog::builtin();
        let same = Catalog::from_json(&format!("[{}]", serde_json::to_string(cat.get("R").unwrap()).unwrap())).unwrap();
        cat.merge(same).unwrap();
        let mut r = cat.get("R").unwrap().clone();
        r.small_absolute_galois = Some(false);
        let other = Catalog::from_json(&format!("[{}]", serde_json::to_string(&r).unwrap())).unwrap();
        assert_eq!(cat.merge(other), Err(ValfieldError::CatalogConflict("R".into())));
    }

    #[test]
    fn inconsistent_flags_rejected() {
        let mut f = BaseField::unknown("x", 0);
        f.separably_closed = Some(true);
        f.real_closed = Some(true);
        assert!(f.validate().is_err());
        let mut g = BaseField::unknown("y", 0);
        g.separably_closed = Some(true);
        g.t_henselian = Some(true);
        assert!(g.validate().is_err());
        let mut h = BaseField::unknown("z", 0);
        h.henselian = Some(true);
        assert!(h.validate().is_err());
        assert!(BaseField::unknown("w", 4).validate().is_err());
    }

    #[test]
    fn round_trips_through_json() {
        let cat = Catalog::builtin();
        assert_eq!(Catalog::from_json(&cat.to_json()).unwrap(), cat);
    }
}
