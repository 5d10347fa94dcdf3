use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use valdef_core::decide::{analyze, check_verdict, Level, DEFAULT_PRIMES};
use valdef_core::formula::{
    delta0_membership, delta_gamma_membership, p_antiregularity_sentence, p_regularity_sentence, OagFormula,
};
use valdef_core::oag::{self, Equivalence, GroupIndex};
use valdef_core::replay::random_tower;
use valdef_core::valfield::{BaseField, Catalog};
use valdef_core::{Component, Cut, Element, Segment, Spine};

fn component() -> impl Strategy<Value = Component> {
    prop_oneof![
        3 => Just(Component::Z),
        3 => Just(Component::Q),
        1 => prop::sample::select(vec![2u32, 3, 5]).prop_map(Component::ZLoc),
        1 => prop::sample::select(vec![2u32, 3, 5]).prop_map(Component::ZInv),
    ]
}

fn segment() -> impl Strategy<Value = Segment> {
    prop_oneof![
        4 => prop::collection::vec(component(), 1..=3).prop_map(Segment::Finite),
        1 => component().prop_map(Segment::LeftRay),
        1 => component().prop_map(Segment::RightRay),
        1 => component().prop_map(Segment::BiInfinite),
    ]
}

fn spine() -> impl Strategy<Value = Spine> {
    prop::collection::vec(segment(), 1..=3).prop_map(|s| Spine::new(s).unwrap())
}

fn finite_spine() -> impl Strategy<Value = Spine> {
    prop::collection::vec(component(), 1..=5).prop_map(|cs| Spine::finite(&cs))
}

fn zq_spine() -> impl Strategy<Value = Spine> {
    prop::collection::vec(prop_oneof![Just(Component::Z), Just(Component::Q)], 1..=4).prop_map(|cs| Spine::finite(&cs))
}

fn zq_element(g: &Spine) -> impl Strategy<Value = Element> {
    let g = g.clone();
    let n = g.rank().unwrap();
    prop::collection::vec(-6i64..=6, n).prop_map(move |cs| Element::from_ints(&g, &cs).unwrap())
}

fn prime() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 5, 7])
}

proptest! {
    #[test]
    fn spines_round_trip_through_json(g in spine()) {
        let text = serde_json::to_string(&g).unwrap();
        prop_assert_eq!(serde_json::from_str::<Spine>(&text).unwrap(), g.clone());
    }

    #[test]
    fn subgroup_and_quotient_split_the_rank(g in finite_spine()) {
        let n = g.rank().unwrap();
        for cut in g.finite_cuts().unwrap() {
            let (s, q) = (g.subgroup_at(cut).unwrap(), g.quotient_at(cut).unwrap());
            prop_assert_eq!(s.rank().unwrap() + q.rank().unwrap(), n);
            prop_assert_eq!(g.normalize_cut(g.normalize_cut(cut).unwrap()).unwrap(), g.normalize_cut(cut).unwrap());
        }
    }

    #[test]
    fn smallest_subgroup_with_divisible_quotient(g in spine(), p in prime()) {
        let d0 = oag::delta0(&g, p);
        prop_assert!(oag::is_p_divisible(&g.quotient_at(d0).unwrap(), p));
        if let Some(cuts) = g.finite_cuts() {
            for c in cuts {
                if oag::is_p_divisible(&g.quotient_at(c).unwrap(), p) {
                    prop_assert!(g.cut_contains(c, d0).unwrap(), "{c:?} has a divisible quotient but is smaller than {d0:?}");
                }
            }
        }
    }

    #[test]
    fn parameter_subgroup_contains_its_parameter(
        (g, gamma) in zq_spine().prop_flat_map(|g| (Just(g.clone()), zq_element(&g))),
        p in prime(),
    ) {
        let gamma = gamma.abs();
        prop_assume!(!gamma.is_zero());
        let dg = oag::delta_gamma(&g, p, &gamma).unwrap();
        let lead = gamma.leading_position().unwrap();
        prop_assert!(g.cut_contains_position(dg, lead).unwrap());
        // the quotient has no nontrivial p-divisible convex subgroup
        let q = g.quotient_at(dg).unwrap();
        for c in q.finite_cuts().unwrap() {
            let sub = q.subgroup_at(c).unwrap();
            prop_assert!(sub.is_trivial() || !oag::is_p_divisible(&sub, p));
        }
    }

    #[test]
    fn divisible_groups_are_regular(g in spine(), p in prime()) {
        if oag::is_p_divisible(&g, p) {
            prop_assert!(oag::is_p_regular(&g, p));
            prop_assert_eq!(oag::index_mod_p(&g, p), GroupIndex::Finite(1u32.into()));
        }
        if oag::is_p_antiregular(&g, p) {
            prop_assert!(!oag::has_rank1_quotient(&g));
            prop_assert!(!oag::is_p_divisible(&g, p));
        }
    }

    #[test]
    fn finite_index_counts_non_divisible_positions(g in finite_spine(), p in prime()) {
        let k = g.finite_components().unwrap().iter().filter(|c| !c.is_p_divisible(p)).count() as u32;
        prop_assert_eq!(oag::index_mod_p(&g, p), GroupIndex::Finite(pow(p, k).into()));
    }

    #[test]
    fn equivalence_is_reflexive_and_symmetric(g in spine(), h in spine()) {
        prop_assert_eq!(oag::maybe_equiv(&g, &g), Equivalence::Equivalent);
        prop_assert_eq!(oag::maybe_equiv(&g, &h), oag::maybe_equiv(&h, &g));
        prop_assert_eq!(oag::maybe_equiv(&g, &oag::equiv_normalize(&g)), Equivalence::Equivalent);
    }

    #[test]
    fn element_order_is_compatible_with_addition(
        (g, a, b, c) in zq_spine().prop_flat_map(|g| (Just(g.clone()), zq_element(&g), zq_element(&g), zq_element(&g)))
    ) {
        prop_assert_eq!(a.add(&b).sub(&b), a.clone());
        prop_assert_eq!(a.lex_cmp(&b), a.add(&c).lex_cmp(&b.add(&c)));
        prop_assert_eq!(oag::element_cmp(&g, &a, &b).unwrap(), a.lex_cmp(&b));
    }

    #[test]
    fn formulas_round_trip(p in prime()) {
        let fs = [p_regularity_sentence(p), p_antiregularity_sentence(p), delta0_membership(p), delta_gamma_membership(p)];
        for f in fs {
            prop_assert_eq!(OagFormula::from_sexpr(&f.to_sexpr()).unwrap(), f.clone());
            prop_assert_eq!(OagFormula::from_json(&f.to_json()).unwrap(), f);
        }
    }
}

fn pow(p: u32, k: u32) -> u64 {
    u64::from(p).pow(k)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verdicts_hold_their_promises(seed in any::<u64>()) {
        let cat = Catalog::builtin();
        let bases: Vec<&BaseField> = cat.fields().collect();
        let t = random_tower(&mut ChaCha8Rng::seed_from_u64(seed), &bases);
        let a = analyze(&t, &DEFAULT_PRIMES);
        let mut all: Vec<_> = [&a.thm_a, &a.thm_b, &a.cor_00].into_iter().filter_map(|o| o.verdict()).collect();
        for pa in &a.primes {
            all.extend(pa.ptame.verdict());
            all.extend(pa.tb.verdict());
        }
        for v in all {
            prop_assert!(check_verdict(&t, v).is_ok(), "{t}: {v}");
            if v.level == Level::NotDefinable {
                prop_assert!(!v.citations.is_empty());
            }
            if v.level.is_positive() {
                prop_assert!(v.witness_cut.is_some_and(|c| c != Cut::Top));
            }
        }
        if let (Some(va), Some(vb)) = (a.thm_a.verdict(), a.thm_b.verdict()) {
            if va.level == Level::EmptysetDefinable {
                prop_assert!(vb.level.strength() >= va.level.strength());
            }
        }
    }

    #[test]
    fn unknown_bases_are_inconclusive(g in finite_spine(), char_p in prop::sample::select(vec![0u32, 2, 3])) {
        let t = valdef_core::valfield::Tower::new(BaseField::unknown("K", char_p), vec![g]);
        let a = analyze(&t, &DEFAULT_PRIMES);
        for o in [&a.thm_a, &a.thm_b] {
            let v = o.verdict();
            prop_assert!(v.is_some_and(|v| v.is_inconclusive()), "{o}");
        }
    }
}
