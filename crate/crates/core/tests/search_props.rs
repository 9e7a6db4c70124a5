use num_rational::Rational64;
use proptest::prelude::*;
use spooky_core::search::{
    astar_search, bfs_oracle, min_pebbles_for_depth, SearchError, SearchParams, TieBreak,
};
use spooky_core::{construct, depth_lower_bound, validate, Variant, WeightProfile};

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::Plain), Just(Variant::MeasuredTarget)]
}

fn weights() -> impl Strategy<Value = WeightProfile> {
    prop_oneof![
        Just(WeightProfile::unit()),
        Just(WeightProfile::factoring(2, Rational64::from_integer(1))),
        Just(WeightProfile::factoring(1, Rational64::new(1, 2))),
    ]
}

fn depth_of(p: &SearchParams) -> Option<usize> {
    match astar_search(p) {
        Ok(r) => Some(r.optimal_depth),
        Err(SearchError::Infeasible) => None,
        Err(e) => panic!("{e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn results_validate_and_respect_floors(len in 1usize..14, s in 1usize..7, v in variant(), w in weights(), tb: bool) {
        let tie = if tb { TieBreak::MinTotalOps } else { TieBreak::None };
        let p = SearchParams::new(len, s, v).weights(w.clone()).tie_break(tie);
        match astar_search(&p) {
            Ok(r) => {
                let rep = validate(&r.schedule, &w);
                prop_assert!(rep.valid, "{:?}", rep.failure);
                prop_assert_eq!(rep.depth, r.optimal_depth);
                prop_assert_eq!(rep.cost, r.total_ops);
                prop_assert!(rep.weighted_space <= Rational64::from_integer(s as i64));
                prop_assert!(r.optimal_depth >= depth_lower_bound(len, v));
                prop_assert!(r.max_expanded_f <= r.optimal_depth);
                prop_assert_eq!(r.tie_break, tie);
            }
            Err(e) => prop_assert_eq!(e, SearchError::Infeasible),
        }
    }

    #[test]
    fn monotone_in_pebbles(len in 1usize..14, v in variant(), w in weights()) {
        let mut prev: Option<usize> = None;
        for s in 1..8 {
            let d = depth_of(&SearchParams::new(len, s, v).weights(w.clone()).tie_break(TieBreak::None));
            if let (Some(a), Some(b)) = (prev, d) {
                prop_assert!(b <= a, "s={s}: {b} > {a}");
            }
            prop_assert!(prev.is_none() || d.is_some(), "feasibility lost at s={s}");
            prev = d;
        }
    }

    #[test]
    fn deterministic_across_thread_hints(len in 1usize..12, s in 1usize..6, v in variant(), w in weights()) {
        let p = SearchParams::new(len, s, v).weights(w);
        let a = astar_search(&p.clone().threads(1));
        let b = astar_search(&p.threads(4));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn min_total_never_worse(len in 1usize..13, s in 2usize..7, v in variant(), w in weights()) {
        let p = SearchParams::new(len, s, v).weights(w);
        if let (Ok(a), Ok(b)) = (astar_search(&p.clone().tie_break(TieBreak::MinTotalOps)), astar_search(&p.tie_break(TieBreak::None))) {
            prop_assert_eq!(a.optimal_depth, b.optimal_depth);
            prop_assert!(a.total_ops <= b.total_ops);
        }
    }

    #[test]
    fn weighted_cap_between_integers(len in 2usize..9, s in 2usize..5, v in variant()) {
        // a fractional cap behaves like its floor under unit weights
        let w = WeightProfile::unit();
        let frac = SearchParams::new(len, s + 1, v).space_cap(Rational64::new(2 * s as i64 + 1, 2)).tie_break(TieBreak::None);
        let whole = SearchParams::new(len, s, v).tie_break(TieBreak::None);
        prop_assert_eq!(depth_of(&frac.weights(w)), depth_of(&whole));
    }
}

#[test]
fn min_pebbles_examples() {
    let unit = WeightProfile::unit();
    assert_eq!(min_pebbles_for_depth(1, 2, &unit, Variant::Plain), Ok(1));
    assert_eq!(min_pebbles_for_depth(3, 6, &unit, Variant::Plain), Ok(3));
    let s7 = min_pebbles_for_depth(7, 14, &unit, Variant::Plain).unwrap();
    assert!(s7 <= construct(7, Variant::Plain).space());
    assert!(matches!(min_pebbles_for_depth(3, 5, &unit, Variant::Plain), Err(SearchError::InvalidInput(_))));
}

#[test]
fn min_pebbles_matches_oracle() {
    let unit = WeightProfile::unit();
    for v in [Variant::Plain, Variant::MeasuredTarget] {
        for len in 1..=8 {
            let target = depth_lower_bound(len, v);
            let s = min_pebbles_for_depth(len, target, &unit, v).unwrap();
            let at = |s: usize| bfs_oracle(len, s, &unit, None, v).map(|r| r.optimal_depth);
            if s <= 5 {
                assert_eq!(at(s), Ok(target), "len={len} s={s}");
            }
            if s >= 2 && s - 1 <= 5 {
                assert!(at(s - 1).map_or(true, |d| d > target), "len={len}: s-1 already reaches {target}");
            }
        }
    }
}

#[test]
fn node_cap_is_reported() {
    let p = SearchParams::new(20, 6, Variant::Plain).node_cap(50);
    assert_eq!(astar_search(&p), Err(SearchError::MemoryLimit(50)));
}

#[test]
fn construction_space_is_enough_for_optimal_depth() {
    for len in 1..=20 {
        let s = construct(len, Variant::Plain).space();
        let r = astar_search(&SearchParams::new(len, s, Variant::Plain).tie_break(TieBreak::None)).unwrap();
        assert_eq!(r.optimal_depth, 2 * len, "len={len}");
    }
}
