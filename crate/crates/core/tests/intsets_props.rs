use proptest::prelude::*;
use z2lab_core::intsets::{
    find_pattern, greedy_sidon, z2_constant, z2_report, zp_constant, IntegerSet, PatternKind,
};

fn small_set() -> impl Strategy<Value = IntegerSet> {
    prop::collection::btree_set(-40i64..40, 0..13)
        .prop_map(|s| IntegerSet::new(s.into_iter().collect()))
}

/// Pair-counting oracle written independently of the library's sorted-run scan.
fn z2_oracle(v: &[i64]) -> usize {
    let mut best = 0;
    for &a in v {
        for &b in v {
            let g = b - a;
            if g == 0 {
                continue;
            }
            let count = v.iter().filter(|&&x| v.contains(&(x + g))).count();
            best = best.max(count);
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_pair_count_oracle(v in small_set()) {
        prop_assert_eq!(z2_constant(&v), z2_oracle(v.elements()));
        prop_assert_eq!(z2_report(&v.clone().into()).z2, z2_constant(&v));
    }

    #[test]
    fn translation_and_reflection(v in small_set(), c in -1000i64..1000) {
        let z = z2_constant(&v);
        prop_assert_eq!(z2_constant(&v.translate(c)), z);
        prop_assert_eq!(z2_constant(&v.reflect()), z);
    }

    #[test]
    fn zp_two_is_z2(v in small_set()) {
        prop_assert_eq!(zp_constant(&v, 2).unwrap(), z2_constant(&v));
    }

    #[test]
    fn ap5_forces_z2_at_least_four(v in small_set()) {
        if find_pattern(&v, PatternKind::AP5).is_some() {
            prop_assert!(z2_constant(&v) >= 4);
        }
    }

    #[test]
    fn patterns_are_valid_subsets(v in prop::collection::btree_set(0i64..30, 5..20)) {
        let v = IntegerSet::new(v.into_iter().collect());
        for kind in PatternKind::ALL {
            if let Some(w) = find_pattern(&v, kind) {
                prop_assert!(w.validate().is_ok());
                prop_assert!(w.elements.iter().all(|&x| v.contains(x)));
            }
        }
    }

    #[test]
    fn large_z2_always_has_a_pattern(v in prop::collection::btree_set(0i64..25, 8..20)) {
        let v = IntegerSet::new(v.into_iter().collect());
        if z2_constant(&v) >= 7 {
            prop_assert!(PatternKind::ALL.iter().any(|&k| find_pattern(&v, k).is_some()));
        }
    }
}

#[test]
fn greedy_sidon_is_sidon() {
    for n in 1..=40 {
        assert!(z2_constant(&greedy_sidon(n).unwrap()) <= 1, "n = {n}");
    }
}
