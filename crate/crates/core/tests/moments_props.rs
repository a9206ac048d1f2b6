use proptest::prelude::*;
use std::collections::BTreeMap;
use z2lab_core::intsets::IntegerSet;
use z2lab_core::moments::{
    gaussian_moment, group_profile_crosscheck, profile, profile_star, GaussianKind, SystemSpec,
};

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn double_factorial_odd(n: usize) -> f64 {
    // (n − 1)!! for even n.
    (1..n).step_by(2).map(|k| k as f64).product()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn complex_wick_closed_form(word in prop::collection::vec((0usize..3, any::<bool>()), 0..9)) {
        let mut balance: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for &(i, c) in &word {
            let e = balance.entry(i).or_default();
            if c { e.1 += 1 } else { e.0 += 1 }
        }
        let want = if balance.values().all(|(a, b)| a == b) {
            balance.values().map(|(a, _)| factorial(*a)).product()
        } else {
            0.0
        };
        prop_assert_eq!(gaussian_moment(&word, GaussianKind::Complex), want);
    }

    #[test]
    fn real_wick_closed_form(word in prop::collection::vec((0usize..3, any::<bool>()), 0..9)) {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for &(i, _) in &word {
            *counts.entry(i).or_default() += 1;
        }
        let want = if counts.values().all(|c| c % 2 == 0) {
            counts.values().map(|&c| double_factorial_odd(c)).product()
        } else {
            0.0
        };
        prop_assert_eq!(gaussian_moment(&word, GaussianKind::Real), want);
    }

    #[test]
    fn character_profiles(v in prop::collection::btree_set(-30i64..30, 2..12)) {
        let set = IntegerSet::new(v.into_iter().collect());
        let r = group_profile_crosscheck(&set.clone().into()).unwrap();
        prop_assert!(r.agrees);
        let spec = SystemSpec::GroupCharacters(set.into());
        let p = profile(&spec).unwrap();
        prop_assert_eq!(p.beta, -(r.z2 as f64));
        prop_assert!(p.alpha >= 1.0);
        prop_assert_eq!(profile_star(&spec).unwrap(), p);
    }
}

#[test]
fn gaussian_profiles_do_not_depend_on_d() {
    let c2 = profile(&SystemSpec::ComplexGaussian { d: 2 }).unwrap();
    let r2 = profile(&SystemSpec::RealGaussian { d: 2 }).unwrap();
    for d in 3..8 {
        assert_eq!(profile(&SystemSpec::ComplexGaussian { d }).unwrap(), c2);
        assert_eq!(profile(&SystemSpec::RealGaussian { d }).unwrap(), r2);
        assert_eq!(
            profile_star(&SystemSpec::ComplexGaussian { d }).unwrap(),
            c2
        );
    }
}
