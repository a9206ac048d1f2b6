use proptest::prelude::*;
use z2lab_core::matrix::hermitian_eig;
use z2lab_core::rcnorms::{
    pairing, s1_rc_lower, s1_rc_norm, s1_rc_upper, sinfty_rc_norm, AscentOptions, MatrixTuple,
};
use z2lab_core::{CMat, C64};

fn mat(n: usize) -> impl Strategy<Value = CMat> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
        CMat::from_vec(n, n, v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap()
    })
}

fn tuple(n: usize, d: usize) -> impl Strategy<Value = MatrixTuple> {
    prop::collection::vec(mat(n), d).prop_map(|m| MatrixTuple::new(m).unwrap())
}

fn quick() -> AscentOptions {
    AscentOptions {
        iterations: 50,
        restarts: 2,
        ..AscentOptions::default()
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sandwich(t in tuple(3, 3)) {
        let b = s1_rc_norm(&t, 1e-9, &quick()).unwrap();
        prop_assert!(b.lower <= b.upper);
        prop_assert!(b.audit(t.mats()).is_ok());
        prop_assert!(sinfty_rc_norm(&t) <= b.upper * (1.0 + 1e-12));
    }

    #[test]
    fn homogeneity(t in tuple(2, 3), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let lam = C64::new(re, im);
        prop_assume!(lam.norm() > 1e-3);
        let s = t.scale(lam);
        prop_assert!(rel(sinfty_rc_norm(&s), lam.norm() * sinfty_rc_norm(&t)) <= 1e-10);
        prop_assert!(rel(s1_rc_upper(&s, true).value, lam.norm() * s1_rc_upper(&t, true).value) <= 1e-8);
        prop_assert!(rel(s1_rc_lower(&s, &quick()).value, lam.norm() * s1_rc_lower(&t, &quick()).value) <= 1e-8);
    }

    #[test]
    fn unitary_invariance(t in tuple(3, 3), a in mat(3), b in mat(3)) {
        let u = hermitian_eig(&a.hermitian_part(), 1e-12).unwrap().basis;
        let v = hermitian_eig(&b.hermitian_part(), 1e-12).unwrap().basis;
        let s = t.map(|c| &(&u * c) * &v);
        prop_assert!(rel(sinfty_rc_norm(&s), sinfty_rc_norm(&t)) <= 1e-9);
        let (bt, bs) = (s1_rc_norm(&t, 1e-10, &quick()).unwrap(), s1_rc_norm(&s, 1e-10, &quick()).unwrap());
        prop_assert!(rel(bt.upper, bs.upper) <= 1e-9);
        prop_assert!(rel(bt.lower, bs.lower) <= 1e-9);
    }

    #[test]
    fn holder(t in tuple(3, 4), x in tuple(3, 4)) {
        let lhs = pairing(t.mats(), x.mats()).norm();
        prop_assert!(lhs <= s1_rc_upper(&t, true).value * sinfty_rc_norm(&x) * (1.0 + 1e-12));
    }

    #[test]
    fn scalar_collapse(v in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..8)) {
        let z: Vec<C64> = v.iter().map(|&(a, b)| C64::new(a, b)).collect();
        let l2 = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(l2 > 1e-6);
        let b = s1_rc_norm(&MatrixTuple::from_scalars(&z), 1e-10, &quick()).unwrap();
        prop_assert!((b.lower - l2).abs() <= 1e-8 * l2);
        prop_assert!((b.upper - l2).abs() <= 1e-8 * l2);
    }
}
