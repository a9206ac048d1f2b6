use z2lab_core::fock::{binomial, build_family, fixture_n2, verify_family};

#[test]
fn trace_identity_and_verification() {
    for n in 1..=3 {
        let f = build_family(n).unwrap();
        let c = binomial(2 * n as u64, n as u64) as f64;
        for (i, a) in f.ops.iter().enumerate() {
            for (j, b) in f.ops.iter().enumerate() {
                let t = a.adjoint_mul(b).trace();
                let want = if i == j { c } else { 0.0 };
                assert_eq!((t.re, t.im), (want, 0.0));
            }
        }
        let r = verify_family(&f, 1e-12, 100, 42);
        assert!(r.passed, "{r:?}");
        let car = r.car.expect("Fock families carry CAR residuals");
        assert_eq!((car.anti, car.mixed, car.restriction_mismatches), (0, 0, 0));
    }
}

#[test]
fn fixture_agrees_with_construction_on_invariants() {
    let a = verify_family(&fixture_n2(), 1e-12, 100, 42);
    let b = verify_family(&build_family(2).unwrap(), 1e-12, 100, 42);
    assert!(a.passed && b.passed);
    for check in &a.checks {
        let other = b.check(check.name).expect("same check names");
        assert_eq!(check.pass, other.pass, "{}", check.name);
    }
}
