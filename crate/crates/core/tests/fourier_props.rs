use proptest::prelude::*;
use std::f64::consts::PI;
use z2lab_core::fock::build_family;
use z2lab_core::fourier::{l1_s1_norm, lem_bdd_check, linf_bracket, tau_moments, TrigMatrixPoly};
use z2lab_core::quad::{integrate, QuadOptions};
use z2lab_core::{CMat, C64};

fn mat(n: usize) -> impl Strategy<Value = CMat> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
        CMat::from_vec(n, n, v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap()
    })
}

fn poly(n: usize) -> impl Strategy<Value = TrigMatrixPoly> {
    (
        prop::collection::btree_set(-12i64..12, 1..5),
        prop::collection::vec(mat(n), 5),
    )
        .prop_map(|(f, m)| {
            let freqs: Vec<i64> = f.into_iter().collect();
            TrigMatrixPoly::new(m[..freqs.len()].to_vec(), freqs).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn translation_invariance(p in poly(2), shift in -500i64..500) {
        let q = p.translate(shift).unwrap();
        let (a, b) = (l1_s1_norm(&p, 1e-9).unwrap(), l1_s1_norm(&q, 1e-9).unwrap());
        prop_assert!((a.value - b.value).abs() <= 1e-9);
        let (ma, mb) = (tau_moments(&p), tau_moments(&q));
        prop_assert!((&ma.m2 - &mb.m2).max_abs() <= 1e-9);
        prop_assert!((linf_bracket(&p, 1e-9).unwrap().upper - linf_bracket(&q, 1e-9).unwrap().upper).abs() <= 1e-9);
    }

    #[test]
    fn first_moment_matches_quadrature(p in poly(2)) {
        let m1 = tau_moments(&p).m1;
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let re = integrate(|t| { let f = p.eval(t); f.adjoint_mul(&f)[(i, j)].re }, 0.0, 1.0, QuadOptions { tol: 1e-11, initial_panels: 32, ..QuadOptions::default() }).unwrap();
            let im = integrate(|t| { let f = p.eval(t); f.adjoint_mul(&f)[(i, j)].im }, 0.0, 1.0, QuadOptions { tol: 1e-11, initial_panels: 32, ..QuadOptions::default() }).unwrap();
            prop_assert!((re.value - m1[(i, j)].re).abs() <= 1e-9);
            prop_assert!((im.value - m1[(i, j)].im).abs() <= 1e-9);
        }
    }

    #[test]
    fn second_moment_matches_quadrature(p in poly(1)) {
        let m2 = tau_moments(&p).m2[(0, 0)].re;
        let q = integrate(|t| p.eval(t)[(0, 0)].norm_sqr().powi(2), 0.0, 1.0, QuadOptions { tol: 1e-11, initial_panels: 64, ..QuadOptions::default() }).unwrap();
        prop_assert!((q.value - m2).abs() <= 1e-8 * (1.0 + m2));
    }

    #[test]
    fn sup_bound_dominates_samples(p in poly(2)) {
        let b = linf_bracket(&p, 1e-8).unwrap();
        let sampled = (0..2000).map(|k| z2lab_core::matrix::op_norm(&p.eval(k as f64 / 2000.0))).fold(0.0, f64::max);
        prop_assert!(sampled <= b.upper + 1e-12);
        prop_assert!(b.upper - b.lower <= 1e-8);
        prop_assert!(lem_bdd_check(&p, 1e-9).unwrap());
    }
}

#[test]
fn factorization_identity_for_five_pairs() {
    let scalar = integrate(
        |t| (C64::new(1.0, 0.0) + C64::from_polar(1.0, 2.0 * PI * 3.0 * t)).norm(),
        0.0,
        1.0,
        QuadOptions {
            tol: 1e-12,
            ..QuadOptions::default()
        },
    )
    .unwrap();
    assert!((scalar.value - 4.0 / PI).abs() < 1e-10);
    let b = build_family(2).unwrap().ops;
    let mats: Vec<CMat> = b.iter().flat_map(|m| [m.clone(), m.clone()]).collect();
    let freqs: Vec<i64> = (0..5)
        .flat_map(|i| [7 * i * i + 2, 7 * i * i + 5])
        .collect();
    let p = TrigMatrixPoly::new(mats, freqs).unwrap();
    let l1 = l1_s1_norm(&p, 1e-9).unwrap();
    let want = scalar.value * 5f64.sqrt() * 6.0;
    assert!((l1.value - want).abs() < 1e-8, "{} vs {}", l1.value, want);
}

#[test]
fn sidon_fourth_moment_count() {
    let freqs: Vec<i64> = vec![1, 2, 4, 8, 13, 21, 31, 45, 66, 81];
    let d = freqs.len() as f64;
    let p =
        TrigMatrixPoly::new(vec![CMat::scalar(C64::new(1.0, 0.0)); freqs.len()], freqs).unwrap();
    assert_eq!(tau_moments(&p).m2[(0, 0)].re, 2.0 * d * d - d);
}
