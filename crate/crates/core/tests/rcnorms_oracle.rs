use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use z2lab_core::rcnorms::{
    decomposition_value, s1_rc_lower, s1_rc_norm, s1_rc_upper, AscentOptions, MatrixTuple,
};
use z2lab_core::{CMat, C64};

fn gaussian(r: &mut ChaCha8Rng) -> f64 {
    // Box-Muller keeps the oracle free of the library's own sampler.
    let u: f64 = r.random::<f64>().max(1e-300);
    let v: f64 = r.random();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

fn random_mat(r: &mut ChaCha8Rng, n: usize, s: f64) -> CMat {
    CMat::from_fn(n, n, |_, _| C64::new(gaussian(r) * s, gaussian(r) * s))
}

#[test]
fn sampled_decompositions_never_beat_the_dual() {
    let mut r = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..4 {
        let c: Vec<CMat> = (0..2).map(|_| random_mat(&mut r, 2, 1.0)).collect();
        let t = MatrixTuple::new(c.clone()).unwrap();
        let lower = s1_rc_lower(&t, &AscentOptions::default()).value;
        let upper = s1_rc_upper(&t, true).value;
        let mut best = f64::INFINITY;
        for k in 0..100_000 {
            let spread = [0.05, 0.2, 0.8][k % 3];
            let lam: f64 = r.random();
            let y: Vec<CMat> = c
                .iter()
                .map(|ci| &ci.scale_real(lam) + &random_mat(&mut r, 2, spread))
                .collect();
            let z: Vec<CMat> = c.iter().zip(&y).map(|(ci, yi)| ci - yi).collect();
            best = best.min(decomposition_value(&y, &z));
        }
        assert!(
            lower <= best + 1e-10,
            "trial {trial}: lower {lower} > sampled {best}"
        );
        assert!(
            upper <= best + 1e-10,
            "trial {trial}: upper {upper} > sampled {best}"
        );
        println!("trial {trial}: lower {lower:.10} upper {upper:.10} sampled {best:.10}");
    }
}

#[test]
fn random_brackets_are_tight() {
    let mut r = ChaCha8Rng::seed_from_u64(11);
    for &(n, d) in &[(2usize, 3usize), (3, 4), (4, 6)] {
        let c: Vec<CMat> = (0..d).map(|_| random_mat(&mut r, n, 1.0)).collect();
        let t = MatrixTuple::new(c).unwrap();
        let b = s1_rc_norm(&t, 1e-8, &AscentOptions::default()).unwrap();
        b.audit(t.mats()).unwrap();
        println!(
            "n={n} d={d}: {:.10} {:.10} gap {:.2e} {:?}",
            b.lower,
            b.upper,
            b.relative_gap(),
            b.certificate_source
        );
    }
}
