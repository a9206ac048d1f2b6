//! Partial-isometry families from the antisymmetric Fock space.
//!
//! For a one-particle space with basis e₁, …, e_{2n+1}, the annihilators
//! a_k = a(e_k) map the (n+1)-particle sector onto the n-particle sector.
//! Both sectors have dimension d = C(2n+1, n+1); fixing colex order on the
//! subsets indexing each sector turns every a_k into a d×d signed 0/1 matrix
//! with
//!
//! * Tr(a_k* a_k) = C(2n, n),
//! * Σ a_k* a_k = Σ a_k a_k* = (n+1)·I_d,
//! * b = Σ g_k a_k is a partial isometry with Tr(b* b) = C(2n, n) whenever Σ|g_k|² = 1.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{CMat, C64};
use crate::rng;

/// Largest accepted sector dimension (n ≤ 6).
pub const DEFAULT_DIMENSION_CAP: usize = 3432;

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Bitmask of a subset of {1, …, 2n+1}; bit k−1 set iff k is in the subset.
type Subset = u32;

fn subsets_colex(universe: u32, size: u32) -> Vec<Subset> {
    // Increasing bitmask order is colex order for fixed-size subsets.
    (0..(1u32 << universe))
        .filter(|s| s.count_ones() == size)
        .collect()
}

/// The two sector bases in colex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetBasis {
    pub n: usize,
    /// (n+1)-subsets of {1, …, 2n+1}, each sorted ascending.
    pub upper: Vec<Vec<u32>>,
    /// n-subsets of {1, …, 2n+1}.
    pub lower: Vec<Vec<u32>>,
}

fn subset_elements(s: Subset) -> Vec<u32> {
    (0..32)
        .filter(|b| s & (1 << b) != 0)
        .map(|b| b + 1)
        .collect()
}

impl SubsetBasis {
    pub fn new(n: usize) -> Self {
        let universe = 2 * n as u32 + 1;
        Self {
            n,
            upper: subsets_colex(universe, n as u32 + 1)
                .into_iter()
                .map(subset_elements)
                .collect(),
            lower: subsets_colex(universe, n as u32)
                .into_iter()
                .map(subset_elements)
                .collect(),
        }
    }
}

/// a_k |S⟩ = (−1)^{#{j ∈ S : j < k}} |S ∖ {k}⟩, zero if k ∉ S. `k` is 1-based.
fn annihilate(k: u32, s: Subset) -> Option<(i64, Subset)> {
    let bit = 1u32 << (k - 1);
    if s & bit == 0 {
        return None;
    }
    let below = (s & (bit - 1)).count_ones();
    Some((if below.is_multiple_of(2) { 1 } else { -1 }, s & !bit))
}

/// a_k* |S⟩ = (−1)^{#{j ∈ S : j < k}} |S ∪ {k}⟩, zero if k ∈ S.
fn create(k: u32, s: Subset) -> Option<(i64, Subset)> {
    let bit = 1u32 << (k - 1);
    if s & bit != 0 {
        return None;
    }
    let below = (s & (bit - 1)).count_ones();
    Some((if below.is_multiple_of(2) { 1 } else { -1 }, s | bit))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FamilyOrigin {
    /// Restriction of the Fock-space annihilators.
    Fock,
    /// Hand-written n = 2 matrices.
    Fixture,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsometryFamily {
    pub n: usize,
    pub d: usize,
    pub ops: Vec<CMat>,
    pub origin: FamilyOrigin,
}

pub fn build_family(n: usize) -> Result<IsometryFamily> {
    build_family_capped(n, DEFAULT_DIMENSION_CAP)
}

pub fn build_family_capped(n: usize, cap: usize) -> Result<IsometryFamily> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    if n > 15 {
        return Err(Error::DimensionCap {
            dim: usize::MAX,
            cap,
        });
    }
    let d = binomial(2 * n as u64 + 1, n as u64 + 1) as usize;
    if d > cap {
        return Err(Error::DimensionCap { dim: d, cap });
    }
    let universe = 2 * n as u32 + 1;
    let upper = subsets_colex(universe, n as u32 + 1);
    let lower = subsets_colex(universe, n as u32);
    let ops = (1..=universe)
        .map(|k| {
            let mut a = CMat::zeros(d, d);
            for (col, &s) in upper.iter().enumerate() {
                if let Some((sign, t)) = annihilate(k, s) {
                    let row = lower.binary_search(&t).expect("n-subset present");
                    a[(row, col)] = C64::new(sign as f64, 0.0);
                }
            }
            a
        })
        .collect();
    Ok(IsometryFamily {
        n,
        d,
        ops,
        origin: FamilyOrigin::Fock,
    })
}

/// The five explicit 10×10 matrices for n = 2 (E_{i,j} 1-indexed, row i, column j).
pub fn fixture_n2() -> IsometryFamily {
    const UNITS: [[(i8, usize, usize); 6]; 5] = [
        [
            (1, 6, 1),
            (1, 5, 2),
            (1, 4, 3),
            (1, 3, 4),
            (1, 2, 5),
            (1, 1, 6),
        ],
        [
            (-1, 9, 1),
            (-1, 8, 2),
            (-1, 7, 3),
            (1, 3, 7),
            (1, 2, 8),
            (1, 1, 9),
        ],
        [
            (-1, 8, 4),
            (-1, 7, 5),
            (-1, 5, 7),
            (-1, 4, 8),
            (1, 1, 10),
            (1, 10, 1),
        ],
        [
            (1, 10, 2),
            (1, 9, 4),
            (1, 6, 7),
            (-1, 7, 6),
            (-1, 4, 9),
            (-1, 2, 10),
        ],
        [
            (1, 10, 3),
            (1, 9, 5),
            (1, 8, 6),
            (1, 6, 8),
            (1, 5, 9),
            (1, 3, 10),
        ],
    ];
    let ops = UNITS
        .iter()
        .map(|units| {
            let mut a = CMat::zeros(10, 10);
            for &(s, i, j) in units {
                a[(i - 1, j - 1)] = C64::new(s as f64, 0.0);
            }
            a
        })
        .collect();
    IsometryFamily {
        n: 2,
        d: 10,
        ops,
        origin: FamilyOrigin::Fixture,
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &'static str, value: f64, tol: f64) -> Self {
        Self {
            name,
            value,
            tol,
            pass: value <= tol,
        }
    }
}

/// Exact anticommutator residuals on the full Fock space, as integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CarResiduals {
    /// max over i, j of the largest entry of {a_i, a_j}.
    pub anti: i64,
    /// max over i, j of the largest entry of {a_i, a_j*} − δ_ij·1.
    pub mixed: i64,
    /// Entries where the d×d matrices differ from the Fock restriction.
    pub restriction_mismatches: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FamilyReport {
    pub n: usize,
    pub d: usize,
    pub checks: Vec<Check>,
    pub car: Option<CarResiduals>,
    pub passed: bool,
}

impl FamilyReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Largest universe for which the full Fock-space CAR check runs (2¹³ states).
pub const CAR_MAX_MODES: u32 = 13;

/// Verifies the family invariants, `trials` random unit combinations, and
/// (for Fock-backed families) the CAR relations.
pub fn verify_family(f: &IsometryFamily, tol: f64, trials: usize, seed: u64) -> FamilyReport {
    let n = f.n;
    let d = f.d;
    let expected_trace = binomial(2 * n as u64, n as u64) as f64;
    let id_scaled = CMat::identity(d).scale_real((n + 1) as f64);

    let projections: Vec<CMat> = f.ops.iter().map(|a| a.adjoint_mul(a)).collect();

    let mut trace_dev = 0.0f64;
    let mut cross_dev = 0.0f64;
    for (i, a) in f.ops.iter().enumerate() {
        for (j, b) in f.ops.iter().enumerate() {
            let t = a.adjoint_mul(b).trace();
            let want = if i == j { expected_trace } else { 0.0 };
            let dev = (t - C64::new(want, 0.0)).norm();
            if i == j {
                trace_dev = trace_dev.max(dev);
            } else {
                cross_dev = cross_dev.max(dev);
            }
        }
    }

    let mut col_sum = CMat::zeros(d, d);
    let mut row_sum = CMat::zeros(d, d);
    for (a, p) in f.ops.iter().zip(&projections) {
        col_sum = &col_sum + p;
        row_sum = &row_sum + &a.mul_adjoint(a);
    }
    let sum_dev = (&col_sum - &id_scaled)
        .frobenius_norm()
        .max((&row_sum - &id_scaled).frobenius_norm());

    let member_pi = projections
        .iter()
        .map(|p| (&(p * p) - p).frobenius_norm())
        .fold(0.0, f64::max);

    let mut trial_pi = 0.0f64;
    let mut trial_trace = 0.0f64;
    for t in 0..trials {
        let mut r = rng::seeded(rng::derive_seed(seed, t as u64));
        let mut g: Vec<C64> = (0..f.ops.len())
            .map(|_| rng::complex_normal(&mut r))
            .collect();
        let norm = libm::sqrt(g.iter().map(|z| z.norm_sqr()).sum::<f64>());
        g.iter_mut().for_each(|z| *z /= norm);
        let (pi, tr) = combination_residuals(f, &g, expected_trace);
        trial_pi = trial_pi.max(pi);
        trial_trace = trial_trace.max(tr);
    }

    let mut checks = vec![
        Check::new("trace", trace_dev, tol),
        Check::new("trace_cross", cross_dev, tol),
        Check::new("sums", sum_dev, tol),
        Check::new("member_partial_isometry", member_pi, tol),
        Check::new("trial_partial_isometry", trial_pi, tol),
        Check::new("trial_trace", trial_trace, tol.max(1e-10)),
    ];

    let car = match f.origin {
        FamilyOrigin::Fock if (2 * n as u32 + 1) <= CAR_MAX_MODES => Some(car_residuals(f)),
        _ => None,
    };
    if let Some(c) = car {
        checks.push(Check::new("car_anti", c.anti as f64, 0.0));
        checks.push(Check::new("car_mixed", c.mixed as f64, 0.0));
        checks.push(Check::new(
            "fock_restriction",
            c.restriction_mismatches as f64,
            0.0,
        ));
    }
    let passed = checks.iter().all(|c| c.pass);
    FamilyReport {
        n,
        d,
        checks,
        car,
        passed,
    }
}

/// For b = Σ g_k a_k: (‖(b*b)² − b*b‖_F, |Tr(b*b) − C(2n,n)|).
pub fn combination_residuals(f: &IsometryFamily, g: &[C64], expected_trace: f64) -> (f64, f64) {
    let mut b = CMat::zeros(f.d, f.d);
    for (a, &gk) in f.ops.iter().zip(g) {
        b.add_assign_scaled(a, gk);
    }
    let bb = b.adjoint_mul(&b);
    let pi = (&(&bb * &bb) - &bb).frobenius_norm();
    let tr = (bb.trace() - C64::new(expected_trace, 0.0)).norm();
    (pi, tr)
}

/// Sparse exact evaluation of the CAR on all 2^{2n+1} basis states.
fn car_residuals(f: &IsometryFamily) -> CarResiduals {
    let modes = 2 * f.n as u32 + 1;
    let states = 1u32 << modes;
    let mut anti = 0i64;
    let mut mixed = 0i64;
    // Each term maps |S⟩ to ±|S'⟩; collect the (at most two) images and add.
    let accumulate = |terms: [Option<(i64, Subset)>; 2], s: Subset, delta: i64| -> i64 {
        let mut out: Vec<(Subset, i64)> = Vec::with_capacity(3);
        let mut push = |st: Subset, c: i64| {
            if let Some(e) = out.iter_mut().find(|e| e.0 == st) {
                e.1 += c;
            } else {
                out.push((st, c));
            }
        };
        for (c, st) in terms.into_iter().flatten() {
            push(st, c);
        }
        push(s, -delta);
        out.iter().map(|e| e.1.abs()).max().unwrap_or(0)
    };
    for i in 1..=modes {
        for j in 1..=modes {
            for s in 0..states {
                let aa = [
                    annihilate(j, s).and_then(|(c, t)| annihilate(i, t).map(|(c2, u)| (c * c2, u))),
                    annihilate(i, s).and_then(|(c, t)| annihilate(j, t).map(|(c2, u)| (c * c2, u))),
                ];
                anti = anti.max(accumulate(aa, s, 0));
                let am = [
                    create(j, s).and_then(|(c, t)| annihilate(i, t).map(|(c2, u)| (c * c2, u))),
                    annihilate(i, s).and_then(|(c, t)| create(j, t).map(|(c2, u)| (c * c2, u))),
                ];
                mixed = mixed.max(accumulate(am, s, (i == j) as i64));
            }
        }
    }

    let upper = subsets_colex(modes, f.n as u32 + 1);
    let lower = subsets_colex(modes, f.n as u32);
    let mut mismatches = 0;
    for (k, a) in f.ops.iter().enumerate() {
        for (col, &s) in upper.iter().enumerate() {
            let image = annihilate(k as u32 + 1, s);
            for (row, &t) in lower.iter().enumerate() {
                let want = match image {
                    Some((c, u)) if u == t => c as f64,
                    _ => 0.0,
                };
                if a[(row, col)] != C64::new(want, 0.0) {
                    mismatches += 1;
                }
            }
        }
    }
    CarResiduals {
        anti,
        mixed,
        restriction_mismatches: mismatches,
    }
}
