//! Fourth-order moment profiles of orthonormal systems.
//!
//! A system is probed only through the words τ(w* x y* z). Gaussian families
//! are evaluated with Wick's theorem, group characters through the group law
//! (τ(λ_w* λ_x λ_y* λ_z) = 1 iff −w + x − y + z = 0).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::intsets::FiniteSet;
use crate::matrix::C64;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum GaussianKind {
    /// E[γ_i γ̄_j] = δ_ij, E[γ_i γ_j] = 0.
    Complex,
    /// E[g_i g_j] = δ_ij.
    Real,
}

/// One factor of a word: (family index, conjugated?).
pub type Factor = (usize, bool);

fn count_bijections(left: &mut Vec<usize>, right: &mut Vec<usize>) -> u64 {
    let Some(a) = left.pop() else {
        return 1;
    };
    let mut total = 0;
    for k in 0..right.len() {
        if right[k] == a {
            let b = right.swap_remove(k);
            total += count_bijections(left, right);
            right.push(b);
            let last = right.len() - 1;
            right.swap(k, last);
        }
    }
    left.push(a);
    total
}

fn count_matchings(items: &mut Vec<usize>) -> u64 {
    let Some(a) = items.pop() else {
        return 1;
    };
    let mut total = 0;
    for k in 0..items.len() {
        if items[k] == a {
            let b = items.swap_remove(k);
            total += count_matchings(items);
            items.push(b);
            let last = items.len() - 1;
            items.swap(k, last);
        }
    }
    items.push(a);
    total
}

/// E[Π factors] for i.i.d. standard Gaussians, by counting Wick pairings.
///
/// In the complex case only unconjugated–conjugated pairs with equal index
/// contribute; a word with unequal numbers of each is exactly 0.
pub fn gaussian_moment(word: &[Factor], kind: GaussianKind) -> f64 {
    match kind {
        GaussianKind::Complex => {
            let mut plain: Vec<usize> = word.iter().filter(|f| !f.1).map(|f| f.0).collect();
            let mut conj: Vec<usize> = word.iter().filter(|f| f.1).map(|f| f.0).collect();
            if plain.len() != conj.len() {
                return 0.0;
            }
            count_bijections(&mut plain, &mut conj) as f64
        }
        GaussianKind::Real => {
            if word.len() % 2 == 1 {
                return 0.0;
            }
            let mut all: Vec<usize> = word.iter().map(|f| f.0).collect();
            count_matchings(&mut all) as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SystemSpec {
    ComplexGaussian { d: usize },
    RealGaussian { d: usize },
    GroupCharacters(FiniteSet),
}

impl SystemSpec {
    pub fn len(&self) -> usize {
        match self {
            Self::ComplexGaussian { d } | Self::RealGaussian { d } => *d,
            Self::GroupCharacters(FiniteSet::Integers(v)) => v.len(),
            Self::GroupCharacters(FiniteSet::Lattice(v)) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn elements(&self) -> Vec<(i64, i64)> {
        match self {
            Self::GroupCharacters(FiniteSet::Integers(v)) => {
                v.elements().iter().map(|&x| (x, 0)).collect()
            }
            Self::GroupCharacters(FiniteSet::Lattice(v)) => v.points().to_vec(),
            _ => Vec::new(),
        }
    }
}

/// τ(w* x y* z) for the system, or for its adjoint system when `star`.
fn word_moment(spec: &SystemSpec, elements: &[(i64, i64)], star: bool, w: [usize; 4]) -> f64 {
    let word = [(w[0], !star), (w[1], star), (w[2], !star), (w[3], star)];
    match spec {
        SystemSpec::ComplexGaussian { .. } => gaussian_moment(&word, GaussianKind::Complex),
        SystemSpec::RealGaussian { .. } => gaussian_moment(&word, GaussianKind::Real),
        SystemSpec::GroupCharacters(_) => {
            let mut s = (0i128, 0i128);
            for (idx, conj) in word {
                let (a, b) = elements[idx];
                let sign = if conj { -1 } else { 1 };
                s.0 += sign * a as i128;
                s.1 += sign * b as i128;
            }
            if s == (0, 0) {
                1.0
            } else {
                0.0
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentProfile {
    #[cfg_attr(feature = "serde", serde(rename = "N1"))]
    pub n1: f64,
    #[cfg_attr(feature = "serde", serde(rename = "N2"))]
    pub n2: f64,
    #[cfg_attr(feature = "serde", serde(rename = "Z21"))]
    pub z21: f64,
    #[cfg_attr(feature = "serde", serde(rename = "Z22"))]
    pub z22: f64,
    #[cfg_attr(feature = "serde", serde(rename = "Z23"))]
    pub z23: f64,
    pub beta: f64,
    pub eta: f64,
    pub alpha: f64,
}

impl MomentProfile {
    /// Fills in β, η and α from the five base quantities.
    pub fn from_parts(n1: f64, n2: f64, z21: f64, z22: f64, z23: f64) -> Self {
        Self {
            n1,
            n2,
            z21,
            z22,
            z23,
            beta: n1 - n2 - z21 + z22 + z23,
            eta: n1 - n2 + z22 + z23,
            alpha: (n2 + z21).max(n1 + z22 + z23),
        }
    }
}

/// Profile of a family of size d given its word moments τ(w* x y* z).
pub fn profile_from_moments(d: usize, tau: impl Fn([usize; 4]) -> C64) -> Result<MomentProfile> {
    if d < 2 {
        return Err(Error::InvalidParameter(
            "a moment profile needs at least two elements".into(),
        ));
    }
    let n1 = (0..d)
        .map(|x| tau([x, x, x, x]).re)
        .fold(f64::MIN, f64::max);
    let mut n2 = f64::MAX;
    for x in 0..d {
        for y in 0..d {
            if x != y {
                n2 = n2.min(tau([x, x, y, y]).re);
            }
        }
    }
    let mut z21 = 0.0f64;
    for w in 0..d {
        for x in 0..d {
            if w == x {
                continue;
            }
            let mut s = 0.0;
            for y in 0..d {
                for z in 0..d {
                    s += tau([w, x, y, z]).norm();
                }
            }
            z21 = z21.max(s);
        }
    }
    let mut z22 = 0.0f64;
    let mut z23 = 0.0f64;
    for x in 0..d {
        let mut s22 = 0.0;
        let mut s23 = 0.0;
        for y in 0..d {
            if y != x {
                s23 += (tau([x, x, y, y]).re - n2).abs();
            }
            for z in 0..d {
                if y != z {
                    s22 += tau([x, x, y, z]).norm();
                }
            }
        }
        z22 = z22.max(s22);
        z23 = z23.max(s23);
    }
    Ok(MomentProfile::from_parts(n1, n2, z21, z22, z23))
}

fn profile_impl(spec: &SystemSpec, star: bool) -> Result<MomentProfile> {
    let elements = spec.elements();
    profile_from_moments(spec.len(), |w| {
        C64::new(word_moment(spec, &elements, star, w), 0.0)
    })
}

/// Exact profile of W.
pub fn profile(spec: &SystemSpec) -> Result<MomentProfile> {
    profile_impl(spec, false)
}

/// Exact profile of W* = {x* : x ∈ W}.
pub fn profile_star(spec: &SystemSpec) -> Result<MomentProfile> {
    profile_impl(spec, true)
}

/// 1/√max(α(W), α(W*)).
pub fn khintchine_constant(p: &MomentProfile, p_star: &MomentProfile) -> f64 {
    1.0 / libm::sqrt(p.alpha.max(p_star.alpha))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrosscheckReport {
    pub z21: f64,
    pub z2: usize,
    pub z22: f64,
    pub z23: f64,
    pub agrees: bool,
}

/// Z_{2,1} of the character system by moment summation, against the
/// combinatorial Z₂ constant.
pub fn group_profile_crosscheck(v: &FiniteSet) -> Result<CrosscheckReport> {
    let spec = SystemSpec::GroupCharacters(v.clone());
    let p = profile(&spec)?;
    let z2 = crate::intsets::z2_report(v).z2;
    Ok(CrosscheckReport {
        z21: p.z21,
        z2,
        z22: p.z22,
        z23: p.z23,
        agrees: p.z21 == z2 as f64 && p.z22 == 0.0 && p.z23 == 0.0,
    })
}

/// Samples per Monte Carlo shard. Fixed so that results do not depend on how
/// shards are spread over threads.
pub const MC_SHARD_SIZE: usize = 1 << 16;
/// Minimum number of Monte Carlo samples.
pub const MC_MIN_SAMPLES: usize = 10_000;
/// Exact values further than this many standard errors from the estimate are flagged.
pub const MC_FLAG_SIGMAS: f64 = 4.0;

/// Running sums for every word τ(w* x y* z) over a block of samples.
#[derive(Debug, Clone, PartialEq)]
pub struct McAccumulator {
    d: usize,
    samples: usize,
    /// Per word: Σ re, Σ im, Σ re², Σ im².
    sums: Vec<[f64; 4]>,
}

impl McAccumulator {
    pub fn new(d: usize) -> Self {
        Self {
            d,
            samples: 0,
            sums: vec![[0.0; 4]; d * d * d * d],
        }
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// Adds another block; call in shard order for reproducible sums.
    pub fn merge(&mut self, other: &Self) {
        self.samples += other.samples;
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            for k in 0..4 {
                a[k] += b[k];
            }
        }
    }

    fn index(&self, w: [usize; 4]) -> usize {
        ((w[0] * self.d + w[1]) * self.d + w[2]) * self.d + w[3]
    }

    fn mean(&self, w: [usize; 4]) -> C64 {
        let s = self.sums[self.index(w)];
        C64::new(s[0], s[1]) / self.samples as f64
    }

    fn standard_error(&self, w: [usize; 4]) -> (f64, f64) {
        let s = self.sums[self.index(w)];
        let n = self.samples as f64;
        let se = |sum: f64, sq: f64| {
            let m = sum / n;
            libm::sqrt(((sq / n - m * m).max(0.0)) / (n - 1.0))
        };
        (se(s[0], s[2]), se(s[1], s[3]))
    }
}

fn gaussian_kind(spec: &SystemSpec) -> Result<(GaussianKind, usize)> {
    match spec {
        SystemSpec::ComplexGaussian { d } => Ok((GaussianKind::Complex, *d)),
        SystemSpec::RealGaussian { d } => Ok((GaussianKind::Real, *d)),
        SystemSpec::GroupCharacters(_) => Err(Error::InvalidParameter(
            "Monte Carlo is only defined for Gaussian systems".into(),
        )),
    }
}

/// Number of shards needed for `samples` samples.
pub fn mc_shard_count(samples: usize) -> usize {
    samples.div_ceil(MC_SHARD_SIZE)
}

/// Accumulates shard `shard` of a run of `samples` total samples.
pub fn mc_shard(
    spec: &SystemSpec,
    samples: usize,
    seed: u64,
    shard: usize,
) -> Result<McAccumulator> {
    let (kind, d) = gaussian_kind(spec)?;
    let start = shard * MC_SHARD_SIZE;
    let count = samples.saturating_sub(start).min(MC_SHARD_SIZE);
    let mut acc = McAccumulator::new(d);
    let mut r = rng::seeded(rng::derive_seed(seed, shard as u64));
    let mut g = vec![C64::new(0.0, 0.0); d];
    for _ in 0..count {
        for gi in g.iter_mut() {
            *gi = match kind {
                GaussianKind::Complex => {
                    rng::complex_normal(&mut r) * core::f64::consts::FRAC_1_SQRT_2
                }
                GaussianKind::Real => C64::new(rng::normal(&mut r), 0.0),
            };
        }
        let mut idx = 0;
        for w in 0..d {
            for x in 0..d {
                let wx = g[w].conj() * g[x];
                for y in 0..d {
                    let wxy = wx * g[y].conj();
                    for &gz in &g[..d] {
                        let v = wxy * gz;
                        let s = &mut acc.sums[idx];
                        s[0] += v.re;
                        s[1] += v.im;
                        s[2] += v.re * v.re;
                        s[3] += v.im * v.im;
                        idx += 1;
                    }
                }
            }
        }
    }
    acc.samples = count;
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FlaggedMoment {
    pub word: [usize; 4],
    pub exact: f64,
    pub estimate_re: f64,
    pub estimate_im: f64,
    pub se_re: f64,
    pub se_im: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct McReport {
    pub d: usize,
    pub samples: usize,
    pub seed: u64,
    /// Profile computed from the estimated moments.
    pub profile: MomentProfile,
    /// Standard error of the N1 word τ(|x₀|⁴).
    pub n1_standard_error: f64,
    /// Largest |estimate − exact| / standard error over all words and both parts.
    pub max_sigma: f64,
    pub flagged: Vec<FlaggedMoment>,
}

/// Compares a merged accumulator with the exact Wick moments.
pub fn mc_report(spec: &SystemSpec, acc: &McAccumulator, seed: u64) -> Result<McReport> {
    let (_, d) = gaussian_kind(spec)?;
    if acc.d != d {
        return Err(Error::InvalidParameter("accumulator size mismatch".into()));
    }
    let profile = profile_from_moments(d, |w| acc.mean(w))?;
    let mut flagged = Vec::new();
    let mut max_sigma = 0.0f64;
    for w in 0..d {
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    let word = [w, x, y, z];
                    let exact = word_moment(spec, &[], false, word);
                    let m = acc.mean(word);
                    let (se_re, se_im) = acc.standard_error(word);
                    let mut out = false;
                    for (dev, se) in [((m.re - exact).abs(), se_re), (m.im.abs(), se_im)] {
                        if se > 0.0 {
                            max_sigma = max_sigma.max(dev / se);
                        }
                        out |= dev > MC_FLAG_SIGMAS * se;
                    }
                    if out {
                        flagged.push(FlaggedMoment {
                            word,
                            exact,
                            estimate_re: m.re,
                            estimate_im: m.im,
                            se_re,
                            se_im,
                        });
                    }
                }
            }
        }
    }
    Ok(McReport {
        d,
        samples: acc.samples,
        seed,
        profile,
        n1_standard_error: acc.standard_error([0, 0, 0, 0]).0,
        max_sigma,
        flagged,
    })
}

/// Sequential Monte Carlo estimate of the profile of a Gaussian family.
pub fn monte_carlo_profile(spec: &SystemSpec, samples: usize, seed: u64) -> Result<McReport> {
    if samples < MC_MIN_SAMPLES {
        return Err(Error::InvalidParameter("need at least 10^4 samples".into()));
    }
    let (_, d) = gaussian_kind(spec)?;
    if d < 2 {
        return Err(Error::InvalidParameter("d must be at least 2".into()));
    }
    let mut acc = McAccumulator::new(d);
    for shard in 0..mc_shard_count(samples) {
        acc.merge(&mc_shard(spec, samples, seed, shard)?);
    }
    mc_report(spec, &acc, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intsets::{greedy_sidon, powers, IntegerSet};

    fn factorial(n: u64) -> u64 {
        (1..=n).product()
    }

    fn double_factorial(n: u64) -> u64 {
        (1..=n).rev().step_by(2).product()
    }

    #[test]
    fn single_variable_wick_counts() {
        for m in 1..=4usize {
            let mut word = vec![(0, false); m];
            word.extend(vec![(0, true); m]);
            assert_eq!(
                gaussian_moment(&word, GaussianKind::Complex),
                factorial(m as u64) as f64
            );
            assert_eq!(
                gaussian_moment(&vec![(0, false); 2 * m], GaussianKind::Real),
                double_factorial(2 * m as u64 - 1) as f64
            );
        }
        assert_eq!(
            gaussian_moment(&[(0, false), (0, false)], GaussianKind::Complex),
            0.0
        );
        assert_eq!(
            gaussian_moment(&[(0, false), (1, true)], GaussianKind::Complex),
            0.0
        );
        assert_eq!(
            gaussian_moment(&[(1, false), (1, true)], GaussianKind::Complex),
            1.0
        );
        let mixed = [(0, true), (0, false), (1, true), (1, false)];
        assert_eq!(gaussian_moment(&mixed, GaussianKind::Complex), 1.0);
    }

    #[test]
    fn gaussian_profiles() {
        for d in 2..6 {
            let p = profile(&SystemSpec::ComplexGaussian { d }).unwrap();
            assert_eq!(p, MomentProfile::from_parts(2.0, 1.0, 1.0, 0.0, 0.0));
            assert_eq!(p.alpha, 2.0);
            let p = profile(&SystemSpec::RealGaussian { d }).unwrap();
            assert_eq!(
                (p.n1, p.n2, p.z22, p.z23, p.alpha),
                (3.0, 1.0, 0.0, 0.0, 3.0)
            );
            assert_eq!(p.z21, 2.0);
        }
        let c = SystemSpec::ComplexGaussian { d: 3 };
        let k = khintchine_constant(&profile(&c).unwrap(), &profile_star(&c).unwrap());
        assert!((k - crate::INV_SQRT2).abs() < 1e-15);
        let r = SystemSpec::RealGaussian { d: 3 };
        let k = khintchine_constant(&profile(&r).unwrap(), &profile_star(&r).unwrap());
        assert!((k - 1.0 / libm::sqrt(3.0)).abs() < 1e-15);
    }

    #[test]
    fn character_profiles() {
        for v in [
            powers(2, 8).unwrap(),
            IntegerSet::new(vec![0, 1, 2, 3]),
            greedy_sidon(15).unwrap(),
        ] {
            let r = group_profile_crosscheck(&v.clone().into()).unwrap();
            assert!(r.agrees, "{r:?}");
            let p = profile(&SystemSpec::GroupCharacters(v.into())).unwrap();
            assert_eq!((p.n1, p.n2), (1.0, 1.0));
            assert_eq!(p.beta, -p.z21);
            assert_eq!(p.alpha, 1.0 + p.z21);
        }
    }

    #[test]
    fn too_small_family_is_rejected() {
        assert!(profile(&SystemSpec::ComplexGaussian { d: 1 }).is_err());
    }

    #[test]
    fn monte_carlo_small_run() {
        let spec = SystemSpec::ComplexGaussian { d: 2 };
        let r = monte_carlo_profile(&spec, 50_000, 1).unwrap();
        assert!((r.profile.n1 - 2.0).abs() < 6.0 * r.n1_standard_error);
        assert!(monte_carlo_profile(&spec, 10, 1).is_err());
    }
}
