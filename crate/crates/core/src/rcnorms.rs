//! Column/row square-function norms of matrix tuples.
//!
//! For a tuple C = (C₁, …, C_d) of n×n matrices:
//!
//! * ‖C‖_{S_∞(ℓ₂^rc)} = max(‖ΣC_i*C_i‖^{1/2}, ‖ΣC_iC_i*‖^{1/2}),
//! * ‖C‖_{S₁(ℓ₂^rc)} = inf over C = Y + Z of Tr(ΣY_i*Y_i)^{1/2} + Tr(ΣZ_iZ_i*)^{1/2}.
//!
//! The S₁ norm is reported as a bracket. The upper end is the value of an
//! explicit decomposition; the lower end is |Tr ΣC_iX_i| for an explicit X in
//! the S_∞ unit ball, which bounds the infimum from below by duality.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::{self, CMat, C64};
use crate::rng;

/// Slack allowed when checking certificate feasibility.
pub const CERTIFICATE_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTuple {
    mats: Vec<CMat>,
    frequencies: Option<Vec<i64>>,
}

impl MatrixTuple {
    /// All matrices must share one square shape.
    pub fn new(mats: Vec<CMat>) -> Result<Self> {
        if let Some(first) = mats.first() {
            if !first.is_square() {
                return Err(Error::NotSquare {
                    rows: first.rows(),
                    cols: first.cols(),
                });
            }
            if let Some(bad) = mats.iter().find(|m| m.shape() != first.shape()) {
                return Err(Error::ShapeMismatch {
                    expected: first.shape(),
                    found: bad.shape(),
                });
            }
        }
        Ok(Self {
            mats,
            frequencies: None,
        })
    }

    pub fn with_frequencies(mats: Vec<CMat>, frequencies: Vec<i64>) -> Result<Self> {
        let mut t = Self::new(mats)?;
        if frequencies.len() != t.mats.len() {
            return Err(Error::InvalidParameter(format!(
                "{} frequencies for {} matrices",
                frequencies.len(),
                t.mats.len()
            )));
        }
        let mut sorted = frequencies.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateFrequency(w[0]));
        }
        t.frequencies = Some(frequencies);
        Ok(t)
    }

    /// Scalars as 1×1 matrices.
    pub fn from_scalars(values: &[C64]) -> Self {
        Self {
            mats: values.iter().map(|&z| CMat::scalar(z)).collect(),
            frequencies: None,
        }
    }

    pub fn mats(&self) -> &[CMat] {
        &self.mats
    }

    pub fn frequencies(&self) -> Option<&[i64]> {
        self.frequencies.as_deref()
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    /// Matrix size n (0 for an empty tuple).
    pub fn n(&self) -> usize {
        self.mats.first().map_or(0, |m| m.rows())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            mats: self.mats.iter().map(|m| m.scale(s)).collect(),
            frequencies: self.frequencies.clone(),
        }
    }

    /// Applies `f` to every coefficient, keeping frequencies.
    pub fn map(&self, f: impl Fn(&CMat) -> CMat) -> Self {
        Self {
            mats: self.mats.iter().map(f).collect(),
            frequencies: self.frequencies.clone(),
        }
    }

    pub fn into_mats(self) -> Vec<CMat> {
        self.mats
    }
}

/// Σ C_i* C_i.
pub fn column_square(mats: &[CMat]) -> CMat {
    let n = mats.first().map_or(0, |m| m.cols());
    mats.iter()
        .fold(CMat::zeros(n, n), |acc, m| &acc + &m.adjoint_mul(m))
}

/// Σ C_i C_i*.
pub fn row_square(mats: &[CMat]) -> CMat {
    let n = mats.first().map_or(0, |m| m.rows());
    mats.iter()
        .fold(CMat::zeros(n, n), |acc, m| &acc + &m.mul_adjoint(m))
}

/// [C₁; C₂; …] stacked vertically; its Gram matrix is Σ C_i*C_i.
fn vstack(mats: &[CMat]) -> CMat {
    let (r, c) = mats[0].shape();
    CMat::from_fn(r * mats.len(), c, |i, j| mats[i / r][(i % r, j)])
}

/// [C₁, C₂, …] side by side; its co-Gram matrix is Σ C_iC_i*.
fn hstack(mats: &[CMat]) -> CMat {
    let (r, c) = mats[0].shape();
    CMat::from_fn(r, c * mats.len(), |i, j| mats[j / c][(i, j % c)])
}

/// Tr (Σ Y_i*Y_i)^{1/2}, as the trace norm of the vertical stack.
pub fn column_trace(mats: &[CMat]) -> f64 {
    if mats.is_empty() {
        return 0.0;
    }
    matrix::trace_norm(&vstack(mats))
}

/// Tr (Σ Z_iZ_i*)^{1/2}, as the trace norm of the horizontal stack.
pub fn row_trace(mats: &[CMat]) -> f64 {
    if mats.is_empty() {
        return 0.0;
    }
    matrix::trace_norm(&hstack(mats))
}

fn column_op(mats: &[CMat]) -> f64 {
    matrix::op_norm(&vstack(mats))
}

fn row_op(mats: &[CMat]) -> f64 {
    matrix::op_norm(&hstack(mats))
}

fn sinfty(mats: &[CMat]) -> f64 {
    if mats.is_empty() {
        return 0.0;
    }
    column_op(mats).max(row_op(mats))
}

/// max(‖ΣC*C‖^{1/2}, ‖ΣCC*‖^{1/2}); 0 for an empty tuple.
pub fn sinfty_rc_norm(t: &MatrixTuple) -> f64 {
    sinfty(t.mats())
}

/// Value of the decomposition C = Y + Z.
pub fn decomposition_value(y: &[CMat], z: &[CMat]) -> f64 {
    column_trace(y) + row_trace(z)
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpperBound {
    pub value: f64,
    /// Column part Y and row part Z with Y_i + Z_i = C_i.
    pub column_part: Vec<CMat>,
    pub row_part: Vec<CMat>,
}

/// Scalar splits Y = λC tried before refinement.
pub const SPLIT_GRID: [f64; 11] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
/// Alternating refinement sweeps.
pub const REFINE_ITERATIONS: usize = 5000;
const DUAL_CHECK_EVERY: usize = 20;
const REFINE_GAP: f64 = 1e-11;

pub fn s1_rc_upper(t: &MatrixTuple, refine: bool) -> UpperBound {
    let c = t.mats();
    if c.is_empty() {
        return UpperBound {
            value: 0.0,
            column_part: Vec::new(),
            row_part: Vec::new(),
        };
    }
    let split = |lambda: f64| -> UpperBound {
        let y: Vec<CMat> = c.iter().map(|m| m.scale_real(lambda)).collect();
        let z: Vec<CMat> = c.iter().map(|m| m.scale_real(1.0 - lambda)).collect();
        UpperBound {
            value: decomposition_value(&y, &z),
            column_part: y,
            row_part: z,
        }
    };
    let mut best = SPLIT_GRID
        .iter()
        .map(|&l| split(l))
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("grid is nonempty");
    if refine {
        let refined = alternating_refinement(c, REFINE_ITERATIONS);
        if refined.upper.value < best.value {
            best = refined.upper;
        }
    }
    best
}

struct Refinement {
    upper: UpperBound,
    /// Feasible dual candidate read off the stationarity condition.
    dual: Vec<CMat>,
}

/// P = (ΣY*Y)^{1/2}, Q = (ΣZZ*)^{1/2} eigendecompositions with a floor on the spectrum.
fn regularised_roots(y: &[CMat], z: &[CMat], floor: f64) -> (matrix::Eigen, matrix::Eigen) {
    let eig = |h: &CMat| {
        let mut e = matrix::hermitian_eig(h, 1e-8).expect("Gram matrices are Hermitian");
        let vals = e
            .spectrum
            .values()
            .iter()
            .map(|&v| libm::sqrt(v.max(0.0)) + floor)
            .collect();
        e.spectrum = matrix::Spectrum::new(vals);
        e
    };
    (eig(&column_square(y)), eig(&row_square(z)))
}

/// Minimises ½[Tr(ΣY P⁻¹Y*) + Tr P + Tr(ΣZ*Q⁻¹Z) + Tr Q] over (Y, P, Q) by
/// alternating exact minimisations. The Y-step solves QY + YP = CP in the
/// eigenbases of P and Q.
fn alternating_refinement(c: &[CMat], iterations: usize) -> Refinement {
    let n = c[0].rows();
    let scale = c.iter().map(|m| m.frobenius_norm()).fold(0.0, f64::max);
    let floor = 1e-12 * scale.max(f64::MIN_POSITIVE);
    let mut y: Vec<CMat> = c.iter().map(|m| m.scale_real(0.5)).collect();
    let mut z: Vec<CMat> = y.clone();
    let mut best_value = decomposition_value(&y, &z);
    let mut best = (y.clone(), z.clone());
    let mut dual = stationarity_certificate(&y, &z, floor);
    let mut dual_value = pairing(c, &dual).norm();

    for it in 1..=iterations {
        let (pe, qe) = regularised_roots(&y, &z, floor);
        let p = pe.spectrum.values();
        let q = qe.spectrum.values();
        let u = &pe.basis;
        let v = &qe.basis;
        for (i, ci) in c.iter().enumerate() {
            let ct = &(&v.adjoint() * ci) * u;
            let yt = CMat::from_fn(n, n, |a, b| ct[(a, b)] * (p[b] / (p[b] + q[a])));
            y[i] = &(v * &yt) * &u.adjoint();
            z[i] = ci - &y[i];
        }
        let value = decomposition_value(&y, &z);
        if value < best_value {
            best_value = value;
            best = (y.clone(), z.clone());
        }
        // The primal settles long before the dual read-off does.
        if it % DUAL_CHECK_EVERY == 0 || it == iterations {
            let x = stationarity_certificate(&y, &z, floor);
            let xv = pairing(c, &x).norm();
            if xv > dual_value {
                dual_value = xv;
                dual = x;
            }
            if best_value - dual_value <= REFINE_GAP * best_value {
                break;
            }
        }
    }

    let (y, z) = best;
    Refinement {
        upper: UpperBound {
            value: best_value,
            column_part: y,
            row_part: z,
        },
        dual,
    }
}

/// X_i = G_i* with G_i = ½(Y_iP⁻¹ + Q⁻¹Z_i), rescaled into the unit ball.
fn stationarity_certificate(y: &[CMat], z: &[CMat], floor: f64) -> Vec<CMat> {
    let (pe, qe) = regularised_roots(y, z, floor);
    let inv = |e: &matrix::Eigen| {
        let n = e.basis.rows();
        let vals: Vec<f64> = e.spectrum.values().iter().map(|&s| 1.0 / s).collect();
        CMat::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| e.basis[(i, k)] * vals[k] * e.basis[(j, k)].conj())
                .sum()
        })
    };
    let p_inv = inv(&pe);
    let q_inv = inv(&qe);
    let x: Vec<CMat> = y
        .iter()
        .zip(z)
        .map(|(yi, zi)| (&(yi * &p_inv) + &(&q_inv * zi)).scale_real(0.5).adjoint())
        .collect();
    normalise_into_ball(x)
}

/// X ← X / ‖X‖_{S_∞(ℓ₂^rc)} (zero stays zero).
fn normalise_into_ball(x: Vec<CMat>) -> Vec<CMat> {
    let s = sinfty(&x);
    if s > 0.0 {
        x.into_iter().map(|m| m.scale_real(1.0 / s)).collect()
    } else {
        x
    }
}

/// Tr Σ C_i X_i.
pub fn pairing(c: &[CMat], x: &[CMat]) -> C64 {
    c.iter()
        .zip(x)
        .map(|(ci, xi)| {
            let (r, k) = ci.shape();
            let mut s = C64::new(0.0, 0.0);
            for a in 0..r {
                for b in 0..k {
                    s += ci[(a, b)] * xi[(b, a)];
                }
            }
            s
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CertificateSource {
    /// X_i = C_i*/‖C‖_{S_∞(ℓ₂^rc)}.
    Balanced,
    /// Read off the alternating refinement.
    Stationarity,
    /// Supergradient ascent, with the restart index.
    Ascent { restart: usize },
    /// Empty or zero tuple.
    Trivial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBound {
    pub value: f64,
    pub certificate: Vec<CMat>,
    pub source: CertificateSource,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentOptions {
    pub iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Initial step as a multiple of 1/‖C‖_{S_∞(ℓ₂^rc)}.
    pub step: f64,
    pub decay: f64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self {
            iterations: 500,
            restarts: 8,
            seed: 42,
            step: 0.1,
            decay: 0.97,
        }
    }
}

fn candidate(c: &[CMat], x: Vec<CMat>, source: CertificateSource) -> LowerBound {
    LowerBound {
        value: pairing(c, &x).norm(),
        certificate: x,
        source,
    }
}

fn better(a: LowerBound, b: LowerBound) -> LowerBound {
    if b.value > a.value {
        b
    } else {
        a
    }
}

fn balanced_certificate(c: &[CMat]) -> Option<LowerBound> {
    let norm = sinfty(c);
    if norm == 0.0 {
        return None;
    }
    let x = c
        .iter()
        .map(|m| m.adjoint().scale_real(1.0 / norm))
        .collect();
    Some(candidate(
        c,
        normalise_into_ball(x),
        CertificateSource::Balanced,
    ))
}

fn trivial(c: &[CMat]) -> LowerBound {
    LowerBound {
        value: 0.0,
        certificate: c.iter().map(|m| CMat::zeros(m.cols(), m.rows())).collect(),
        source: CertificateSource::Trivial,
    }
}

/// Seeded supergradient ascent with rescaling onto the unit sphere after every step.
fn ascent(c: &[CMat], opts: &AscentOptions) -> Option<LowerBound> {
    let norm = sinfty(c);
    if norm == 0.0 || opts.iterations == 0 || opts.restarts == 0 {
        return None;
    }
    let start: Vec<CMat> = c
        .iter()
        .map(|m| m.adjoint().scale_real(1.0 / norm))
        .collect();
    let mut best: Option<LowerBound> = None;
    for restart in 0..opts.restarts {
        let mut r = rng::seeded(rng::derive_seed(opts.seed, restart as u64));
        let mut x = start.clone();
        if restart > 0 {
            let amplitude = 0.5 / libm::sqrt((c.len() * c[0].rows()) as f64);
            for xi in x.iter_mut() {
                let (rows, cols) = xi.shape();
                let noise =
                    CMat::from_fn(rows, cols, |_, _| rng::complex_normal(&mut r) * amplitude);
                *xi = &*xi + &noise;
            }
        }
        x = normalise_into_ball(x);
        let mut step = opts.step / norm;
        let mut local = candidate(c, x.clone(), CertificateSource::Ascent { restart });
        for _ in 0..opts.iterations {
            let s = pairing(c, &x);
            let phase = if s.norm() > 0.0 {
                s / s.norm()
            } else {
                C64::new(1.0, 0.0)
            };
            // d/dX_i Re(conj(phase) Tr C_i X_i) = phase · C_i*.
            for (xi, ci) in x.iter_mut().zip(c) {
                xi.add_assign_scaled(&ci.adjoint(), phase * step);
            }
            x = normalise_into_ball(x);
            let cand = candidate(c, x.clone(), CertificateSource::Ascent { restart });
            if cand.value > local.value {
                local = cand;
            }
            step *= opts.decay;
        }
        // Keep the RNG draw count independent of iteration count.
        let _: u32 = r.random();
        best = Some(match best {
            None => local,
            Some(b) => better(b, local),
        });
    }
    best
}

/// Best of the balanced certificate, the refinement's stationarity
/// certificate and seeded ascent restarts. The value is a true lower bound.
pub fn s1_rc_lower(t: &MatrixTuple, opts: &AscentOptions) -> LowerBound {
    let c = t.mats();
    let Some(mut best) = balanced_certificate(c) else {
        return trivial(c);
    };
    let refined = alternating_refinement(c, REFINE_ITERATIONS);
    best = better(
        best,
        candidate(c, refined.dual, CertificateSource::Stationarity),
    );
    if let Some(a) = ascent(c, opts) {
        best = better(best, a);
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
    pub dual_certificate: Vec<CMat>,
    pub certificate_source: CertificateSource,
    pub column_part: Vec<CMat>,
    pub row_part: Vec<CMat>,
    pub converged: bool,
}

impl NormBracket {
    pub fn relative_gap(&self) -> f64 {
        if self.upper == 0.0 {
            0.0
        } else {
            (self.upper - self.lower) / self.upper
        }
    }

    /// Re-derives both certified values from the stored certificates.
    pub fn audit(&self, c: &[CMat]) -> Result<()> {
        let ball = sinfty(&self.dual_certificate);
        if ball > 1.0 + CERTIFICATE_SLACK {
            return Err(Error::InvalidParameter(format!(
                "dual certificate has norm {ball}"
            )));
        }
        if pairing(c, &self.dual_certificate).norm() < self.lower - CERTIFICATE_SLACK {
            return Err(Error::InvalidParameter("dual value below lower".into()));
        }
        for ((ci, y), z) in c.iter().zip(&self.column_part).zip(&self.row_part) {
            if (&(y + z) - ci).frobenius_norm() > CERTIFICATE_SLACK * (1.0 + ci.frobenius_norm()) {
                return Err(Error::InvalidParameter("Y + Z != C".into()));
            }
        }
        if decomposition_value(&self.column_part, &self.row_part) > self.upper + CERTIFICATE_SLACK {
            return Err(Error::InvalidParameter("primal value above upper".into()));
        }
        if !(0.0 <= self.lower && self.lower <= self.upper) {
            return Err(Error::BracketOpen {
                lower: self.lower,
                upper: self.upper,
            });
        }
        Ok(())
    }
}

/// Certified bracket for ‖C‖_{S₁(ℓ₂^rc)}; `converged` when (upper − lower) ≤ tol·upper.
///
/// The ascent only runs when the closed-form and stationarity certificates
/// leave the bracket open.
pub fn s1_rc_norm(t: &MatrixTuple, tol: f64, opts: &AscentOptions) -> Result<NormBracket> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    let c = t.mats();
    let upper = s1_rc_upper(t, false);
    let mut upper = upper;
    let mut lower = match balanced_certificate(c) {
        Some(b) => b,
        None => trivial(c),
    };
    let closed = |l: &LowerBound, u: &UpperBound| u.value - l.value <= tol * u.value;
    if !closed(&lower, &upper) {
        let refined = alternating_refinement(c, REFINE_ITERATIONS);
        if refined.upper.value < upper.value {
            upper = refined.upper;
        }
        lower = better(
            lower,
            candidate(c, refined.dual, CertificateSource::Stationarity),
        );
    }
    if !closed(&lower, &upper) {
        if let Some(a) = ascent(c, opts) {
            lower = better(lower, a);
        }
    }
    // Rounding can push a closed bracket a few ulps past itself.
    let lower_value = lower.value.min(upper.value);
    Ok(NormBracket {
        lower: lower_value,
        upper: upper.value,
        converged: upper.value - lower_value <= tol * upper.value,
        dual_certificate: lower.certificate,
        certificate_source: lower.source,
        column_part: upper.column_part,
        row_part: upper.row_part,
    })
}
