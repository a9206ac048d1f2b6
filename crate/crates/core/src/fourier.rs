//! Matrix-valued trigonometric polynomials f(t) = Σ C_i e^{2πi k_i t} on [0, 1).

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matrix::{self, CMat, C64};
use crate::quad::{self, QuadOptions, QuadratureResult};
use crate::rcnorms::{self, AscentOptions, MatrixTuple, NormBracket};

#[derive(Debug, Clone, PartialEq)]
pub struct TrigMatrixPoly {
    tuple: MatrixTuple,
}

impl TrigMatrixPoly {
    pub fn new(mats: Vec<CMat>, frequencies: Vec<i64>) -> Result<Self> {
        Ok(Self {
            tuple: MatrixTuple::with_frequencies(mats, frequencies)?,
        })
    }

    pub fn from_tuple(tuple: MatrixTuple) -> Result<Self> {
        if tuple.frequencies().is_none() {
            return Err(Error::InvalidParameter(
                "trigonometric polynomial needs frequencies".into(),
            ));
        }
        Ok(Self { tuple })
    }

    pub fn tuple(&self) -> &MatrixTuple {
        &self.tuple
    }

    pub fn mats(&self) -> &[CMat] {
        self.tuple.mats()
    }

    pub fn frequencies(&self) -> &[i64] {
        self.tuple.frequencies().expect("checked at construction")
    }

    pub fn len(&self) -> usize {
        self.tuple.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuple.is_empty()
    }

    pub fn n(&self) -> usize {
        self.tuple.n()
    }

    /// Shifts every frequency by `shift`.
    pub fn translate(&self, shift: i64) -> Result<Self> {
        let freqs = self
            .frequencies()
            .iter()
            .map(|&k| {
                k.checked_add(shift)
                    .ok_or_else(|| Error::InvalidParameter("frequency overflow".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.mats().to_vec(), freqs)
    }

    /// f(t).
    pub fn eval(&self, t: f64) -> CMat {
        let freqs: Vec<f64> = self.frequencies().iter().map(|&k| k as f64).collect();
        eval_with(self.mats(), &freqs, t)
    }
}

fn eval_with(mats: &[CMat], freqs: &[f64], t: f64) -> CMat {
    let (r, c) = mats.first().map_or((0, 0), |m| m.shape());
    let mut out = CMat::zeros(r, c);
    for (m, &k) in mats.iter().zip(freqs) {
        let x = k * t;
        let phase = 2.0 * PI * (x - libm::floor(x));
        out.add_assign_scaled(m, C64::from_polar(1.0, phase));
    }
    out
}

fn eval_derivative(mats: &[CMat], freqs: &[f64], t: f64) -> CMat {
    let (r, c) = mats.first().map_or((0, 0), |m| m.shape());
    let mut out = CMat::zeros(r, c);
    for (m, &k) in mats.iter().zip(freqs) {
        let x = k * t;
        let phase = 2.0 * PI * (x - libm::floor(x));
        out.add_assign_scaled(m, C64::from_polar(2.0 * PI * k, phase) * C64::i());
    }
    out
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Frequencies mapped to (k − min)/g with g their gcd. Norms of f over a full
/// period are unchanged by this map.
fn reduced_frequencies(freqs: &[i64]) -> Vec<f64> {
    let Some(&min) = freqs.iter().min() else {
        return Vec::new();
    };
    let shifted: Vec<i128> = freqs.iter().map(|&k| k as i128 - min as i128).collect();
    let g = shifted.iter().fold(0, |g, &k| gcd(g, k)).max(1);
    shifted.iter().map(|&k| (k / g) as f64).collect()
}

/// ∫₀¹ ‖f(t)‖_{S₁} dt by adaptive quadrature with absolute error estimate ≤ `tol`.
pub fn l1_s1_norm(p: &TrigMatrixPoly, tol: f64) -> Result<QuadratureResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    if p.is_empty() {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            panels: 0,
        });
    }
    let freqs = reduced_frequencies(p.frequencies());
    let top = freqs.iter().copied().fold(0.0, f64::max);
    let opts = QuadOptions {
        tol,
        initial_panels: (2.0 * top).max(8.0) as usize,
        ..QuadOptions::default()
    };
    let mats = p.mats();
    quad::integrate(
        |t| matrix::trace_norm(&eval_with(mats, &freqs, t)),
        0.0,
        1.0,
        opts,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SupBracket {
    /// Attained value max ‖f(t)‖ over the sample points.
    pub lower: f64,
    /// Certified bound on sup_t ‖f(t)‖.
    pub upper: f64,
    pub evaluations: usize,
}

/// Interval evaluations allowed before `linf_bracket` returns what it has.
pub const LINF_MAX_EVALUATIONS: usize = 1_000_000;

#[derive(Debug, Clone, Copy)]
struct Cell {
    center: f64,
    width: f64,
    bound: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then(other.center.total_cmp(&self.center))
    }
}

/// Branch-and-bound bracket for sup_t ‖f(t)‖_op.
///
/// On a cell of width h around c, ‖f(c+s)‖ ≤ ‖f(c) + s f′(c)‖ + M₂s²/2 with
/// M₂ = Σ‖C_i‖(2πk_i)²; the first term is convex in s, so its maximum sits at
/// s = ±h/2. Frequencies are centred first to keep M₂ small.
pub fn linf_bracket(p: &TrigMatrixPoly, tol: f64) -> Result<SupBracket> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    if p.is_empty() {
        return Ok(SupBracket {
            lower: 0.0,
            upper: 0.0,
            evaluations: 0,
        });
    }
    let reduced = reduced_frequencies(p.frequencies());
    let top = reduced.iter().copied().fold(0.0, f64::max);
    let freqs: Vec<f64> = reduced.iter().map(|k| k - 0.5 * top).collect();
    let mats = p.mats();
    let m2: f64 = mats
        .iter()
        .zip(&freqs)
        .map(|(m, k)| matrix::op_norm(m) * (2.0 * PI * k) * (2.0 * PI * k))
        .sum();

    let mut lower = 0.0f64;
    let mut evaluations = 0usize;
    let cell = |center: f64, width: f64, lower: &mut f64| -> Cell {
        let v = eval_with(mats, &freqs, center);
        let dv = eval_derivative(mats, &freqs, center).scale_real(0.5 * width);
        *lower = lower.max(matrix::op_norm(&v));
        let edge = matrix::op_norm(&(&v + &dv)).max(matrix::op_norm(&(&v - &dv)));
        Cell {
            center,
            width,
            bound: edge + m2 * width * width / 8.0,
        }
    };

    let start = (4.0 * top).max(16.0) as usize;
    let w = 1.0 / start as f64;
    let mut heap: BinaryHeap<Cell> = (0..start)
        .map(|i| cell((i as f64 + 0.5) * w, w, &mut lower))
        .collect();
    evaluations += start;

    loop {
        let worst = *heap.peek().expect("heap never empties");
        if worst.bound - lower <= tol || evaluations >= LINF_MAX_EVALUATIONS {
            return Ok(SupBracket {
                lower,
                upper: worst.bound.max(lower),
                evaluations,
            });
        }
        heap.pop();
        let h = 0.5 * worst.width;
        heap.push(cell(worst.center - 0.5 * h, h, &mut lower));
        heap.push(cell(worst.center + 0.5 * h, h, &mut lower));
        evaluations += 2;
    }
}

/// Certified upper estimate of sup_t ‖f(t)‖_op, within `tol` of the attained maximum.
pub fn linf_norm(p: &TrigMatrixPoly, tol: f64) -> Result<f64> {
    Ok(linf_bracket(p, tol)?.upper)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauMoments {
    /// Σ C_i*C_i.
    pub m1: CMat,
    /// Σ over −k_i + k_j − k_k + k_l = 0 of C_i*C_jC_k*C_l.
    pub m2: CMat,
}

/// Above this many terms the fourth moment is summed through difference buckets.
pub const DIRECT_MOMENT_LIMIT: usize = 40;

pub fn tau_moments(p: &TrigMatrixPoly) -> TauMoments {
    let c = p.mats();
    let n = p.n();
    let m1 = rcnorms::column_square(c);
    let m2 = if p.len() <= DIRECT_MOMENT_LIMIT {
        fourth_moment_direct(c, p.frequencies(), n)
    } else {
        fourth_moment_bucketed(c, p.frequencies(), n)
    };
    TauMoments { m1, m2 }
}

fn fourth_moment_direct(c: &[CMat], k: &[i64], n: usize) -> CMat {
    let index: BTreeMap<i128, usize> = k.iter().enumerate().map(|(i, &f)| (f as i128, i)).collect();
    let mut out = CMat::zeros(n, n);
    for i in 0..c.len() {
        for j in 0..c.len() {
            let ij = c[i].adjoint_mul(&c[j]);
            for kk in 0..c.len() {
                let target = k[i] as i128 - k[j] as i128 + k[kk] as i128;
                if let Some(&l) = index.get(&target) {
                    let kl = c[kk].adjoint_mul(&c[l]);
                    out = &out + &(&ij * &kl);
                }
            }
        }
    }
    out
}

fn fourth_moment_bucketed(c: &[CMat], k: &[i64], n: usize) -> CMat {
    let mut buckets: BTreeMap<i128, CMat> = BTreeMap::new();
    for i in 0..c.len() {
        for j in 0..c.len() {
            let delta = k[j] as i128 - k[i] as i128;
            let prod = c[i].adjoint_mul(&c[j]);
            buckets
                .entry(delta)
                .and_modify(|b| *b = &*b + &prod)
                .or_insert(prod);
        }
    }
    let mut out = CMat::zeros(n, n);
    for (delta, d) in &buckets {
        if let Some(e) = buckets.get(&-delta) {
            out = &out + &(d * e);
        }
    }
    out
}

/// m2 ⪯ α·m1 after rescaling the coefficients to unit S_∞(ℓ₂^rc) norm.
pub fn moment_inequality_check(p: &TrigMatrixPoly, alpha: f64, tol: f64) -> Result<bool> {
    let s = rcnorms::sinfty_rc_norm(p.tuple());
    if s == 0.0 {
        return Ok(true);
    }
    let scaled = TrigMatrixPoly::from_tuple(p.tuple().map(|m| m.scale_real(1.0 / s)))?;
    let TauMoments { m1, m2 } = tau_moments(&scaled);
    matrix::psd_leq(&m2, &m1.scale_real(alpha), tol)
}

/// ‖Σ C_i*C_i‖ ≤ ‖f‖²_∞ + tol, using the certified sup bound.
pub fn lem_bdd_check(p: &TrigMatrixPoly, tol: f64) -> Result<bool> {
    if p.is_empty() {
        return Ok(true);
    }
    let lhs = matrix::hermitian_op_norm(&rcnorms::column_square(p.mats()))?;
    let sup = linf_norm(p, tol)?;
    Ok(lhs <= sup * sup + tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KhintchineReport {
    pub l1: QuadratureResult,
    pub s1rc: NormBracket,
    /// [(l1 − err)/upper, (l1 + err)/lower].
    pub ratio_interval: (f64, f64),
    /// The whole interval lies below 1/√2.
    pub violates: bool,
}

/// Compares ‖f‖_{L₁(S₁)} with ‖(C_i)‖_{S₁(ℓ₂^rc)}.
///
/// `tol` is the absolute quadrature tolerance and the relative bracket tolerance.
pub fn khintchine_ratio(p: &TrigMatrixPoly, tol: f64) -> Result<KhintchineReport> {
    let l1 = l1_s1_norm(p, tol)?;
    let s1rc = rcnorms::s1_rc_norm(p.tuple(), tol, &AscentOptions::default())?;
    let lo = if s1rc.upper > 0.0 {
        (l1.value - l1.abs_error_estimate).max(0.0) / s1rc.upper
    } else {
        0.0
    };
    let hi = if s1rc.lower > 0.0 {
        (l1.value + l1.abs_error_estimate) / s1rc.lower
    } else {
        f64::INFINITY
    };
    // Outward rounding of the two divisions.
    let (lo, hi) = (
        lo * (1.0 - 4.0 * f64::EPSILON),
        hi * (1.0 + 4.0 * f64::EPSILON),
    );
    Ok(KhintchineReport {
        l1,
        s1rc,
        ratio_interval: (lo, hi),
        violates: hi < crate::INV_SQRT2,
    })
}
