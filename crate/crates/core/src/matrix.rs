//! Dense complex matrices and the spectral routines used throughout the crate.
//!
//! Eigenvalues of Hermitian matrices come from cyclic complex Jacobi
//! rotations. Singular values come from one-sided (Hestenes) Jacobi applied
//! directly to the matrix, which keeps tiny singular values accurate to
//! roughly `ε‖M‖` instead of `√ε‖M‖`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Jacobi sweeps stop once the off-diagonal mass falls below this fraction of ‖H‖_F.
pub const JACOBI_REL_TOL: f64 = 1e-13;
/// Hard cap on Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Default Hermitian-ness tolerance (relative to ‖H‖_F).
pub const DEFAULT_HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::BadLength {
                rows,
                cols,
                len: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// 1×1 matrix holding a scalar.
    pub fn scalar(z: C64) -> Self {
        Self {
            rows: 1,
            cols: 1,
            data: vec![z],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum::<f64>())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `self* · other` without materialising the adjoint.
    pub fn adjoint_mul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "adjoint_mul shape mismatch");
        let mut out = Self::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            for i in 0..self.cols {
                let a = self[(k, i)].conj();
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// `self · other*`.
    pub fn mul_adjoint(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "mul_adjoint shape mismatch");
        Self::from_fn(self.rows, other.rows, |i, j| {
            (0..self.cols)
                .map(|k| self[(i, k)] * other[(j, k)].conj())
                .sum()
        })
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// (A + A*)/2.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    fn require_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                found: other.shape(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other)?;
        Ok(self + other)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other)?;
        Ok(self - other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                expected: (self.cols, other.cols),
                found: other.shape(),
            });
        }
        Ok(self * other)
    }

    pub fn add_assign_scaled(&mut self, other: &Self, s: C64) {
        assert_eq!(self.shape(), other.shape());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        assert_eq!(self.shape(), rhs.shape(), "sub shape mismatch");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols, rhs.rows, "mul shape mismatch");
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

/// Real values sorted in descending order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn max(&self) -> Option<f64> {
        self.0.first().copied()
    }

    pub fn min(&self) -> Option<f64> {
        self.0.last().copied()
    }
}

#[derive(Debug, Clone)]
pub struct Eigen {
    pub spectrum: Spectrum,
    /// Unitary whose columns are eigenvectors, ordered like `spectrum`.
    pub basis: CMat,
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// `tol` bounds the accepted Hermitian deviation relative to ‖H‖_F.
pub fn hermitian_eig(h: &CMat, tol: f64) -> Result<Eigen> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let n = h.rows();
    let norm = h.frobenius_norm();
    let dev = h.hermitian_deviation();
    if dev > tol * norm.max(f64::MIN_POSITIVE) && dev > 0.0 {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let mut a = h.hermitian_part();
    let mut v = CMat::identity(n);
    let target = JACOBI_REL_TOL * norm;

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate_pair(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let basis = CMat::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Eigen {
        spectrum: Spectrum(values),
        basis,
    })
}

fn off_diagonal_norm(a: &CMat) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    libm::sqrt(s)
}

/// Zeroes `a[p,q]` with a unitary rotation `U` acting on coordinates p, q:
/// `A ← U* A U`, `V ← V U`.
fn rotate_pair(a: &mut CMat, v: &mut CMat, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Phase makes the pivot real, then a real symmetric rotation finishes it.
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta >= 0.0 {
        1.0 / (theta + libm::sqrt(theta * theta + 1.0))
    } else {
        -1.0 / (-theta + libm::sqrt(theta * theta + 1.0))
    };
    let c = 1.0 / libm::sqrt(t * t + 1.0);
    let s = t * c;
    // U = D R with D = diag(1, conj(phase)) on (p, q) and R = [[c, s], [-s, c]].
    let upp = C64::new(c, 0.0);
    let upq = C64::new(s, 0.0);
    let uqp = phase.conj() * (-s);
    let uqq = phase.conj() * c;
    let n = a.rows();

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * upp + akq * uqp;
        a[(k, q)] = akp * upq + akq * uqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
        a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * upp + vkq * uqp;
        v[(k, q)] = vkp * upq + vkq * uqq;
    }
}

/// Singular values, descending, by one-sided Jacobi on the narrower side.
pub fn singular_values(m: &CMat) -> Spectrum {
    let work = if m.cols() > m.rows() {
        m.adjoint()
    } else {
        m.clone()
    };
    let (rows, cols) = work.shape();
    if rows == 0 || cols == 0 {
        return Spectrum(Vec::new());
    }
    // Column-major copy: each column is contiguous.
    let mut colv: Vec<Vec<C64>> = (0..cols)
        .map(|j| (0..rows).map(|i| work[(i, j)]).collect())
        .collect();
    let eps = 1e-15;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let (alpha, beta, gamma) = {
                    let ci = &colv[i];
                    let cj = &colv[j];
                    let mut alpha = 0.0;
                    let mut beta = 0.0;
                    let mut gamma = C64::new(0.0, 0.0);
                    for k in 0..rows {
                        alpha += ci[k].norm_sqr();
                        beta += cj[k].norm_sqr();
                        gamma += ci[k].conj() * cj[k];
                    }
                    (alpha, beta, gamma)
                };
                let g = gamma.norm();
                if g == 0.0 || g <= eps * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + libm::sqrt(1.0 + zeta * zeta))
                } else {
                    -1.0 / (-zeta + libm::sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                let (left, right) = colv.split_at_mut(j);
                let ci = &mut left[i];
                let cj = &mut right[0];
                for k in 0..rows {
                    let x = ci[k];
                    let y = cj[k] * phase.conj();
                    ci[k] = x * c - y * s;
                    cj[k] = x * s + y * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    Spectrum::new(
        colv.iter()
            .map(|col| libm::sqrt(col.iter().map(|z| z.norm_sqr()).sum::<f64>()))
            .collect(),
    )
}

/// Schatten-1 norm: sum of singular values.
pub fn trace_norm(m: &CMat) -> f64 {
    singular_values(m).values().iter().sum()
}

/// Largest singular value.
pub fn op_norm(m: &CMat) -> f64 {
    singular_values(m).max().unwrap_or(0.0)
}

/// Largest eigenvalue magnitude of a Hermitian matrix; cheaper than [`op_norm`] for PSD sums.
pub fn hermitian_op_norm(h: &CMat) -> Result<f64> {
    let e = hermitian_eig(h, DEFAULT_HERMITIAN_TOL)?;
    Ok(e.spectrum
        .values()
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs())))
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_apply(h: &CMat, f: impl Fn(f64) -> f64) -> Result<CMat> {
    let e = hermitian_eig(h, DEFAULT_HERMITIAN_TOL)?;
    let n = h.rows();
    let fv: Vec<f64> = e.spectrum.values().iter().map(|&x| f(x)).collect();
    let u = &e.basis;
    Ok(CMat::from_fn(n, n, |i, j| {
        (0..n).map(|k| u[(i, k)] * fv[k] * u[(j, k)].conj()).sum()
    }))
}

/// Square root of a PSD matrix; eigenvalues below zero are clamped.
pub fn psd_sqrt(h: &CMat) -> Result<CMat> {
    hermitian_apply(h, |x| libm::sqrt(x.max(0.0)))
}

/// |M| = (M*M)^{1/2}.
pub fn matrix_abs(m: &CMat) -> CMat {
    psd_sqrt(&m.adjoint_mul(m)).expect("M*M is Hermitian by construction")
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &CMat) -> Result<f64> {
    Ok(hermitian_eig(h, DEFAULT_HERMITIAN_TOL)?
        .spectrum
        .min()
        .unwrap_or(0.0))
}

/// `A ⪯ B` in the PSD order, up to `tol`.
pub fn psd_leq(a: &CMat, b: &CMat, tol: f64) -> Result<bool> {
    let diff = b.try_sub(a)?;
    Ok(min_eigenvalue(&diff)? >= -tol)
}
