//! Counterexample polynomials for sets with large Z₂ constant, and the
//! abelian ratio sequences.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fock::build_family;
use crate::fourier::{self, KhintchineReport, TrigMatrixPoly};
use crate::intsets::{self, IntegerSet, PatternKind, PatternWitness};
use crate::matrix::{self, CMat, C64};
use crate::quad::QuadratureResult;
use crate::rcnorms::{self, AscentOptions, MatrixTuple, NormBracket};

/// Sets with Z₂ above this value always contain one of the three patterns.
pub const CONVERSE_THRESHOLD: usize = 6;

/// Coefficient family attached to a pattern, with the pattern elements as frequencies.
///
/// * five pairs: (B₁, B₁, …, B₅, B₅) from the n = 2 family;
/// * three progressions: (B_i, 2B_i, B_i) per progression from the n = 1 family;
/// * 5-term progression: scalars (1, 2, 3, 2, 1).
pub fn build_witness(p: &PatternWitness) -> Result<TrigMatrixPoly> {
    p.validate()?;
    let mats: Vec<CMat> = match p.kind {
        PatternKind::FivePairs => build_family(2)?
            .ops
            .into_iter()
            .flat_map(|b| [b.clone(), b])
            .collect(),
        PatternKind::ThreeAPs => build_family(1)?
            .ops
            .into_iter()
            .flat_map(|b| [b.clone(), b.scale_real(2.0), b])
            .collect(),
        PatternKind::AP5 => [1.0, 2.0, 3.0, 2.0, 1.0]
            .iter()
            .map(|&x| CMat::scalar(C64::new(x, 0.0)))
            .collect(),
    };
    TrigMatrixPoly::new(mats, p.elements.clone())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViolationReport {
    pub pattern: PatternWitness,
    pub polynomial: TrigMatrixPoly,
    pub l1: QuadratureResult,
    pub s1rc: NormBracket,
    pub ratio_interval: (f64, f64),
    pub violates: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum AuditOutcome {
    Consistent,
    Violation(ViolationReport),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub z2: usize,
    pub outcome: AuditOutcome,
}

/// Evaluates the counterexample for a given pattern.
pub fn violation_report(pattern: PatternWitness, tol: f64) -> Result<ViolationReport> {
    let polynomial = build_witness(&pattern)?;
    let KhintchineReport {
        l1,
        s1rc,
        ratio_interval,
        violates,
    } = fourier::khintchine_ratio(&polynomial, tol)?;
    Ok(ViolationReport {
        pattern,
        polynomial,
        l1,
        s1rc,
        ratio_interval,
        violates,
    })
}

/// Z₂ ≤ 6 is reported as consistent. Otherwise the first pattern found in
/// the order five pairs, three progressions, 5-term progression is turned
/// into a counterexample. Z₂ ≥ 7 without any pattern is
/// [`Error::PatternNotFound`].
pub fn converse_audit(v: &IntegerSet, tol: f64) -> Result<AuditReport> {
    let z2 = intsets::z2_constant(v);
    if z2 <= CONVERSE_THRESHOLD {
        return Ok(AuditReport {
            z2,
            outcome: AuditOutcome::Consistent,
        });
    }
    let pattern = PatternKind::ALL
        .iter()
        .find_map(|&k| intsets::find_pattern(v, k))
        .ok_or(Error::PatternNotFound { z2 })?;
    Ok(AuditReport {
        z2,
        outcome: AuditOutcome::Violation(violation_report(pattern, tol)?),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AbelianCase {
    TorusProducts,
    Z2Products,
}

impl AbelianCase {
    pub fn limit(self) -> f64 {
        match self {
            Self::TorusProducts => 2.0 / PI,
            Self::Z2Products => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AbelianRatio {
    pub m: u64,
    pub case: AbelianCase,
    /// binomial(2m+1, m+1), when it fits in u64.
    pub d: Option<u64>,
    pub a_m: Option<f64>,
    pub b_m: Option<f64>,
    /// B_m / A_m, from the d-free closed form.
    pub ratio: f64,
}

fn checked_binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

pub fn abelian_ratio(m: u64, case: AbelianCase) -> Result<AbelianRatio> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be >= 1".into()));
    }
    let mf = m as f64;
    let d = checked_binomial(2 * m + 1, m + 1);
    let root = libm::sqrt(2.0 * mf + 1.0);
    let (ratio, b_over_d) = match case {
        AbelianCase::TorusProducts => (
            libm::sqrt(8.0 * (mf + 1.0)) / (PI * root),
            4.0 * (mf + 1.0) / (PI * root),
        ),
        AbelianCase::Z2Products => (
            libm::sqrt(mf + 1.0) / libm::sqrt(2.0 * (2.0 * mf + 1.0)),
            (mf + 1.0) / root,
        ),
    };
    Ok(AbelianRatio {
        m,
        case,
        d,
        a_m: d.map(|d| d as f64 * libm::sqrt(2.0 * (mf + 1.0))),
        b_m: d.map(|d| d as f64 * b_over_d),
        ratio,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AbelianCheck {
    pub closed: AbelianRatio,
    pub a_lower: f64,
    pub a_upper: f64,
    pub b_numeric: f64,
    pub b_error_estimate: f64,
    pub ratio_numeric: f64,
    pub agrees: bool,
}

/// Largest m accepted by [`abelian_ratio_numeric_check`].
pub const NUMERIC_CHECK_MAX_M: u64 = 3;

/// Rebuilds (C_i) = (B₁, B₁, …, B_l, B_l) from the order-m family and evaluates
/// A_m and B_m numerically.
///
/// The torus case uses frequencies x_i = 10i, y_i = 10i + 1. The Z₂ case
/// averages exactly over (ℤ/2)^{l+1} with characters x_i = e_i and y_i = e_i + e_{l+1}.
pub fn abelian_ratio_numeric_check(m: u64, case: AbelianCase, tol: f64) -> Result<AbelianCheck> {
    if m == 0 || m > NUMERIC_CHECK_MAX_M {
        return Err(Error::InvalidParameter(
            "numeric check needs 1 <= m <= 3".into(),
        ));
    }
    let closed = abelian_ratio(m, case)?;
    let family = build_family(m as usize)?;
    let paired: Vec<CMat> = family
        .ops
        .iter()
        .flat_map(|b| [b.clone(), b.clone()])
        .collect();
    let bracket = rcnorms::s1_rc_norm(
        &MatrixTuple::new(paired.clone())?,
        tol,
        &AscentOptions::default(),
    )?;
    if !bracket.converged {
        return Err(Error::BracketOpen {
            lower: bracket.lower,
            upper: bracket.upper,
        });
    }
    let (b_numeric, b_err) = match case {
        AbelianCase::TorusProducts => {
            let freqs: Vec<i64> = (1..=family.ops.len() as i64)
                .flat_map(|i| [10 * i, 10 * i + 1])
                .collect();
            let r = fourier::l1_s1_norm(&TrigMatrixPoly::new(paired, freqs)?, tol)?;
            (r.value, r.abs_error_estimate)
        }
        AbelianCase::Z2Products => (z2_group_average(&family.ops), 0.0),
    };
    let a_closed = closed.a_m.expect("small m");
    let b_closed = closed.b_m.expect("small m");
    let scale = a_closed.max(b_closed);
    let agrees = (bracket.upper - a_closed).abs() <= tol * scale
        && (bracket.lower - a_closed).abs() <= tol * scale
        && (b_numeric - b_closed).abs() <= tol * scale + b_err;
    Ok(AbelianCheck {
        closed,
        a_lower: bracket.lower,
        a_upper: bracket.upper,
        b_numeric,
        b_error_estimate: b_err,
        ratio_numeric: b_numeric / bracket.upper,
        agrees,
    })
}

/// Mean over g ∈ {0,1}^{l+1} of ‖Σ_i B_i (−1)^{g_i} (1 + (−1)^{g_{l+1}})‖_{S₁}.
fn z2_group_average(ops: &[CMat]) -> f64 {
    let l = ops.len();
    let (r, c) = ops[0].shape();
    let mut total = 0.0;
    for g in 0u64..(1 << (l + 1)) {
        let w = if g >> l & 1 == 1 { -1.0 } else { 1.0 };
        if 1.0 + w == 0.0 {
            continue;
        }
        let mut f = CMat::zeros(r, c);
        for (i, b) in ops.iter().enumerate() {
            let s = if g >> i & 1 == 1 { -1.0 } else { 1.0 };
            f.add_assign_scaled(b, C64::new(s * (1.0 + w), 0.0));
        }
        total += matrix::trace_norm(&f);
    }
    total / (1u64 << (l + 1)) as f64
}
