//! Numerical laboratory for operator-valued Khintchine inequalities over
//! Z₂-type frequency sets.
//!
//! The crate is `no_std` with `alloc`. Everything here is a pure function of
//! its inputs; file formats, the command line and threading live in the
//! `z2lab` companion crate.
//!
//! Module map:
//!
//! * [`intsets`]: Z₂ / Z_p constants, arithmetic pattern search, set generators.
//! * [`matrix`]: dense complex matrices, Jacobi eigen/singular values, Schatten norms.
//! * [`fock`]: partial-isometry families from the antisymmetric Fock space.
//! * [`rcnorms`]: the S_∞(ℓ₂^rc) norm and certified S₁(ℓ₂^rc) brackets.
//! * [`quad`]: adaptive Gauss–Kronrod quadrature.
//! * [`fourier`]: matrix-valued trigonometric polynomials on the circle.
//! * [`moments`]: Wick moments and moment profiles of orthonormal systems.
//! * [`witness`]: the converse engine and the abelian ratio sequences.
#![no_std]

extern crate alloc;

pub mod error;
pub mod fock;
pub mod fourier;
pub mod intsets;
pub mod matrix;
pub mod moments;
pub mod quad;
pub mod rcnorms;
pub mod witness;

mod rng;

pub use error::{Error, Result};
pub use matrix::{CMat, C64};

/// 1/√2, the optimal lower Khintchine constant for Sidon-type systems.
pub const INV_SQRT2: f64 = core::f64::consts::FRAC_1_SQRT_2;
