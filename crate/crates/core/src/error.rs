use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix deviates from Hermitian by {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("entry count {len} does not match {rows}x{cols}")]
    BadLength {
        rows: usize,
        cols: usize,
        len: usize,
    },
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{base}^{exponent} is not representable as i64")]
    Overflow { base: i64, exponent: u32 },
    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("duplicate frequency {0}")]
    DuplicateFrequency(i64),
    #[error("duplicate element {0} in set")]
    DuplicateElement(String),
    #[error(
        "quadrature did not reach tolerance: best {value} +/- {error:e} after {panels} panels"
    )]
    QuadratureBudget {
        value: f64,
        error: f64,
        panels: usize,
    },
    #[error("malformed pattern: {0}")]
    MalformedPattern(String),
    #[error("z2 = {z2} >= 7 but no forbidden pattern was found")]
    PatternNotFound { z2: usize },
    #[error("norm bracket [{lower}, {upper}] did not close")]
    BracketOpen { lower: f64, upper: f64 },
}
