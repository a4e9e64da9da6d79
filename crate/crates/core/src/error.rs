use thiserror::Error;

use crate::scalar::Mode;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode mismatch: {left} vs {right}")]
    ModeMismatch { left: Mode, right: Mode },

    #[error("exponent {0} is not an integer; exact mode needs integral weights")]
    InexactExponent(f64),

    #[error("S_t scaling in exact mode needs an even integer t, got {0}")]
    OddScaling(f64),

    #[error("exponent {0} is not finite")]
    NonFiniteExponent(f64),

    #[error("index overflow: {0}")]
    Overflow(String),

    #[error("{0} must be at least {1}")]
    CapTooSmall(&'static str, usize),

    #[error("factorization of zero")]
    ZeroIndex,

    #[error("prime factor {0} exceeds the sieve limit")]
    PrimeTooLarge(u64),

    #[error("pair ({0}, {1}) is not coprime")]
    NotCoprime(usize, usize),

    #[error("torus point is missing coordinate {0}")]
    MissingCoordinate(usize),

    #[error("radius {0} outside [0, 1]")]
    RadiusOutOfRange(f64),

    #[error("monomial diagnostic needs t != 0")]
    ZeroT,

    #[error("leading coefficient a_1 is zero; triangular solve impossible")]
    LeadingCoefficientZero,

    #[error("right-hand side inconsistent at degree {degree}: residual {residual:e}")]
    Inconsistent { degree: usize, residual: f64 },

    #[error("moment problem needs ||f||_t = 1, got {0}")]
    NotNormalized(f64),

    #[error("{0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),
}
