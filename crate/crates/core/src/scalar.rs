//! Scalar fields used for coefficients.
//!
//! Every coefficient is a `Complex<R>` where `R` is either [`Exact`]
//! (arbitrary-precision rationals, so `Complex<Exact>` is a Gaussian
//! rational) or [`Float`] (`f64`). A structure is generic over `R`, so mode
//! is uniform within it and mixing modes is a type error. The dynamic
//! [`crate::io::AnySeries`] wrapper reports mixing at runtime instead.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Exact = BigRational;
pub type Float = f64;

/// Arithmetic mode of a structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float => f.write_str("float"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(Error::Parse(format!("unknown mode `{other}`"))),
        }
    }
}

/// Real field underlying a coefficient mode.
pub trait Real:
    Clone + Debug + Display + PartialEq + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    const MODE: Mode;

    /// Unit roundoff of the arithmetic; zero for exact arithmetic.
    const UNIT_ROUNDOFF: f64;

    fn from_i64(v: i64) -> Self;

    /// `num / den`.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// `(num / den)^exp`. Exact arithmetic only admits integral exponents.
    fn pow_ratio(num: u64, den: u64, exp: f64) -> Result<Self>;

    fn to_f64(&self) -> f64;

    /// Conversion from a double. Exact mode converts the binary value exactly.
    fn from_f64(x: f64) -> Option<Self>;

    fn abs_val(&self) -> Self;
}

impl Real for f64 {
    const MODE: Mode = Mode::Float;
    const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn pow_ratio(num: u64, den: u64, exp: f64) -> Result<Self> {
        if !exp.is_finite() {
            return Err(Error::NonFiniteExponent(exp));
        }
        if den == 0 {
            return Err(Error::Domain("zero denominator in weight".into()));
        }
        let base = if den == 1 {
            num as f64
        } else {
            num as f64 / den as f64
        };
        if exp.fract() == 0.0 && exp.abs() <= i32::MAX as f64 {
            Ok(base.powi(exp as i32))
        } else {
            Ok(base.powf(exp))
        }
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }
}

impl Real for BigRational {
    const MODE: Mode = Mode::Exact;
    const UNIT_ROUNDOFF: f64 = 0.0;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn pow_ratio(num: u64, den: u64, exp: f64) -> Result<Self> {
        if !exp.is_finite() {
            return Err(Error::NonFiniteExponent(exp));
        }
        if exp.fract() != 0.0 || exp.abs() > i32::MAX as f64 {
            return Err(Error::InexactExponent(exp));
        }
        if den == 0 {
            return Err(Error::Domain("zero denominator in weight".into()));
        }
        let base = BigRational::new(BigInt::from(num), BigInt::from(den));
        if base.is_zero() && exp < 0.0 {
            return Err(Error::Domain("zero raised to a negative power".into()));
        }
        Ok(num_traits::Pow::pow(&base, exp as i32))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Option<Self> {
        <BigRational as FromPrimitive>::from_f64(x)
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }
}

/// `|z|` as a double.
pub fn abs_f64<R: Real>(z: &Complex<R>) -> f64 {
    z.norm_sqr().to_f64().sqrt()
}

pub fn to_c64<R: Real>(z: &Complex<R>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

pub fn from_c64<R: Real>(z: Complex<f64>) -> Option<Complex<R>> {
    Some(Complex::new(R::from_f64(z.re)?, R::from_f64(z.im)?))
}

pub fn real<R: Real>(r: R) -> Complex<R> {
    Complex::new(r, R::zero())
}

pub fn cint<R: Real>(re: i64, im: i64) -> Complex<R> {
    Complex::new(R::from_i64(re), R::from_i64(im))
}

/// Gaussian rational `(re_num/re_den) + i (im_num/im_den)`.
pub fn gaussian(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Complex<Exact> {
    Complex::new(
        Exact::from_ratio(re_num, re_den),
        Exact::from_ratio(im_num, im_den),
    )
}

/// Convert between modes. Exact to float rounds; float to exact is exact on
/// the binary value.
pub fn convert<R: Real, S: Real>(z: &Complex<R>) -> Complex<S> {
    if R::MODE == S::MODE {
        // Same concrete type; round trip through f64 would lose exactness.
        let any: &dyn std::any::Any = z;
        if let Some(same) = any.downcast_ref::<Complex<S>>() {
            return same.clone();
        }
    }
    let c = to_c64(z);
    Complex::new(
        S::from_f64(c.re).unwrap_or_else(S::zero),
        S::from_f64(c.im).unwrap_or_else(S::zero),
    )
}

/// Serialize a coefficient as `{"re": .., "im": ..}`: JSON numbers in float
/// mode, `"p/q"` strings in exact mode.
pub fn ser_scalar<R: Real, S: serde::Serializer>(
    z: &Complex<R>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Scalar", 2)?;
    match R::MODE {
        Mode::Float => {
            st.serialize_field("re", &z.re.to_f64())?;
            st.serialize_field("im", &z.im.to_f64())?;
        }
        Mode::Exact => {
            st.serialize_field("re", &z.re.to_string())?;
            st.serialize_field("im", &z.im.to_string())?;
        }
    }
    st.end()
}

/// Serialize a real value: a number in float mode, a `"p/q"` string in exact mode.
pub fn ser_real<R: Real, S: serde::Serializer>(
    r: &R,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match R::MODE {
        Mode::Float => s.serialize_f64(r.to_f64()),
        Mode::Exact => s.serialize_str(&r.to_string()),
    }
}

/// Neumaier-compensated sum of doubles, order-fixed.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
