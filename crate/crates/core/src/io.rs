//! File formats and fixture generators.
//!
//! Coefficient files are JSON objects
//! `{ "mode": "exact" | "float", "t": number, "coeffs": [...] }` where entry
//! `n - 1` is `a_n`: `[re_num, re_den, im_num, im_den]` in exact mode (each an
//! integer or a decimal string for large values) or `[re, im]` in float mode.
//! An optional `"tail"` object carries a [`GeometricTail`] envelope.

use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bohr::BohrSeries;
use crate::error::{Error, Result};
use crate::scalar::{abs_f64, Exact, Mode, Real};
use crate::series::TruncatedSeries;
use crate::tail::GeometricTail;

/// A series whose mode is only known at runtime.
#[derive(Debug, Clone, PartialEq)]
pub enum AnySeries {
    Exact(TruncatedSeries<Exact>),
    Float(TruncatedSeries<f64>),
}

impl AnySeries {
    pub fn mode(&self) -> Mode {
        match self {
            AnySeries::Exact(_) => Mode::Exact,
            AnySeries::Float(_) => Mode::Float,
        }
    }

    pub fn degree_cap(&self) -> usize {
        match self {
            AnySeries::Exact(s) => s.degree_cap(),
            AnySeries::Float(s) => s.degree_cap(),
        }
    }

    /// Convert to `mode`.
    pub fn into_mode(self, mode: Mode) -> AnySeries {
        match (self, mode) {
            (AnySeries::Exact(s), Mode::Float) => AnySeries::Float(s.to_mode()),
            (AnySeries::Float(s), Mode::Exact) => AnySeries::Exact(s.to_mode()),
            (s, _) => s,
        }
    }

    pub fn exact(&self) -> Result<&TruncatedSeries<Exact>> {
        match self {
            AnySeries::Exact(s) => Ok(s),
            AnySeries::Float(_) => Err(Error::ModeMismatch {
                left: Mode::Exact,
                right: Mode::Float,
            }),
        }
    }

    pub fn float(&self) -> Result<&TruncatedSeries<f64>> {
        match self {
            AnySeries::Float(s) => Ok(s),
            AnySeries::Exact(_) => Err(Error::ModeMismatch {
                left: Mode::Float,
                right: Mode::Exact,
            }),
        }
    }

    /// Both series in one mode, or a mode-mismatch error.
    pub fn check_same_mode(&self, other: &AnySeries) -> Result<()> {
        if self.mode() != other.mode() {
            return Err(Error::ModeMismatch {
                left: self.mode(),
                right: other.mode(),
            });
        }
        Ok(())
    }
}

impl From<TruncatedSeries<Exact>> for AnySeries {
    fn from(s: TruncatedSeries<Exact>) -> Self {
        AnySeries::Exact(s)
    }
}

impl From<TruncatedSeries<f64>> for AnySeries {
    fn from(s: TruncatedSeries<f64>) -> Self {
        AnySeries::Float(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFile {
    pub t: Option<f64>,
    pub series: AnySeries,
}

#[derive(Deserialize)]
struct RawCoefficients {
    mode: Mode,
    #[serde(default)]
    t: Option<f64>,
    coeffs: Vec<Vec<Value>>,
    #[serde(default)]
    tail: Option<GeometricTail>,
}

fn int_of(v: &Value, at: usize) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(Error::Parse(format!("entry {at}: {n} is not an integer")))
            }
        }
        Value::String(s) => s
            .trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("entry {at}: `{s}` is not an integer"))),
        other => Err(Error::Parse(format!("entry {at}: unexpected {other}"))),
    }
}

fn ratio_of(num: &Value, den: &Value, at: usize) -> Result<BigRational> {
    let d = int_of(den, at)?;
    if d.is_zero() {
        return Err(Error::Parse(format!("entry {at}: zero denominator")));
    }
    Ok(BigRational::new(int_of(num, at)?, d))
}

fn float_of(v: &Value, at: usize) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Parse(format!("entry {at}: {v} is not a finite number")))
}

/// Parse one exact scalar `[re_num, re_den, im_num, im_den]`.
pub fn parse_exact_scalar(v: &[Value], at: usize) -> Result<Complex<Exact>> {
    if v.len() != 4 {
        return Err(Error::Parse(format!(
            "entry {at}: exact scalars have 4 components, got {}",
            v.len()
        )));
    }
    Ok(Complex::new(
        ratio_of(&v[0], &v[1], at)?,
        ratio_of(&v[2], &v[3], at)?,
    ))
}

/// Parse one float scalar `[re, im]`.
pub fn parse_float_scalar(v: &[Value], at: usize) -> Result<Complex<f64>> {
    if v.len() != 2 {
        return Err(Error::Parse(format!(
            "entry {at}: float scalars have 2 components, got {}",
            v.len()
        )));
    }
    Ok(Complex::new(float_of(&v[0], at)?, float_of(&v[1], at)?))
}

fn int_value(i: &BigInt) -> Value {
    match i.to_i64() {
        Some(v) => json!(v),
        None => json!(i.to_string()),
    }
}

fn exact_entry(z: &Complex<Exact>) -> Vec<Value> {
    vec![
        int_value(z.re.numer()),
        int_value(z.re.denom()),
        int_value(z.im.numer()),
        int_value(z.im.denom()),
    ]
}

pub fn parse_coefficients(text: &str) -> Result<CoefficientFile> {
    let raw: RawCoefficients =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if let Some(t) = raw.t {
        if !t.is_finite() {
            return Err(Error::NonFiniteExponent(t));
        }
    }
    let series = match raw.mode {
        Mode::Exact => {
            let coeffs = raw
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, v)| parse_exact_scalar(v, i + 1))
                .collect::<Result<Vec<_>>>()?;
            let mut s = TruncatedSeries::new(coeffs)?;
            if let Some(t) = raw.tail {
                s = s.with_tail(t)?;
            }
            AnySeries::Exact(s)
        }
        Mode::Float => {
            let coeffs = raw
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, v)| parse_float_scalar(v, i + 1))
                .collect::<Result<Vec<_>>>()?;
            let mut s = TruncatedSeries::new(coeffs)?;
            if let Some(t) = raw.tail {
                s = s.with_tail(t)?;
            }
            AnySeries::Float(s)
        }
    };
    Ok(CoefficientFile { t: raw.t, series })
}

pub fn read_coefficients(path: &Path) -> Result<CoefficientFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_coefficients(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// One coefficient per line; `t` defaults to 0.
pub fn coefficients_to_json(series: &AnySeries, t: Option<f64>) -> Result<String> {
    let (mode, coeffs, tail): (Mode, Vec<Vec<Value>>, _) = match series {
        AnySeries::Exact(s) => (
            Mode::Exact,
            s.coeffs().iter().map(exact_entry).collect(),
            s.tail().cloned(),
        ),
        AnySeries::Float(s) => (
            Mode::Float,
            s.coeffs().iter().map(|z| vec![json!(z.re), json!(z.im)]).collect(),
            s.tail().cloned(),
        ),
    };
    let mut out = String::from("{\n");
    out.push_str(&format!("  \"mode\": {},\n", enc(&mode)?));
    out.push_str(&format!("  \"t\": {},\n", enc(&t.unwrap_or(0.0))?));
    if let Some(tail) = tail {
        out.push_str(&format!("  \"tail\": {},\n", enc(&tail)?));
    }
    out.push_str("  \"coeffs\": [\n");
    for (i, c) in coeffs.iter().enumerate() {
        let sep = if i + 1 == coeffs.len() { "" } else { "," };
        out.push_str(&format!("    {}{sep}\n", enc(c)?));
    }
    out.push_str("  ]\n}");
    Ok(out)
}

fn enc<T: Serialize + ?Sized>(v: &T) -> Result<String> {
    serde_json::to_string(v).map_err(|e| Error::Parse(e.to_string()))
}

/// `[{"exps": [...], "re": .., "im": ..}, ...]` in multi-index order.
pub fn bohr_to_json<R: Real>(b: &BohrSeries<R>) -> Value {
    let terms = b
        .terms()
        .map(|(idx, c)| {
            let (re, im) = match R::MODE {
                Mode::Float => (json!(c.re.to_f64()), json!(c.im.to_f64())),
                Mode::Exact => (json!(c.re.to_string()), json!(c.im.to_string())),
            };
            json!({ "exps": idx.to_vec(), "re": re, "im": im })
        })
        .collect();
    Value::Array(terms)
}

/// Source of `lambda_k` in a moment input file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    /// `"ones"`, or `"monomial_law"` for `((kN+k+N+1)/(kN+1))^{t/2}` with `N`
    /// the degree of a monomial `f`.
    Named(String),
    /// Real moduli, `[re, im]`, or exact `[num, den, num, den]` per entry.
    List(Vec<Value>),
}

/// `{ "t", "f", "lambdas", "k_cap", "degree_cap" }` with `f` a path relative
/// to the input file.
#[derive(Debug, Clone, Deserialize)]
pub struct MomentInput {
    pub t: f64,
    pub f: PathBuf,
    pub lambdas: LambdaSpec,
    pub k_cap: usize,
    #[serde(default)]
    pub degree_cap: Option<usize>,
    /// Optional phases multiplying real moduli.
    #[serde(default)]
    pub phases: Option<Vec<Value>>,
}

impl MomentInput {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<(Self, CoefficientFile)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let input = Self::parse(&text)?;
        let f_path = match path.parent() {
            Some(dir) if input.f.is_relative() => dir.join(&input.f),
            _ => input.f.clone(),
        };
        let file = read_coefficients(&f_path)?;
        Ok((input, file))
    }

    /// The series padded to `degree_cap` when one is given.
    pub fn series(&self, file: &CoefficientFile) -> Result<AnySeries> {
        let cap = match self.degree_cap {
            None => return Ok(file.series.clone()),
            Some(c) => c,
        };
        if cap < file.series.degree_cap() {
            return Err(Error::Domain(format!(
                "degree_cap {cap} is below the file's cap {}",
                file.series.degree_cap()
            )));
        }
        Ok(match &file.series {
            AnySeries::Exact(s) => AnySeries::Exact(s.padded(cap)?),
            AnySeries::Float(s) => AnySeries::Float(s.padded(cap)?),
        })
    }

    /// `lambda_1..lambda_K` in the mode of `f`.
    pub fn lambdas<R: Real>(&self, f: &TruncatedSeries<R>) -> Result<Vec<Complex<R>>> {
        let mut out = match &self.lambdas {
            LambdaSpec::Named(name) => match name.as_str() {
                "ones" => vec![Complex::new(R::one(), R::zero()); self.k_cap],
                "monomial_law" => {
                    let mut support = f.support();
                    let degree = match (support.next(), support.next()) {
                        (Some((n, _)), None) => n as u64,
                        _ => {
                            return Err(Error::Domain(
                                "monomial_law needs a monomial f".into(),
                            ))
                        }
                    };
                    (1..=self.k_cap as u64)
                        .map(|k| {
                            crate::moment::monomial_lambda_modulus::<R>(k, degree, self.t)
                                .map(crate::scalar::real)
                        })
                        .collect::<Result<Vec<_>>>()?
                }
                other => return Err(Error::Parse(format!("unknown lambda law `{other}`"))),
            },
            LambdaSpec::List(items) => items
                .iter()
                .enumerate()
                .map(|(i, v)| scalar_of::<R>(v, i + 1))
                .collect::<Result<Vec<_>>>()?,
        };
        if let Some(phases) = &self.phases {
            if phases.len() < out.len() {
                return Err(Error::Parse(format!(
                    "{} phases for {} lambdas",
                    phases.len(),
                    out.len()
                )));
            }
            for (i, (l, p)) in out.iter_mut().zip(phases).enumerate() {
                let ph = scalar_of::<R>(p, i + 1)?;
                if (abs_f64(&ph) - 1.0).abs() > 1e-12 {
                    return Err(Error::Domain(format!("phase {} is not unimodular", i + 1)));
                }
                *l = l.clone() * ph;
            }
        }
        Ok(out)
    }
}

/// A number (real), `[re, im]`, or `[num, den, num, den]`.
fn scalar_of<R: Real>(v: &Value, at: usize) -> Result<Complex<R>> {
    match v {
        Value::Number(_) | Value::String(_) => match R::MODE {
            Mode::Exact => {
                let r = int_of(v, at).map(BigRational::from_integer).or_else(|_| {
                    let x = float_of(v, at)?;
                    <BigRational as num_traits::FromPrimitive>::from_f64(x)
                        .ok_or_else(|| Error::Parse(format!("entry {at}: {x}")))
                })?;
                Ok(crate::scalar::convert(&Complex::new(r, BigRational::zero())))
            }
            Mode::Float => Ok(Complex::new(
                R::from_f64(float_of(v, at)?).expect("finite"),
                R::zero(),
            )),
        },
        Value::Array(items) if items.len() == 4 => {
            Ok(crate::scalar::convert(&parse_exact_scalar(items, at)?))
        }
        Value::Array(items) if items.len() == 2 => {
            let z = parse_float_scalar(items, at)?;
            match R::MODE {
                Mode::Float => Ok(crate::scalar::convert(&z)),
                Mode::Exact => crate::scalar::from_c64(z)
                    .ok_or_else(|| Error::Parse(format!("entry {at}: non-finite"))),
            }
        }
        other => Err(Error::Parse(format!("entry {at}: unexpected {other}"))),
    }
}

/// `a z - (1 - |a|^2) sum_{m=1}^{M} conj(a)^{m-1} z^{2^m}` with degree cap
/// `2^M` and the envelope of the remaining terms.
pub fn blaschke<R: Real>(a: Complex<R>, m: u32) -> Result<TruncatedSeries<R>> {
    let a_abs = abs_f64(&a);
    if a_abs >= 1.0 || a.norm_sqr() >= R::one() {
        return Err(Error::Domain(format!("|a| = {a_abs} must be below 1")));
    }
    if m == 0 || m > 40 {
        return Err(Error::Domain(format!("M = {m} outside 1..=40")));
    }
    let cap = 1usize << m;
    let factor = R::one() - a.norm_sqr();
    let mut terms = vec![(1usize, a.clone())];
    let mut power = Complex::new(R::one(), R::zero());
    for e in 1..=m {
        terms.push((1usize << e, -(power.clone() * crate::scalar::real(factor.clone()))));
        power = power * a.conj();
    }
    let s = TruncatedSeries::from_sparse(cap, terms)?;
    let amplitude = factor.to_f64() * a_abs.powi(m as i32);
    if amplitude == 0.0 {
        return Ok(s);
    }
    s.with_tail(GeometricTail::new(2, m + 1, amplitude, a_abs))
}

pub fn monomial<R: Real>(n: usize, c: Complex<R>) -> Result<TruncatedSeries<R>> {
    TruncatedSeries::monomial(n, c)
}

/// Parameters for random fixtures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RandomSpec {
    pub degree_cap: usize,
    /// Number of nonzero coefficients.
    pub support: usize,
    pub seed: u64,
    /// Force `a_1 != 0`.
    pub leading: bool,
    /// Integer coefficient parts are drawn from `-range..=range`.
    pub range: i64,
}

/// Random series: exact mode draws Gaussian integers with parts in
/// `[-range, range]`, float mode draws parts uniformly in `[-1, 1]`.
pub fn random<R: Real>(spec: &RandomSpec) -> Result<TruncatedSeries<R>> {
    if spec.support == 0 || spec.support > spec.degree_cap {
        return Err(Error::Domain(format!(
            "support {} must lie in 1..={}",
            spec.support, spec.degree_cap
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut positions: Vec<usize> = Vec::with_capacity(spec.support);
    if spec.leading {
        positions.push(1);
    }
    while positions.len() < spec.support {
        let n = rng.random_range(1..=spec.degree_cap);
        if !positions.contains(&n) {
            positions.push(n);
        }
    }
    positions.sort_unstable();
    let mut terms = Vec::with_capacity(positions.len());
    for n in positions {
        let c = loop {
            let c: Complex<R> = match R::MODE {
                Mode::Exact => Complex::new(
                    R::from_i64(rng.random_range(-spec.range..=spec.range)),
                    R::from_i64(rng.random_range(-spec.range..=spec.range)),
                ),
                Mode::Float => Complex::new(
                    R::from_f64(rng.random_range(-1.0..=1.0)).expect("finite"),
                    R::from_f64(rng.random_range(-1.0..=1.0)).expect("finite"),
                ),
            };
            if !c.is_zero() {
                break c;
            }
        };
        terms.push((n, c));
    }
    TruncatedSeries::from_sparse(spec.degree_cap, terms)
}
