//! Truncated analytic functions `f = sum_{n>=1} a_n z^n` on the disk, the
//! `D_t` inner product, power dilations `f(z^k)`, the `S_t` scaling and the
//! Gram matrix of a dilation system.

use num_complex::Complex;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::scalar::{abs_f64, real, Real};
use crate::tail::GeometricTail;

/// Finitely supported coefficients `a_1..a_N`. There is no constant term:
/// `coeffs[0]` is `a_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<R: Real> {
    coeffs: Vec<Complex<R>>,
    tail: Option<GeometricTail>,
}

impl<R: Real> TruncatedSeries<R> {
    /// Series with `coeffs[n - 1] = a_n`.
    pub fn new(coeffs: Vec<Complex<R>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::CapTooSmall("degree cap", 1));
        }
        Ok(Self { coeffs, tail: None })
    }

    pub fn zero(degree_cap: usize) -> Result<Self> {
        Self::new(vec![Complex::zero(); degree_cap])
    }

    /// `c z^n`.
    pub fn monomial(n: usize, c: Complex<R>) -> Result<Self> {
        Self::from_sparse(n, [(n, c)])
    }

    /// Series with cap `degree_cap` and the listed `(n, a_n)` terms.
    pub fn from_sparse(
        degree_cap: usize,
        terms: impl IntoIterator<Item = (usize, Complex<R>)>,
    ) -> Result<Self> {
        let mut s = Self::zero(degree_cap)?;
        for (n, c) in terms {
            if n == 0 {
                return Err(Error::Domain("coefficient index 0 does not exist".into()));
            }
            if n > degree_cap {
                return Err(Error::Overflow(format!("index {n} beyond cap {degree_cap}")));
            }
            s.coeffs[n - 1] = c;
        }
        Ok(s)
    }

    /// Attach an envelope for the discarded coefficients.
    pub fn with_tail(mut self, tail: GeometricTail) -> Result<Self> {
        if !tail.is_valid() {
            return Err(Error::Domain("invalid tail envelope".into()));
        }
        if tail.first_index() <= self.degree_cap() as f64 {
            return Err(Error::Domain(format!(
                "tail starts at {} inside the degree cap {}",
                tail.first_index(),
                self.degree_cap()
            )));
        }
        self.tail = Some(tail);
        Ok(self)
    }

    pub fn tail(&self) -> Option<&GeometricTail> {
        self.tail.as_ref()
    }

    pub fn degree_cap(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex<R>] {
        &self.coeffs
    }

    /// `a_n`, zero outside `1..=N`.
    pub fn coeff(&self, n: usize) -> Complex<R> {
        self.get(n).cloned().unwrap_or_else(Complex::zero)
    }

    pub fn get(&self, n: usize) -> Option<&Complex<R>> {
        if n == 0 {
            None
        } else {
            self.coeffs.get(n - 1)
        }
    }

    /// Nonzero terms `(n, a_n)` in increasing `n`.
    pub fn support(&self) -> impl Iterator<Item = (usize, &Complex<R>)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i + 1, c))
    }

    pub fn support_len(&self) -> usize {
        self.support().count()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn mode(&self) -> crate::scalar::Mode {
        R::MODE
    }

    /// Same series in another arithmetic mode.
    pub fn to_mode<S: Real>(&self) -> TruncatedSeries<S> {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(crate::scalar::convert).collect(),
            tail: self.tail.clone(),
        }
    }

    /// Multiply every coefficient (and the tail envelope) by `c`.
    pub fn scaled_by(&self, c: &Complex<R>) -> Self {
        let tail = self.tail.clone().map(|mut t| {
            t.amplitude *= abs_f64(c);
            t
        });
        Self {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
            tail,
        }
    }

    /// Pad with zeros to a larger cap. The tail must still lie beyond it.
    pub fn padded(&self, degree_cap: usize) -> Result<Self> {
        let mut coeffs = self.coeffs.clone();
        if degree_cap > coeffs.len() {
            coeffs.resize(degree_cap, Complex::zero());
        }
        let s = Self::new(coeffs)?;
        match &self.tail {
            Some(t) => s.with_tail(t.clone()),
            None => Ok(s),
        }
    }
}

/// The parameter `t` of `D_t` and its two weight laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirichletWeight {
    pub t: f64,
}

impl DirichletWeight {
    pub fn new(t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::NonFiniteExponent(t));
        }
        Ok(Self { t })
    }

    /// `(n + 1)^t`, the norm weight.
    pub fn norm_weight<R: Real>(&self, n: u64) -> Result<R> {
        if self.t == 0.0 {
            return Ok(R::one());
        }
        R::pow_ratio(n + 1, 1, self.t)
    }

    /// `n^(t/2)`, the `S_t` scaling.
    pub fn scale_weight<R: Real>(&self, n: u64) -> Result<R> {
        if self.t == 0.0 {
            return Ok(R::one());
        }
        check_scaling_exponent::<R>(self.t)?;
        R::pow_ratio(n, 1, self.t / 2.0)
    }
}

pub(crate) fn check_scaling_exponent<R: Real>(t: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::NonFiniteExponent(t));
    }
    if R::MODE == crate::scalar::Mode::Exact && (t / 2.0).fract() != 0.0 {
        return Err(Error::OddScaling(t));
    }
    Ok(())
}

/// Sum of `conj(g_n) f_n (n+1)^t` over the common range.
pub fn inner_product<R: Real>(
    f: &TruncatedSeries<R>,
    g: &TruncatedSeries<R>,
    w: DirichletWeight,
) -> Result<Complex<R>> {
    let mut acc = Complex::zero();
    for (i, (a, b)) in f.coeffs.iter().zip(&g.coeffs).enumerate() {
        if a.is_zero() || b.is_zero() {
            continue;
        }
        let weight: R = w.norm_weight((i + 1) as u64)?;
        acc = acc + a.clone() * b.conj() * real(weight);
    }
    Ok(acc)
}

/// `||f||_t^2`, exact in exact mode.
pub fn norm_sq<R: Real>(f: &TruncatedSeries<R>, t: f64) -> Result<R> {
    dilated_norm_sq(f, t, 1)
}

/// `||f||_t`.
pub fn norm<R: Real>(f: &TruncatedSeries<R>, t: f64) -> Result<f64> {
    Ok(norm_sq(f, t)?.to_f64().max(0.0).sqrt())
}

/// `||f(z^k)||_t^2 = sum |a_n|^2 (nk + 1)^t` without building the dilation.
pub fn dilated_norm_sq<R: Real>(f: &TruncatedSeries<R>, t: f64, k: usize) -> Result<R> {
    let w = DirichletWeight::new(t)?;
    let mut acc = R::zero();
    for (n, a) in f.support() {
        let d = (n as u64)
            .checked_mul(k as u64)
            .ok_or_else(|| Error::Overflow(format!("{n} * {k}")))?;
        acc = acc + a.norm_sqr() * w.norm_weight::<R>(d)?;
    }
    Ok(acc)
}

/// `f(z^k)`: coefficient `a_n` moves to index `nk`.
pub fn dilate<R: Real>(f: &TruncatedSeries<R>, k: usize) -> Result<TruncatedSeries<R>> {
    if k == 0 {
        return Err(Error::CapTooSmall("dilation factor", 1));
    }
    let cap = f
        .degree_cap()
        .checked_mul(k)
        .ok_or_else(|| Error::Overflow(format!("degree cap {} * {k}", f.degree_cap())))?;
    let mut coeffs = vec![Complex::zero(); cap];
    for (n, a) in f.support() {
        coeffs[n * k - 1] = a.clone();
    }
    Ok(TruncatedSeries {
        coeffs,
        tail: f.tail.as_ref().map(|t| t.dilated(k as u64)),
    })
}

/// `S_t f`: coefficient `a_n` becomes `a_n n^(t/2)`.
pub fn scale_st<R: Real>(f: &TruncatedSeries<R>, t: f64) -> Result<TruncatedSeries<R>> {
    check_scaling_exponent::<R>(t)?;
    let w = DirichletWeight::new(t)?;
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if a.is_zero() {
                Ok(a.clone())
            } else {
                Ok(a.clone() * real(w.scale_weight::<R>((i + 1) as u64)?))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TruncatedSeries {
        coeffs,
        tail: f.tail.as_ref().map(|tl| tl.scaled(t)),
    })
}

/// Hermitian matrix of `<f(z^k), f(z^l)>_t` for `k, l <= K`, with bounds on
/// the truncation and rounding error of every entry.
#[derive(Debug, Clone)]
pub struct GramReport<R: Real> {
    pub entries: Vec<Vec<Complex<R>>>,
    pub tail_bounds: Vec<Vec<f64>>,
    pub k_cap: usize,
    pub t: f64,
}

impl<R: Real> GramReport<R> {
    /// Entry at 1-based `(k, l)`.
    pub fn entry(&self, k: usize, l: usize) -> &Complex<R> {
        &self.entries[k - 1][l - 1]
    }

    pub fn tail_bound(&self, k: usize, l: usize) -> f64 {
        self.tail_bounds[k - 1][l - 1]
    }

    pub fn is_hermitian(&self) -> bool {
        (0..self.k_cap).all(|k| {
            (0..self.k_cap).all(|l| self.entries[k][l] == self.entries[l][k].conj())
        })
    }

    /// Off-diagonal `(k, l)` whose magnitude exceeds its bound, in row order.
    pub fn off_diagonal_violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for k in 0..self.k_cap {
            for l in 0..self.k_cap {
                if k != l && exceeds(&self.entries[k][l], self.tail_bounds[k][l]) {
                    out.push((k + 1, l + 1));
                }
            }
        }
        out
    }

    /// CSV rows `row,col,re,im,tail_bound`, 1-based.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("row,col,re,im,tail_bound\n");
        for k in 0..self.k_cap {
            for l in 0..self.k_cap {
                let e = &self.entries[k][l];
                s.push_str(&format!(
                    "{},{},{},{},{:e}\n",
                    k + 1,
                    l + 1,
                    e.re,
                    e.im,
                    self.tail_bounds[k][l]
                ));
            }
        }
        s
    }
}

impl<R: Real> Serialize for GramReport<R> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        #[derive(Serialize)]
        #[serde(bound = "")]
        struct Entry<'a, R: Real> {
            row: usize,
            col: usize,
            #[serde(serialize_with = "crate::scalar::ser_scalar")]
            value: &'a Complex<R>,
            tail_bound: f64,
        }
        let entries: Vec<Entry<'_, R>> = (0..self.k_cap)
            .flat_map(|k| (0..self.k_cap).map(move |l| (k, l)))
            .map(|(k, l)| Entry {
                row: k + 1,
                col: l + 1,
                value: &self.entries[k][l],
                tail_bound: self.tail_bounds[k][l],
            })
            .collect();
        let mut st = s.serialize_struct("GramReport", 5)?;
        st.serialize_field("k_cap", &self.k_cap)?;
        st.serialize_field("t", &self.t)?;
        st.serialize_field("hermitian", &self.is_hermitian())?;
        st.serialize_field("off_diagonal_violations", &self.off_diagonal_violations())?;
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

/// `|z| > bound`, exactly when the bound is zero.
pub(crate) fn exceeds<R: Real>(z: &Complex<R>, bound: f64) -> bool {
    if bound == 0.0 {
        !z.is_zero()
    } else {
        abs_f64(z) > bound
    }
}

/// A weighted bilinear sum together with what the error bounds need.
#[derive(Debug, Clone)]
pub(crate) struct Accumulated<R: Real> {
    pub value: Complex<R>,
    pub abs_sum: f64,
    pub terms: usize,
}

impl<R: Real> Accumulated<R> {
    pub fn rounding_slack(&self) -> f64 {
        10.0 * R::UNIT_ROUNDOFF * self.terms as f64 * self.abs_sum
    }
}

/// One Gram entry via the gcd parametrization: with `g = gcd(k, l)`,
/// `i = k/g`, `j = l/g`, the entry is `sum_r a_{jr} conj(a_{ir}) (gijr + 1)^t`.
pub(crate) fn gram_entry<R: Real>(
    f: &TruncatedSeries<R>,
    w: DirichletWeight,
    k: usize,
    l: usize,
) -> Result<Accumulated<R>> {
    let g = k.gcd(&l);
    let (i, j) = (k / g, l / g);
    let n = f.degree_cap();
    let r_max = n / i.max(j);
    let mut value = Complex::zero();
    let mut abs_sum = 0.0;
    let mut terms = 0;
    for r in 1..=r_max {
        let a_jr = &f.coeffs[j * r - 1];
        let a_ir = &f.coeffs[i * r - 1];
        if a_jr.is_zero() || a_ir.is_zero() {
            continue;
        }
        let degree = (g * i * j) as u64 * r as u64;
        let weight: R = w.norm_weight(degree)?;
        let wf = weight.to_f64();
        value = value + a_jr.clone() * a_ir.conj() * real(weight);
        abs_sum += abs_f64(a_jr) * abs_f64(a_ir) * wf;
        terms += 1;
    }
    Ok(Accumulated {
        value,
        abs_sum,
        terms,
    })
}

pub fn gram<R: Real>(f: &TruncatedSeries<R>, t: f64, k_cap: usize) -> Result<GramReport<R>> {
    gram_with(f, t, k_cap, Exec::default())
}

pub fn gram_with<R: Real>(
    f: &TruncatedSeries<R>,
    t: f64,
    k_cap: usize,
    exec: Exec,
) -> Result<GramReport<R>> {
    if k_cap == 0 {
        return Err(Error::CapTooSmall("k_cap", 1));
    }
    let w = DirichletWeight::new(t)?;
    k_cap
        .checked_mul(f.degree_cap())
        .and_then(|d| d.checked_add(1))
        .ok_or_else(|| Error::Overflow("k_cap * degree cap".into()))?;

    // ||C_k h||_t for the kept part and the envelope bound for the tail.
    let head_norms: Vec<f64> = (1..=k_cap)
        .map(|k| Ok(dilated_norm_sq(f, t, k)?.to_f64().max(0.0).sqrt()))
        .collect::<Result<_>>()?;
    let tail_norms: Vec<f64> = (1..=k_cap)
        .map(|k| f.tail.as_ref().map_or(0.0, |tl| tl.weighted_l2(t, k as u64)))
        .collect();

    let upper: Vec<(usize, usize)> = (0..k_cap)
        .flat_map(|k| (k..k_cap).map(move |l| (k, l)))
        .collect();
    let computed = exec.map_slice(&upper, |&(k, l)| gram_entry(f, w, k + 1, l + 1));

    let mut entries = vec![vec![Complex::zero(); k_cap]; k_cap];
    let mut tail_bounds = vec![vec![0.0; k_cap]; k_cap];
    for (&(k, l), acc) in upper.iter().zip(computed) {
        let acc = acc?;
        let trunc = head_norms[k] * tail_norms[l]
            + tail_norms[k] * head_norms[l]
            + tail_norms[k] * tail_norms[l];
        let bound = trunc + acc.rounding_slack();
        entries[l][k] = acc.value.conj();
        entries[k][l] = acc.value;
        tail_bounds[k][l] = bound;
        tail_bounds[l][k] = bound;
    }
    Ok(GramReport {
        entries,
        tail_bounds,
        k_cap,
        t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cint, gaussian, Exact};

    fn ex(terms: &[(usize, i64)], cap: usize) -> TruncatedSeries<Exact> {
        TruncatedSeries::from_sparse(cap, terms.iter().map(|&(n, c)| (n, cint(c, 0)))).unwrap()
    }

    #[test]
    fn monomial_self_product() {
        for &t in &[-2.0, -1.0, 0.0, 1.0, 3.0] {
            let f = ex(&[(5, 1)], 5);
            let ip = inner_product(&f, &f, DirichletWeight::new(t).unwrap()).unwrap();
            assert_eq!(ip, real(Exact::pow_ratio(6, 1, t).unwrap()));
        }
    }

    #[test]
    fn disjoint_support_is_orthogonal() {
        let f = ex(&[(1, 1)], 2);
        let g = ex(&[(2, 1)], 2);
        let ip = inner_product(&f, &g, DirichletWeight::new(1.5).unwrap());
        assert!(ip.is_ok());
        let f = f.to_mode::<f64>();
        let g = g.to_mode::<f64>();
        assert_eq!(
            inner_product(&f, &g, DirichletWeight::new(1.5).unwrap()).unwrap(),
            Complex::zero()
        );
    }

    #[test]
    fn overlap_at_two_under_bergman_weight() {
        let f = ex(&[(1, 1), (2, 1)], 2);
        let g = ex(&[(2, 1), (4, 1)], 4);
        let ip = inner_product(&f, &g, DirichletWeight::new(-1.0).unwrap()).unwrap();
        assert_eq!(ip, gaussian(1, 3, 0, 1));
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_second_slot() {
        let f = TruncatedSeries::from_sparse(1, [(1, gaussian(1, 1, 0, 1))]).unwrap();
        let g = TruncatedSeries::from_sparse(1, [(1, gaussian(0, 1, 1, 1))]).unwrap();
        let ip = inner_product(&f, &g, DirichletWeight::new(0.0).unwrap()).unwrap();
        assert_eq!(ip, gaussian(0, 1, -1, 1));
    }

    #[test]
    fn dilate_examples() {
        let f = ex(&[(1, 1), (3, 1)], 3);
        assert_eq!(dilate(&f, 2).unwrap(), ex(&[(2, 1), (6, 1)], 6));
        assert_eq!(dilate(&f, 1).unwrap(), f);
        assert_eq!(dilate(&ex(&[(2, 1)], 2), 3).unwrap(), ex(&[(6, 1)], 6));
        assert!(matches!(dilate(&f, 0), Err(Error::CapTooSmall(..))));
        assert!(matches!(dilate(&f, usize::MAX), Err(Error::Overflow(_))));
    }

    #[test]
    fn scale_examples() {
        let f = ex(&[(1, 1), (4, 1)], 4);
        assert_eq!(scale_st(&f, 2.0).unwrap(), ex(&[(1, 1), (4, 4)], 4));
        assert_eq!(scale_st(&f, 0.0).unwrap(), f);
        assert!(matches!(scale_st(&f, 1.0), Err(Error::OddScaling(_))));
        assert!(scale_st(&f.to_mode::<f64>(), 1.0).is_ok());
    }

    #[test]
    fn norm_examples() {
        let f = ex(&[(3, 1)], 3).to_mode::<f64>();
        assert!((norm(&f, 2.0).unwrap() - 4.0).abs() < 1e-15);
        assert_eq!(norm(&TruncatedSeries::<f64>::zero(4).unwrap(), 1.0).unwrap(), 0.0);
        let f = ex(&[(1, 1), (2, 1)], 2);
        assert!((norm(&f, 0.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn gram_of_z_is_diagonal() {
        let f = ex(&[(1, 1)], 1);
        let g = gram(&f, -1.0, 5).unwrap();
        for k in 1..=5 {
            for l in 1..=5 {
                let want = if k == l {
                    real(Exact::from_ratio(1, k as i64 + 1))
                } else {
                    Complex::zero()
                };
                assert_eq!(*g.entry(k, l), want);
            }
        }
    }

    #[test]
    fn gram_off_diagonal_example() {
        let f = ex(&[(1, 1), (2, 1)], 2);
        let g = gram(&f, -1.0, 2).unwrap();
        assert_eq!(*g.entry(1, 2), gaussian(1, 3, 0, 1));
        assert!(g.is_hermitian());
        assert_eq!(g.off_diagonal_violations(), vec![(1, 2), (2, 1)]);
    }

    #[test]
    fn gram_csv_layout() {
        let f = ex(&[(1, 1)], 1);
        let csv = gram(&f, 0.0, 2).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "row,col,re,im,tail_bound");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("1,1,1,0,"));
    }

    #[test]
    fn tail_must_lie_beyond_cap() {
        let f = ex(&[(1, 1)], 4);
        assert!(f.clone().with_tail(GeometricTail::new(2, 2, 1.0, 0.5)).is_err());
        assert!(f.with_tail(GeometricTail::new(2, 3, 1.0, 0.5)).is_ok());
    }
}
