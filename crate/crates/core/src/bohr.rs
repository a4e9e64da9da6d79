//! Bohr lift of a disk series to the infinite torus.
//!
//! The positive integer `n = p_1^{a_1} ... p_m^{a_m}` is sent to the
//! multi-index `alpha(n) = (a_1, ..., a_m)` and `z^n` to the monomial
//! `zeta^{alpha(n)}`. Because `alpha(mn) = alpha(m) + alpha(n)`, dilation by
//! `k` on the disk becomes multiplication by `zeta^{alpha(k)}` on the torus.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::ops::Add;

use num_complex::{Complex, Complex64};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::primes;
use crate::scalar::{compensated_sum, real, to_c64, Real};
use crate::series::{scale_st, TruncatedSeries};
use crate::tail::GeometricTail;

/// Number of leading prime coordinates stored densely.
const DENSE_PRIMES: usize = 64;

/// Finitely supported exponent vector over the primes.
///
/// Exponents of the first 64 primes live in a short dense prefix (trailing
/// zeros trimmed); larger prime indices go to a sparse map without zeros.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    dense: Vec<u32>,
    sparse: BTreeMap<usize, u32>,
}

impl MultiIndex {
    pub fn one() -> Self {
        Self::default()
    }

    /// From the exponent list `(e_0, e_1, ...)` of the primes `2, 3, ...`.
    pub fn from_exps(exps: &[u32]) -> Self {
        Self::from_pairs(exps.iter().copied().enumerate())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut idx = Self::default();
        for (m, e) in pairs {
            idx.set(m, idx.get(m) + e);
        }
        idx
    }

    fn set(&mut self, m: usize, e: u32) {
        if m < DENSE_PRIMES {
            if m >= self.dense.len() {
                if e == 0 {
                    return;
                }
                self.dense.resize(m + 1, 0);
            }
            self.dense[m] = e;
            while self.dense.last() == Some(&0) {
                self.dense.pop();
            }
        } else if e == 0 {
            self.sparse.remove(&m);
        } else {
            self.sparse.insert(m, e);
        }
    }

    /// Exponent of the `m`-th prime (0-based).
    pub fn get(&self, m: usize) -> u32 {
        if m < DENSE_PRIMES {
            self.dense.get(m).copied().unwrap_or(0)
        } else {
            self.sparse.get(&m).copied().unwrap_or(0)
        }
    }

    /// Nonzero `(prime index, exponent)` pairs in increasing index.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.dense
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, e)| e != 0)
            .chain(self.sparse.iter().map(|(&m, &e)| (m, e)))
    }

    /// Dense exponent list up to the last nonzero entry.
    pub fn to_vec(&self) -> Vec<u32> {
        match self.max_coord() {
            None => Vec::new(),
            Some(top) => (0..=top).map(|m| self.get(m)).collect(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.dense.is_empty() && self.sparse.is_empty()
    }

    /// Largest prime index with a nonzero exponent.
    pub fn max_coord(&self) -> Option<usize> {
        self.sparse
            .keys()
            .next_back()
            .copied()
            .or_else(|| self.dense.len().checked_sub(1))
    }

    /// `self - other` when `other <= self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut out = self.clone();
        for (m, e) in other.iter() {
            let have = out.get(m);
            if have < e {
                return None;
            }
            out.set(m, have - e);
        }
        Some(out)
    }

    pub fn total_degree(&self) -> u64 {
        self.iter().map(|(_, e)| e as u64).sum()
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;

    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        MultiIndex::from_pairs(self.iter().chain(rhs.iter()))
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(MultiIndex::from_exps(&Vec::<u32>::deserialize(d)?))
    }
}

/// `alpha(n)`.
pub fn factorize(n: u64) -> Result<MultiIndex> {
    Ok(MultiIndex::from_pairs(primes::factor_indices(n)?))
}

/// Inverse of [`factorize`].
pub fn index_to_int(m: &MultiIndex) -> Result<u64> {
    let mut acc: u64 = 1;
    for (idx, e) in m.iter() {
        let p = primes::nth(idx)?;
        let pe = p
            .checked_pow(e)
            .ok_or_else(|| Error::Overflow(format!("{p}^{e}")))?;
        acc = acc
            .checked_mul(pe)
            .ok_or_else(|| Error::Overflow("multi-index product".into()))?;
    }
    Ok(acc)
}

/// Sparse power series on the infinite torus, no stored zero terms.
#[derive(Debug, Clone, PartialEq)]
pub struct BohrSeries<R: Real> {
    terms: BTreeMap<MultiIndex, Complex<R>>,
    tail: Option<GeometricTail>,
}

impl<R: Real> BohrSeries<R> {
    pub fn from_terms(terms: impl IntoIterator<Item = (MultiIndex, Complex<R>)>) -> Self {
        let mut map = BTreeMap::new();
        for (idx, c) in terms {
            let slot = map.entry(idx).or_insert_with(Complex::zero);
            *slot = slot.clone() + c;
        }
        map.retain(|_, c: &mut Complex<R>| !c.is_zero());
        Self {
            terms: map,
            tail: None,
        }
    }

    /// Attach an envelope for discarded coefficients, indexed by `n` through
    /// `alpha`.
    pub fn with_tail(mut self, tail: Option<GeometricTail>) -> Self {
        self.tail = tail;
        self
    }

    pub fn tail(&self) -> Option<&GeometricTail> {
        self.tail.as_ref()
    }

    /// l1 bound on the discarded coefficients, zero without a tail.
    pub fn tail_l1(&self) -> f64 {
        self.tail.as_ref().map_or(0.0, GeometricTail::l1)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex<R>)> {
        self.terms.iter()
    }

    pub fn get(&self, idx: &MultiIndex) -> Option<&Complex<R>> {
        self.terms.get(idx)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of squared coefficient moduli (the `H^2(T^infinity)` norm squared).
    pub fn coeff_norm_sq(&self) -> R {
        self.terms
            .values()
            .fold(R::zero(), |acc, c| acc + c.norm_sqr())
    }

    /// Largest prime coordinate any term uses.
    pub fn max_coord(&self) -> Option<usize> {
        self.terms.keys().filter_map(MultiIndex::max_coord).max()
    }

    /// Coefficients `a_n = F[alpha(n)]` as a disk series, cap = largest `n`.
    pub fn pullback(&self) -> Result<TruncatedSeries<R>> {
        let terms = self
            .terms
            .iter()
            .map(|(idx, c)| Ok((index_to_int(idx)? as usize, c.clone())))
            .collect::<Result<Vec<_>>>()?;
        let cap = terms.iter().map(|(n, _)| *n).max().unwrap_or(1);
        let s = TruncatedSeries::from_sparse(cap, terms)?;
        match &self.tail {
            Some(t) if t.first_index() > cap as f64 => s.with_tail(t.clone()),
            Some(_) => Err(Error::Domain("tail envelope overlaps the stored terms".into())),
            None => Ok(s),
        }
    }

    /// Terms sorted by `n = index_to_int(alpha)`.
    pub fn terms_by_integer(&self) -> Result<Vec<(u64, &MultiIndex, &Complex<R>)>> {
        let mut v = self
            .terms
            .iter()
            .map(|(idx, c)| Ok((index_to_int(idx)?, idx, c)))
            .collect::<Result<Vec<_>>>()?;
        v.sort_by_key(|(n, _, _)| *n);
        Ok(v)
    }

    pub fn to_mode<S: Real>(&self) -> BohrSeries<S> {
        BohrSeries::from_terms(
            self.terms
                .iter()
                .map(|(i, c)| (i.clone(), crate::scalar::convert(c))),
        )
        .with_tail(self.tail.clone())
    }
}

/// `B f`: term at `alpha(n)` equals `a_n`.
pub fn bohr_lift<R: Real>(f: &TruncatedSeries<R>) -> Result<BohrSeries<R>> {
    let terms = f
        .support()
        .map(|(n, a)| Ok((factorize(n as u64)?, a.clone())))
        .collect::<Result<Vec<_>>>()?;
    Ok(BohrSeries::from_terms(terms).with_tail(f.tail().cloned()))
}

/// `B_t f = B S_t f`.
pub fn bohr_lift_t<R: Real>(f: &TruncatedSeries<R>, t: f64) -> Result<BohrSeries<R>> {
    bohr_lift(&scale_st(f, t)?)
}

/// Radii of the diagonal operator `T_tau`, one per prime coordinate.
#[derive(Debug, Clone, PartialEq)]
pub enum Tau<R: Real> {
    /// All radii 1 (identity).
    Ones,
    /// Explicit radii for the leading coordinates; later coordinates are 1.
    Radii(Vec<R>),
    /// `radii[m] = p_m^(-power/2)`; `power = 1` is the `1/sqrt(p)` preset.
    Star { power: u32 },
}

impl<R: Real> Tau<R> {
    pub fn radii(radii: Vec<R>) -> Result<Self> {
        for r in &radii {
            if *r < R::zero() || *r > R::one() {
                return Err(Error::RadiusOutOfRange(r.to_f64()));
            }
        }
        Ok(Tau::Radii(radii))
    }

    /// `radii[m] = 1/sqrt(p_m)`.
    pub fn star() -> Self {
        Tau::Star { power: 1 }
    }

    /// Radii squared componentwise.
    pub fn squared(&self) -> Self {
        match self {
            Tau::Ones => Tau::Ones,
            Tau::Radii(r) => Tau::Radii(r.iter().map(|x| x.clone() * x.clone()).collect()),
            Tau::Star { power } => Tau::Star { power: power * 2 },
        }
    }

    /// Radius of coordinate `m` (0-based prime index).
    pub fn radius(&self, m: usize) -> Result<R> {
        match self {
            Tau::Ones => Ok(R::one()),
            Tau::Radii(r) => Ok(r.get(m).cloned().unwrap_or_else(R::one)),
            Tau::Star { power } => {
                let p = primes::nth(m)?;
                R::pow_ratio(1, p, *power as f64 / 2.0)
            }
        }
    }

    /// `tau^beta = prod_m radii[m]^beta_m`.
    pub fn monomial_weight(&self, beta: &MultiIndex) -> Result<R> {
        let mut acc = R::one();
        for (m, e) in beta.iter() {
            let r = self.radius(m)?;
            for _ in 0..e {
                acc = acc * r.clone();
            }
        }
        Ok(acc)
    }
}

/// `F_tau = T_tau F`.
pub fn apply_tau<R: Real>(f: &BohrSeries<R>, tau: &Tau<R>) -> Result<BohrSeries<R>> {
    let terms = f
        .terms
        .iter()
        .map(|(idx, c)| Ok((idx.clone(), c.clone() * real(tau.monomial_weight(idx)?))))
        .collect::<Result<Vec<_>>>()?;
    // T_tau is a contraction on each coefficient, so the tail envelope stays valid.
    Ok(BohrSeries::from_terms(terms).with_tail(f.tail.clone()))
}

/// A point of the torus restricted to the leading prime coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    phases: Vec<Complex64>,
    pub seed: Option<u64>,
}

impl TorusPoint {
    pub fn new(phases: Vec<Complex64>) -> Result<Self> {
        for p in &phases {
            if (p.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::Domain(format!("phase {p} is not unimodular")));
            }
        }
        Ok(Self { phases, seed: None })
    }

    pub fn from_angles(angles: &[f64]) -> Self {
        Self {
            phases: angles.iter().map(|&a| Complex64::from_polar(1.0, a)).collect(),
            seed: None,
        }
    }

    pub fn phases(&self) -> &[Complex64] {
        &self.phases
    }
}

/// Flattened monomials for repeated evaluation.
struct Evaluator {
    dims: usize,
    terms: Vec<(Vec<(usize, i32)>, Complex64)>,
}

impl Evaluator {
    fn new<R: Real>(f: &BohrSeries<R>) -> Self {
        Self {
            dims: f.max_coord().map_or(0, |m| m + 1),
            terms: f
                .terms
                .iter()
                .map(|(idx, c)| (idx.iter().map(|(m, e)| (m, e as i32)).collect(), to_c64(c)))
                .collect(),
        }
    }

    fn eval(&self, phases: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::zero();
        for (mono, c) in &self.terms {
            let mut v = *c;
            for &(m, e) in mono {
                v *= phases[m].powi(e);
            }
            acc += v;
        }
        acc
    }

    /// Haar sample `i` of the stream rooted at `seed`.
    fn sample_point(&self, seed: u64, i: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        (0..self.dims)
            .map(|_| Complex64::from_polar(1.0, TAU * rng.random::<f64>()))
            .collect()
    }
}

/// `F(zeta)`.
pub fn evaluate<R: Real>(f: &BohrSeries<R>, zeta: &TorusPoint) -> Result<Complex64> {
    let ev = Evaluator::new(f);
    if ev.dims > zeta.phases.len() {
        return Err(Error::MissingCoordinate(zeta.phases.len()));
    }
    Ok(ev.eval(&zeta.phases))
}

/// Statistics of `|F|` over Haar-uniform torus samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusSummary {
    pub seed: u64,
    pub n_samples: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub variance: f64,
    /// l1 bound on the discarded coefficients: `| |F| - |F_trunc| | <= tail_l1`.
    pub tail_l1: f64,
}

/// `|F(zeta_i)|` for samples `i = 0..n_samples`. Sample `i` depends only on
/// `(seed, i)`, so a longer run extends a shorter one.
pub fn sample_moduli<R: Real>(
    f: &BohrSeries<R>,
    n_samples: usize,
    seed: u64,
    exec: Exec,
) -> Vec<f64> {
    let ev = Evaluator::new(f);
    exec.map_range(n_samples, |i| ev.eval(&ev.sample_point(seed, i as u64)).norm())
}

pub fn sample_modulus<R: Real>(
    f: &BohrSeries<R>,
    n_samples: usize,
    seed: u64,
) -> Result<ModulusSummary> {
    sample_modulus_with(f, n_samples, seed, Exec::default())
}

pub fn sample_modulus_with<R: Real>(
    f: &BohrSeries<R>,
    n_samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<ModulusSummary> {
    if n_samples == 0 {
        return Err(Error::CapTooSmall("n_samples", 1));
    }
    let moduli = sample_moduli(f, n_samples, seed, exec);
    Ok(summarize(&moduli, seed, f.tail_l1()))
}

pub(crate) fn summarize(moduli: &[f64], seed: u64, tail_l1: f64) -> ModulusSummary {
    let n = moduli.len() as f64;
    let mean = compensated_sum(moduli.iter().copied()) / n;
    let variance = compensated_sum(moduli.iter().map(|x| (x - mean) * (x - mean))) / n;
    ModulusSummary {
        seed,
        n_samples: moduli.len(),
        min: moduli.iter().copied().fold(f64::INFINITY, f64::min),
        max: moduli.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean,
        variance,
        tail_l1,
    }
}

/// Histogram of sampled moduli with `bins` equal-width bins on `[lo, hi]`.
pub fn modulus_histogram(moduli: &[f64], bins: usize) -> Vec<(f64, f64, usize)> {
    if moduli.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = moduli.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = moduli.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &x in moduli {
        let b = (((x - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(b, c)| (lo + b as f64 * width, lo + (b + 1) as f64 * width, c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cint, gaussian, Exact};

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::from_exps(e)
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(12).unwrap().to_vec(), vec![2, 1]);
        assert!(factorize(1).unwrap().is_one());
        assert_eq!(factorize(35).unwrap().to_vec(), vec![0, 0, 1, 1]);
        assert!(matches!(factorize(0), Err(Error::ZeroIndex)));
    }

    #[test]
    fn index_to_int_examples() {
        assert_eq!(index_to_int(&mi(&[2, 1])).unwrap(), 12);
        assert_eq!(index_to_int(&MultiIndex::one()).unwrap(), 1);
        assert_eq!(index_to_int(&mi(&[0, 2])).unwrap(), 9);
        assert!(matches!(index_to_int(&mi(&[64])), Err(Error::Overflow(_))));
    }

    #[test]
    fn sparse_overflow_coordinates() {
        // 313 is the 65th prime, index 64: past the dense prefix.
        let idx = factorize(2 * 313).unwrap();
        assert_eq!(idx.get(0), 1);
        assert_eq!(idx.get(64), 1);
        assert_eq!(idx.max_coord(), Some(64));
        assert_eq!(index_to_int(&idx).unwrap(), 626);
        assert_eq!(idx.to_vec().len(), 65);
    }

    #[test]
    fn lift_examples() {
        let f: TruncatedSeries<Exact> = TruncatedSeries::from_sparse(
            6,
            [(1, cint(1, 0)), (2, gaussian(1, 2, 0, 1)), (6, gaussian(1, 4, 0, 1))],
        )
        .unwrap();
        let lift = bohr_lift(&f).unwrap();
        assert_eq!(lift.len(), 3);
        assert_eq!(lift.get(&MultiIndex::one()), Some(&cint(1, 0)));
        assert_eq!(lift.get(&mi(&[1])), Some(&gaussian(1, 2, 0, 1)));
        assert_eq!(lift.get(&mi(&[1, 1])), Some(&gaussian(1, 4, 0, 1)));

        let z2: TruncatedSeries<Exact> = TruncatedSeries::monomial(2, cint(1, 0)).unwrap();
        let l = bohr_lift(&z2).unwrap();
        assert_eq!(l.len(), 1);
        assert_eq!(l.get(&mi(&[1])), Some(&cint(1, 0)));
    }

    #[test]
    fn weighted_lift_examples() {
        let z4: TruncatedSeries<Exact> = TruncatedSeries::monomial(4, cint(1, 0)).unwrap();
        let l = bohr_lift_t(&z4, 2.0).unwrap();
        assert_eq!(l.get(&mi(&[2])), Some(&cint(4, 0)));
        assert_eq!(bohr_lift_t(&z4, 0.0).unwrap(), bohr_lift(&z4).unwrap());

        let f: TruncatedSeries<f64> =
            TruncatedSeries::from_sparse(2, [(1, cint(1, 0)), (2, cint(1, 0))]).unwrap();
        let l = bohr_lift_t(&f, -1.0).unwrap();
        assert_eq!(l.get(&MultiIndex::one()), Some(&Complex64::new(1.0, 0.0)));
        let c = l.get(&mi(&[1])).unwrap();
        assert!((c.re - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn tau_examples() {
        let f: BohrSeries<f64> = BohrSeries::from_terms([(mi(&[1]), Complex64::new(1.0, 0.0))]);
        assert_eq!(apply_tau(&f, &Tau::Ones).unwrap(), f);
        let g = apply_tau(&f, &Tau::star()).unwrap();
        let c = g.get(&mi(&[1])).unwrap();
        assert!((c.re - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(Tau::<f64>::radii(vec![1.5]).is_err());
    }

    #[test]
    fn tau_star_squared_divides_by_n() {
        let f: TruncatedSeries<Exact> = TruncatedSeries::from_sparse(
            12,
            (1..=12).map(|n| (n, cint(n as i64 % 5 - 2, 1))),
        )
        .unwrap();
        let lifted = apply_tau(&bohr_lift(&f).unwrap(), &Tau::star().squared()).unwrap();
        for (n, a) in f.support() {
            let want = a.clone() * real(Exact::from_ratio(1, n as i64));
            assert_eq!(lifted.get(&factorize(n as u64).unwrap()), Some(&want));
        }
        // exact mode cannot represent 1/sqrt(p)
        assert!(apply_tau(&bohr_lift(&f).unwrap(), &Tau::star()).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let c = Complex64::new(0.3, -0.2);
        let f: BohrSeries<f64> = BohrSeries::from_terms([(MultiIndex::one(), c)]);
        assert_eq!(evaluate(&f, &TorusPoint::from_angles(&[])).unwrap(), c);

        let w = Complex64::from_polar(1.0, 0.7);
        let f: BohrSeries<f64> = BohrSeries::from_terms([(mi(&[1]), Complex64::new(1.0, 0.0))]);
        let v = evaluate(&f, &TorusPoint::new(vec![w]).unwrap()).unwrap();
        assert!((v - w).norm() < 1e-15);

        let f: BohrSeries<f64> = BohrSeries::from_terms([
            (MultiIndex::one(), Complex64::new(1.0, 0.0)),
            (mi(&[1]), Complex64::new(0.5, 0.0)),
        ]);
        let v = evaluate(&f, &TorusPoint::from_angles(&[std::f64::consts::PI])).unwrap();
        assert!((v - Complex64::new(0.5, 0.0)).norm() < 1e-15);

        let f: BohrSeries<f64> = BohrSeries::from_terms([(mi(&[0, 1]), Complex64::new(1.0, 0.0))]);
        assert!(matches!(
            evaluate(&f, &TorusPoint::from_angles(&[0.0])),
            Err(Error::MissingCoordinate(_))
        ));
    }

    #[test]
    fn unimodular_monomial_samples() {
        let f: BohrSeries<f64> = BohrSeries::from_terms([(mi(&[1]), Complex64::new(1.0, 0.0))]);
        for n in [1, 10, 1000] {
            let s = sample_modulus(&f, n, 7).unwrap();
            assert!((s.min - 1.0).abs() < 1e-15 && (s.max - 1.0).abs() < 1e-15);
        }
        assert!(sample_modulus(&f, 0, 7).is_err());
    }

    #[test]
    fn sampling_is_seeded_and_policy_independent() {
        let f: BohrSeries<f64> = BohrSeries::from_terms([
            (MultiIndex::one(), Complex64::new(1.0, 0.0)),
            (mi(&[1, 1]), Complex64::new(0.5, 0.25)),
        ]);
        let a = sample_modulus_with(&f, 5000, 42, Exec::Sequential).unwrap();
        let b = sample_modulus_with(&f, 5000, 42, Exec::Parallel).unwrap();
        assert_eq!(a, b);
        let c = sample_modulus_with(&f, 5000, 43, Exec::Parallel).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn histogram_counts_everything() {
        let h = modulus_histogram(&[0.0, 0.5, 1.0, 1.0], 2);
        assert_eq!(h.iter().map(|b| b.2).sum::<usize>(), 4);
        assert_eq!(h[1].2, 3);
    }
}
