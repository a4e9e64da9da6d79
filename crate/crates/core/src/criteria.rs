//! Exact vanishing criteria for dilation systems.
//!
//! Everything here reduces to coprime-pair residuals
//! `sum_n conj(a_{ni}) a_{nj} w(n, i, j)`: the system `{f(z^k)}` is
//! orthogonal in `H^2_0` exactly when the unweighted residuals vanish for all
//! coprime `i != j`, which in turn says the Bohr lift has constant modulus.
//! For `t != 0` the Gram off-diagonals decide orthogonality; the weighted
//! residuals `(nij)^t` and `(nij)^{t-1}` are reported as diagnostics.

use std::fmt;

use num_complex::Complex;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::bohr::{apply_tau, factorize, BohrSeries, Tau};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::scalar::{abs_f64, real, ser_real, ser_scalar, to_c64, Real};
use crate::series::{exceeds, gram_with, norm_sq, Accumulated, TruncatedSeries};

/// Default bound above which a vanishing residual is reported inconclusive.
pub const DEFAULT_RESOLUTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy)]
pub struct CriteriaOptions {
    /// All-zero verdicts require every pair's error bound to be at most this.
    pub resolution: f64,
    pub exec: Exec,
}

impl Default for CriteriaOptions {
    fn default() -> Self {
        Self {
            resolution: DEFAULT_RESOLUTION,
            exec: Exec::default(),
        }
    }
}

/// Weight `w(n, i, j)` multiplying `conj(b_{ni}) c_{nj}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum WeightLaw {
    Unweighted,
    /// `(nij)^t`
    NijPow { t: f64 },
    /// `(nij)^(t-1)`
    NijPowMinusOne { t: f64 },
    /// `(nkij + 1)^t`, the Gram entry of `f(z^{ki})`, `f(z^{kj})`.
    DilatedGram { t: f64, k: u64 },
    /// `(nij + 1/k)^t`, the Gram entry rescaled by `k^{-t}`.
    Perturbed { t: f64, k: u64 },
}

impl WeightLaw {
    pub fn tag(&self) -> String {
        match self {
            WeightLaw::Unweighted => "unweighted".into(),
            WeightLaw::NijPow { t } => format!("(nij)^{t}"),
            WeightLaw::NijPowMinusOne { t } => format!("(nij)^({t}-1)"),
            WeightLaw::DilatedGram { t, k } => format!("(n*{k}*ij+1)^{t}"),
            WeightLaw::Perturbed { t, k } => format!("(nij+1/{k})^{t}"),
        }
    }

    pub fn weight<R: Real>(&self, n: usize, i: usize, j: usize) -> Result<R> {
        let nij = (n as u64)
            .checked_mul(i as u64)
            .and_then(|x| x.checked_mul(j as u64))
            .ok_or_else(|| Error::Overflow(format!("{n}*{i}*{j}")))?;
        let shifted = |k: u64| {
            nij.checked_mul(k)
                .and_then(|x| x.checked_add(1))
                .ok_or_else(|| Error::Overflow(format!("{nij}*{k}+1")))
        };
        match *self {
            WeightLaw::Unweighted => Ok(R::one()),
            WeightLaw::NijPow { t } => pow_or_one(nij, 1, t),
            WeightLaw::NijPowMinusOne { t } => pow_or_one(nij, 1, t - 1.0),
            WeightLaw::DilatedGram { t, k } => pow_or_one(shifted(k)?, 1, t),
            WeightLaw::Perturbed { t, k } => pow_or_one(shifted(k)?, k, t),
        }
    }

    /// `(s, c)` with `w(n, i, j) <= c (ni+1)^{s/2} (nj+1)^{s/2}`, which turns
    /// Cauchy-Schwarz into a bound by `D_s` norms.
    fn envelope(&self) -> (f64, f64) {
        let exp = match *self {
            WeightLaw::Unweighted => 0.0,
            WeightLaw::NijPow { t }
            | WeightLaw::DilatedGram { t, .. }
            | WeightLaw::Perturbed { t, .. } => t,
            WeightLaw::NijPowMinusOne { t } => t - 1.0,
        };
        if exp <= 0.0 {
            return (0.0, 1.0);
        }
        let factor = match *self {
            WeightLaw::DilatedGram { k, .. } => (k as f64).powf(exp),
            _ => 1.0,
        };
        (2.0 * exp, factor)
    }
}

fn pow_or_one<R: Real>(num: u64, den: u64, exp: f64) -> Result<R> {
    if exp == 0.0 {
        Ok(R::one())
    } else {
        R::pow_ratio(num, den, exp)
    }
}

/// Ordered coprime pairs `(i, j)`, `i != j`, `i, j <= cap`, sorted by `ij`
/// then `i`.
pub fn coprime_pairs(cap: usize) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = (1..=cap)
        .flat_map(|i| (1..=cap).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && i.gcd(&j) == 1)
        .collect();
    pairs.sort_by_key(|&(i, j)| (i * j, i));
    pairs
}

/// Ordered pairs `(k, l)`, `k != l`, sorted by `kl` then `k`.
fn index_pairs(cap: usize) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = (1..=cap)
        .flat_map(|k| (1..=cap).map(move |l| (k, l)))
        .filter(|&(k, l)| k != l)
        .collect();
    pairs.sort_by_key(|&(k, l)| (k * l, k));
    pairs
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct PairResidual<R: Real> {
    pub i: usize,
    pub j: usize,
    #[serde(serialize_with = "ser_scalar")]
    pub residual: Complex<R>,
    pub tail_bound: f64,
}

/// Outcome of a residual system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    AllZero,
    /// First pair (in the fixed order) whose residual exceeds its bound.
    ViolatedAt(usize, usize),
    /// Nothing exceeds its bound, but the bound at this pair is coarser than
    /// the requested resolution.
    Inconclusive(usize, usize),
}

impl Verdict {
    pub fn is_all_zero(&self) -> bool {
        matches!(self, Verdict::AllZero)
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, Verdict::ViolatedAt(..))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::AllZero => f.write_str("all_zero"),
            Verdict::ViolatedAt(i, j) => write!(f, "violated_at({i},{j})"),
            Verdict::Inconclusive(i, j) => write!(f, "inconclusive({i},{j})"),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct ResidualReport<R: Real> {
    pub weight_law: String,
    pub resolution: f64,
    pub pairs: Vec<PairResidual<R>>,
    pub verdict: Verdict,
}

impl<R: Real> ResidualReport<R> {
    pub fn new(weight_law: String, pairs: Vec<PairResidual<R>>, resolution: f64) -> Self {
        let verdict = decide(&pairs, resolution);
        Self {
            weight_law,
            resolution,
            pairs,
            verdict,
        }
    }

    pub fn pair(&self, i: usize, j: usize) -> Option<&PairResidual<R>> {
        self.pairs.iter().find(|p| p.i == i && p.j == j)
    }
}

fn decide<R: Real>(pairs: &[PairResidual<R>], resolution: f64) -> Verdict {
    if let Some(p) = pairs.iter().find(|p| exceeds(&p.residual, p.tail_bound)) {
        return Verdict::ViolatedAt(p.i, p.j);
    }
    if let Some(p) = pairs.iter().find(|p| p.tail_bound > resolution) {
        return Verdict::Inconclusive(p.i, p.j);
    }
    Verdict::AllZero
}

fn residual_acc<R: Real>(
    b: &TruncatedSeries<R>,
    c: &TruncatedSeries<R>,
    i: usize,
    j: usize,
    law: WeightLaw,
) -> Result<Accumulated<R>> {
    let n_max = (b.degree_cap() / i).min(c.degree_cap() / j);
    let mut value = Complex::zero();
    let mut abs_sum = 0.0;
    let mut terms = 0;
    for n in 1..=n_max {
        let bi = &b.coeffs()[n * i - 1];
        let cj = &c.coeffs()[n * j - 1];
        if bi.is_zero() || cj.is_zero() {
            continue;
        }
        let w: R = law.weight(n, i, j)?;
        abs_sum += abs_f64(bi) * abs_f64(cj) * w.to_f64().abs();
        value = value + bi.conj() * cj.clone() * real(w);
        terms += 1;
    }
    Ok(Accumulated {
        value,
        abs_sum,
        terms,
    })
}

/// Truncation part of the residual error bound; zero without tails.
fn residual_truncation_bound<R: Real>(
    b: &TruncatedSeries<R>,
    c: &TruncatedSeries<R>,
    law: WeightLaw,
) -> Result<f64> {
    if b.tail().is_none() && c.tail().is_none() {
        return Ok(0.0);
    }
    let (s, factor) = law.envelope();
    let head = |f: &TruncatedSeries<R>| -> Result<f64> {
        Ok(norm_sq(f, s)?.to_f64().max(0.0).sqrt())
    };
    let tail = |f: &TruncatedSeries<R>| f.tail().map_or(0.0, |t| t.weighted_l2(s, 1));
    let (hb, hc, eb, ec) = (head(b)?, head(c)?, tail(b), tail(c));
    Ok(factor * (hb * ec + eb * hc + eb * ec))
}

/// `sum_n conj(b_{ni}) c_{nj} w(n, i, j)` over the common truncated range.
pub fn coprime_residual<R: Real>(
    b: &TruncatedSeries<R>,
    c: &TruncatedSeries<R>,
    i: usize,
    j: usize,
    law: WeightLaw,
) -> Result<Complex<R>> {
    if i == 0 || j == 0 || i.gcd(&j) != 1 {
        return Err(Error::NotCoprime(i, j));
    }
    Ok(residual_acc(b, c, i, j, law)?.value)
}

/// Residual report of `f` against itself under `law` for all coprime pairs up
/// to `cap`.
pub fn residual_report<R: Real>(
    f: &TruncatedSeries<R>,
    law: WeightLaw,
    cap: usize,
    opts: &CriteriaOptions,
) -> Result<ResidualReport<R>> {
    let trunc = residual_truncation_bound(f, f, law)?;
    let pairs = coprime_pairs(cap);
    let accs = opts
        .exec
        .map_slice(&pairs, |&(i, j)| residual_acc(f, f, i, j, law));
    let pairs = pairs
        .iter()
        .zip(accs)
        .map(|(&(i, j), acc)| {
            let acc = acc?;
            Ok(PairResidual {
                i,
                j,
                tail_bound: trunc + acc.rounding_slack(),
                residual: acc.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualReport::new(law.tag(), pairs, opts.resolution))
}

/// Orthogonality of `{f(z^k)}_{k <= K}` in `D_t`.
///
/// At `t = 0` this evaluates the unweighted coprime residuals for
/// `i, j <= K`. Otherwise the Gram off-diagonals decide, listed as `(k, l)`.
pub fn orthogonality_test<R: Real>(
    f: &TruncatedSeries<R>,
    t: f64,
    k_cap: usize,
) -> Result<ResidualReport<R>> {
    orthogonality_test_with(f, t, k_cap, &CriteriaOptions::default())
}

pub fn orthogonality_test_with<R: Real>(
    f: &TruncatedSeries<R>,
    t: f64,
    k_cap: usize,
    opts: &CriteriaOptions,
) -> Result<ResidualReport<R>> {
    if k_cap < 2 {
        return Err(Error::CapTooSmall("k_cap", 2));
    }
    if t == 0.0 {
        return residual_report(f, WeightLaw::Unweighted, k_cap, opts);
    }
    let gram = gram_with(f, t, k_cap, opts.exec)?;
    let pairs = index_pairs(k_cap)
        .into_iter()
        .map(|(k, l)| PairResidual {
            i: k,
            j: l,
            residual: gram.entry(k, l).clone(),
            tail_bound: gram.tail_bound(k, l),
        })
        .collect();
    Ok(ResidualReport::new(
        format!("gram (gijr+1)^{t}"),
        pairs,
        opts.resolution,
    ))
}

/// `<zeta^{alpha(i)} X, zeta^{alpha(j)} Y> = sum_beta X[beta + alpha(j)]
/// conj(Y[beta + alpha(i)])` for coprime `i, j`.
fn bohr_pair_form<R: Real>(
    x: &BohrSeries<R>,
    y: &BohrSeries<R>,
    i: usize,
    j: usize,
) -> Result<Accumulated<R>> {
    let ai = factorize(i as u64)?;
    let aj = factorize(j as u64)?;
    let mut value = Complex::zero();
    let mut abs_sum = 0.0;
    let mut terms = 0;
    for (idx, yv) in y.terms() {
        let Some(beta) = idx.checked_sub(&ai) else {
            continue;
        };
        if let Some(xv) = x.get(&(&beta + &aj)) {
            abs_sum += abs_f64(xv) * abs_f64(yv);
            value = value + xv.clone() * yv.conj();
            terms += 1;
        }
    }
    Ok(Accumulated {
        value,
        abs_sum,
        terms,
    })
}

fn bohr_pair_report<R: Real>(
    x: &BohrSeries<R>,
    y: &BohrSeries<R>,
    cap: usize,
    opts: &CriteriaOptions,
) -> Result<ResidualReport<R>> {
    if cap < 2 {
        return Err(Error::CapTooSmall("i_cap", 2));
    }
    let head = |s: &BohrSeries<R>| s.coeff_norm_sq().to_f64().max(0.0).sqrt();
    let tail = |s: &BohrSeries<R>| s.tail().map_or(0.0, |t| t.weighted_l2(0.0, 1));
    let trunc = head(x) * tail(y) + tail(x) * head(y) + tail(x) * tail(y);
    let pairs = coprime_pairs(cap);
    let accs = opts
        .exec
        .map_slice(&pairs, |&(i, j)| bohr_pair_form(x, y, i, j));
    let pairs = pairs
        .iter()
        .zip(accs)
        .map(|(&(i, j), acc)| {
            let acc = acc?;
            Ok(PairResidual {
                i,
                j,
                tail_bound: trunc + acc.rounding_slack(),
                residual: acc.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualReport::new(
        WeightLaw::Unweighted.tag(),
        pairs,
        opts.resolution,
    ))
}

/// Constant-modulus test of a holomorphic torus series.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct InnerReport<R: Real> {
    pub residuals: ResidualReport<R>,
    /// `sum |coefficients|^2`, the square of the modulus if it is constant.
    #[serde(serialize_with = "ser_real")]
    pub c_squared: R,
    /// Bound on the discarded mass `c^2_true - c^2`.
    pub c_squared_tail: f64,
}

pub fn inner_test<R: Real>(f: &BohrSeries<R>, i_cap: usize) -> Result<InnerReport<R>> {
    inner_test_with(f, i_cap, &CriteriaOptions::default())
}

pub fn inner_test_with<R: Real>(
    f: &BohrSeries<R>,
    i_cap: usize,
    opts: &CriteriaOptions,
) -> Result<InnerReport<R>> {
    let residuals = bohr_pair_report(f, f, i_cap, opts)?;
    let tail = f.tail().map_or(0.0, |t| t.weighted_l2(0.0, 1));
    let c_squared = f.coeff_norm_sq();
    let slack = 10.0 * R::UNIT_ROUNDOFF * f.len() as f64 * c_squared.to_f64();
    Ok(InnerReport {
        residuals,
        c_squared,
        c_squared_tail: tail * tail + slack,
    })
}

/// Test of `F conj(G) = const`.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct ProductReport<R: Real> {
    pub residuals: ResidualReport<R>,
    /// `<F, G>`, the constant when the test passes.
    #[serde(serialize_with = "ser_scalar")]
    pub constant: Complex<R>,
}

pub fn product_constant_test<R: Real>(
    f: &BohrSeries<R>,
    g: &BohrSeries<R>,
    i_cap: usize,
) -> Result<ProductReport<R>> {
    product_constant_test_with(f, g, i_cap, &CriteriaOptions::default())
}

pub fn product_constant_test_with<R: Real>(
    f: &BohrSeries<R>,
    g: &BohrSeries<R>,
    i_cap: usize,
    opts: &CriteriaOptions,
) -> Result<ProductReport<R>> {
    let residuals = bohr_pair_report(f, g, i_cap, opts)?;
    let constant = bohr_pair_form(f, g, 1, 1)?.value;
    Ok(ProductReport {
        residuals,
        constant,
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct TauPair<R: Real> {
    pub i: usize,
    pub j: usize,
    /// `tau^{alpha(ij)} <zeta^{alpha(i)} F_tau, zeta^{alpha(j)} F_tau>`
    #[serde(serialize_with = "ser_scalar")]
    pub lhs: Complex<R>,
    /// `tau^{alpha(i^2)} <zeta^{alpha(i)} F_{tau^2}, zeta^{alpha(j)} F>`
    #[serde(serialize_with = "ser_scalar")]
    pub rhs: Complex<R>,
    pub equal: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct TauSymmetryReport<R: Real> {
    pub pairs: Vec<TauPair<R>>,
    pub all_equal: bool,
    /// Verdict of `|F_tau| = const`.
    pub modulus_verdict: Verdict,
    /// Verdict of `F_{tau^2} conj(F) = const`.
    pub product_verdict: Verdict,
    /// Whether the two verdicts agree on vanishing.
    pub equivalent: bool,
}

pub fn tau_symmetry_test<R: Real>(
    f: &BohrSeries<R>,
    tau: &Tau<R>,
    i_cap: usize,
) -> Result<TauSymmetryReport<R>> {
    tau_symmetry_test_with(f, tau, i_cap, &CriteriaOptions::default())
}

pub fn tau_symmetry_test_with<R: Real>(
    f: &BohrSeries<R>,
    tau: &Tau<R>,
    i_cap: usize,
    opts: &CriteriaOptions,
) -> Result<TauSymmetryReport<R>> {
    let f_tau = apply_tau(f, tau)?;
    let f_tau2 = apply_tau(f, &tau.squared())?;
    let pairs = coprime_pairs(i_cap)
        .into_iter()
        .map(|(i, j)| {
            let w_ij: R = tau.monomial_weight(&factorize((i * j) as u64)?)?;
            let w_ii: R = tau.monomial_weight(&factorize((i * i) as u64)?)?;
            let left = bohr_pair_form(&f_tau, &f_tau, i, j)?;
            let right = bohr_pair_form(&f_tau2, f, i, j)?;
            let lhs = left.value * real(w_ij);
            let rhs = right.value * real(w_ii);
            let equal = match R::MODE {
                crate::scalar::Mode::Exact => lhs == rhs,
                crate::scalar::Mode::Float => {
                    let tol = 16.0
                        * f64::EPSILON
                        * (left.terms + right.terms + 1) as f64
                        * (left.abs_sum + right.abs_sum);
                    (to_c64(&lhs) - to_c64(&rhs)).norm() <= tol
                }
            };
            Ok(TauPair {
                i,
                j,
                lhs,
                rhs,
                equal,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let modulus = product_constant_test_with(&f_tau, &f_tau, i_cap, opts)?;
    let product = product_constant_test_with(&f_tau2, f, i_cap, opts)?;
    let (mv, pv) = (modulus.residuals.verdict, product.residuals.verdict);
    Ok(TauSymmetryReport {
        all_equal: pairs.iter().all(|p| p.equal),
        pairs,
        modulus_verdict: mv,
        product_verdict: pv,
        equivalent: mv.is_all_zero() == pv.is_all_zero() && mv.is_violated() == pv.is_violated(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MonomialVerdict {
    Zero,
    Monomial { degree: usize },
    NonMonomial,
}

/// Diagnostic reproducing the weighted residual systems and the
/// eigenvector test for `T_{tau*^2}` on `F = B_t f`.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct MonomialReport<R: Real> {
    /// `max/min of {1/n : a_n != 0} - 1`.
    pub ratio_spread: f64,
    /// Residuals under `(nij)^t`.
    pub nij_t: ResidualReport<R>,
    /// Residuals under `(nij)^{t-1}`.
    pub nij_t_minus_one: ResidualReport<R>,
    /// Rayleigh quotient of `(a_n n^{t/2 - 1})` against `(a_n n^{t/2})`.
    pub eigenvalue: f64,
    /// Relative distance of `(a_n n^{t/2 - 1})` from the line through
    /// `(a_n n^{t/2})`; zero iff the latter is an eigenvector.
    pub eigen_defect: f64,
    pub verdict: MonomialVerdict,
}

pub fn monomial_diagnostic<R: Real>(
    f: &TruncatedSeries<R>,
    t: f64,
    pair_cap: Option<usize>,
    opts: &CriteriaOptions,
) -> Result<MonomialReport<R>> {
    if t == 0.0 {
        return Err(Error::ZeroT);
    }
    let support: Vec<usize> = f.support().map(|(n, _)| n).collect();
    let cap = pair_cap
        .unwrap_or_else(|| support.last().copied().unwrap_or(2))
        .max(2);
    let nij_t = residual_report(f, WeightLaw::NijPow { t }, cap, opts)?;
    let nij_t_minus_one = residual_report(f, WeightLaw::NijPowMinusOne { t }, cap, opts)?;

    let (ratio_spread, verdict) = match (support.first(), support.last()) {
        (Some(&lo), Some(&hi)) => (
            hi as f64 / lo as f64 - 1.0,
            if lo == hi {
                MonomialVerdict::Monomial { degree: lo }
            } else {
                MonomialVerdict::NonMonomial
            },
        ),
        _ => (0.0, MonomialVerdict::Zero),
    };

    let scaled: Vec<(f64, num_complex::Complex64)> = f
        .support()
        .map(|(n, a)| {
            let s = (n as f64).powf(t / 2.0);
            (n as f64, to_c64(a) * s)
        })
        .collect();
    let norm_sq: f64 = scaled.iter().map(|(_, v)| v.norm_sqr()).sum();
    let (eigenvalue, eigen_defect) = if norm_sq == 0.0 {
        (0.0, 0.0)
    } else {
        let lambda = scaled
            .iter()
            .map(|(n, v)| v.norm_sqr() / n)
            .sum::<f64>()
            / norm_sq;
        let defect: f64 = scaled
            .iter()
            .map(|(n, v)| (v / n - v * lambda).norm_sqr())
            .sum();
        (lambda, (defect / norm_sq).sqrt())
    };

    Ok(MonomialReport {
        ratio_spread,
        nij_t,
        nij_t_minus_one,
        eigenvalue,
        eigen_defect,
        verdict,
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct ProofChainRow<R: Real> {
    pub k: u64,
    /// Residual under `(nij + 1/k)^t`.
    #[serde(serialize_with = "ser_scalar")]
    pub perturbed: Complex<R>,
    /// `perturbed - limit`.
    #[serde(serialize_with = "ser_scalar")]
    pub difference: Complex<R>,
    /// `k (perturbed - limit)`.
    #[serde(serialize_with = "ser_scalar")]
    pub scaled_difference: Complex<R>,
}

/// The limit chain from Gram entries of `f(z^{ki})`, `f(z^{kj})` down to the
/// `(nij)^t` and `t (nij)^{t-1}` residuals.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct ProofChain<R: Real> {
    pub i: usize,
    pub j: usize,
    pub t: f64,
    /// Residual under `(nij)^t`, the `k -> infinity` limit.
    #[serde(serialize_with = "ser_scalar")]
    pub limit: Complex<R>,
    /// `t` times the residual under `(nij)^{t-1}`, the limit of `k * difference`.
    #[serde(serialize_with = "ser_scalar")]
    pub derivative: Complex<R>,
    pub rows: Vec<ProofChainRow<R>>,
}

impl<R: Real> ProofChain<R> {
    /// Least-squares slope of `log |difference|` against `log k`.
    pub fn difference_decay_slope(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| !r.difference.is_zero())
            .map(|r| ((r.k as f64).ln(), abs_f64(&r.difference).ln()))
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        sxy / sxx
    }
}

pub fn proof_chain<R: Real>(
    f: &TruncatedSeries<R>,
    t: f64,
    i: usize,
    j: usize,
    ks: impl IntoIterator<Item = u64>,
) -> Result<ProofChain<R>> {
    if i == 0 || j == 0 || i.gcd(&j) != 1 {
        return Err(Error::NotCoprime(i, j));
    }
    let limit = residual_acc(f, f, i, j, WeightLaw::NijPow { t })?.value;
    let derivative = residual_acc(f, f, i, j, WeightLaw::NijPowMinusOne { t })?.value
        * real(R::from_f64(t).ok_or(Error::NonFiniteExponent(t))?);
    let rows = ks
        .into_iter()
        .map(|k| {
            if k == 0 {
                return Err(Error::CapTooSmall("k", 1));
            }
            let perturbed = residual_acc(f, f, i, j, WeightLaw::Perturbed { t, k })?.value;
            let difference = perturbed.clone() - limit.clone();
            let scaled_difference = difference.clone() * real(R::from_i64(k as i64));
            Ok(ProofChainRow {
                k,
                perturbed,
                difference,
                scaled_difference,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProofChain {
        i,
        j,
        t,
        limit,
        derivative,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bohr::{bohr_lift, MultiIndex};
    use crate::scalar::{cint, gaussian, Exact};
    use crate::tail::GeometricTail;
    use num_complex::Complex64;

    fn ex(terms: &[(usize, i64)], cap: usize) -> TruncatedSeries<Exact> {
        TruncatedSeries::from_sparse(cap, terms.iter().map(|&(n, c)| (n, cint(c, 0)))).unwrap()
    }

    fn blaschke_half(m: u32) -> TruncatedSeries<f64> {
        let a = 0.5f64;
        let mut terms = vec![(1usize, Complex64::new(a, 0.0))];
        for e in 1..=m {
            terms.push((1 << e, Complex64::new(-(1.0 - a * a) * a.powi(e as i32 - 1), 0.0)));
        }
        TruncatedSeries::from_sparse(1 << m, terms)
            .unwrap()
            .with_tail(GeometricTail::new(2, m + 1, 0.75 * a.powi(m as i32), a))
            .unwrap()
    }

    #[test]
    fn pair_order_is_by_product_then_first() {
        let p = coprime_pairs(4);
        assert_eq!(&p[..4], &[(1, 2), (2, 1), (1, 3), (3, 1)]);
        assert!(p.iter().all(|&(i, j)| i.gcd(&j) == 1 && i != j));
        let pos = |x| p.iter().position(|&q| q == x).unwrap();
        assert!(pos((3, 4)) < pos((4, 3)));
        assert!(pos((1, 4)) < pos((2, 3)) || 4 < (2 * 3));
    }

    #[test]
    fn coprime_residual_examples() {
        let z2 = ex(&[(2, 1)], 2);
        assert!(coprime_residual(&z2, &z2, 2, 3, WeightLaw::Unweighted)
            .unwrap()
            .is_zero());
        let f = ex(&[(1, 1), (2, 1)], 2);
        assert_eq!(
            coprime_residual(&f, &f, 1, 2, WeightLaw::Unweighted).unwrap(),
            cint(1, 0)
        );
        assert!(matches!(
            coprime_residual(&f, &f, 2, 4, WeightLaw::Unweighted),
            Err(Error::NotCoprime(2, 4))
        ));
    }

    #[test]
    fn blaschke_residual_is_tail_scale() {
        let f = blaschke_half(10);
        let r = coprime_residual(&f, &f, 1, 2, WeightLaw::Unweighted).unwrap();
        // The infinite sum vanishes; the truncation drops the terms m >= 10 of
        // sum_m a_{2^m} a_{2^{m+1}} = 0.5625 * 0.5^{2m-1}.
        let dropped = 0.5625 * 0.5f64.powi(19) / 0.75;
        assert!((r.norm() - dropped).abs() < 1e-15, "{r} vs {dropped}");
    }

    #[test]
    fn orthogonality_examples() {
        for &t in &[-1.0, 0.0, 2.0] {
            let rep = orthogonality_test(&ex(&[(3, 2)], 3), t, 6).unwrap();
            assert_eq!(rep.verdict, Verdict::AllZero, "t = {t}");
        }
        let rep = orthogonality_test(&ex(&[(1, 1), (2, 1)], 2), -1.0, 4).unwrap();
        assert_eq!(rep.verdict, Verdict::ViolatedAt(1, 2));
        assert_eq!(rep.pair(1, 2).unwrap().residual, gaussian(1, 3, 0, 1));
        assert!(orthogonality_test(&ex(&[(1, 1)], 1), 0.0, 1).is_err());
    }

    #[test]
    fn blaschke_is_orthogonal_within_tails() {
        let f = blaschke_half(12);
        let rep = orthogonality_test(&f, 0.0, 8).unwrap();
        assert_eq!(rep.verdict, Verdict::AllZero);
        let coarse = orthogonality_test(&blaschke_half(3), 0.0, 8).unwrap();
        assert!(matches!(coarse.verdict, Verdict::Inconclusive(..)));
    }

    #[test]
    fn gram_and_residual_agree_at_t_zero() {
        let f = ex(&[(1, 2), (2, -1), (3, 1), (6, 3)], 6);
        let g = crate::series::gram(&f, 0.0, 6).unwrap();
        for (i, j) in coprime_pairs(6) {
            let r = coprime_residual(&f, &f, i, j, WeightLaw::Unweighted).unwrap();
            assert_eq!(*g.entry(i, j), r, "({i},{j})");
        }
    }

    #[test]
    fn inner_examples() {
        let mono: BohrSeries<Exact> = BohrSeries::from_terms([(MultiIndex::from_exps(&[1]), cint(1, 0))]);
        let rep = inner_test(&mono, 6).unwrap();
        assert_eq!(rep.residuals.verdict, Verdict::AllZero);
        assert_eq!(rep.c_squared, Exact::from_i64(1));

        let f: BohrSeries<Exact> = BohrSeries::from_terms([
            (MultiIndex::one(), cint(1, 0)),
            (MultiIndex::from_exps(&[1]), gaussian(1, 2, 0, 1)),
        ]);
        let rep = inner_test(&f, 6).unwrap();
        assert_eq!(rep.residuals.verdict, Verdict::ViolatedAt(1, 2));
        assert_eq!(rep.residuals.pair(1, 2).unwrap().residual, gaussian(1, 2, 0, 1));
    }

    #[test]
    fn inner_test_of_blaschke_lift() {
        let lift = bohr_lift(&blaschke_half(12)).unwrap();
        let rep = inner_test(&lift, 8).unwrap();
        assert_eq!(rep.residuals.verdict, Verdict::AllZero);
        assert!((rep.c_squared - 1.0).abs() <= rep.c_squared_tail);
    }

    #[test]
    fn product_examples() {
        let z1 = MultiIndex::from_exps(&[1]);
        let f: BohrSeries<Exact> = BohrSeries::from_terms([(z1.clone(), cint(1, 0))]);
        let rep = product_constant_test(&f, &f, 6).unwrap();
        assert_eq!(rep.residuals.verdict, Verdict::AllZero);
        assert_eq!(rep.constant, cint(1, 0));

        let one: BohrSeries<Exact> = BohrSeries::from_terms([(MultiIndex::one(), cint(1, 0))]);
        let rep = product_constant_test(&one, &one, 6).unwrap();
        assert_eq!(rep.residuals.verdict, Verdict::AllZero);
        assert_eq!(rep.constant, cint(1, 0));

        let f: BohrSeries<Exact> =
            BohrSeries::from_terms([(MultiIndex::one(), cint(1, 0)), (z1, cint(1, 0))]);
        let rep = product_constant_test(&f, &one, 6).unwrap();
        assert_eq!(rep.residuals.verdict, Verdict::ViolatedAt(1, 2));
    }

    #[test]
    fn tau_symmetry_examples() {
        let mono: BohrSeries<f64> =
            BohrSeries::from_terms([(MultiIndex::from_exps(&[0, 1]), Complex64::new(1.0, 0.0))]);
        let rep = tau_symmetry_test(&mono, &Tau::star(), 6).unwrap();
        assert!(rep.all_equal && rep.equivalent);

        let f = ex(&[(1, 1), (2, 1)], 2).to_mode::<f64>();
        let lift = bohr_lift(&f).unwrap();
        let rep = tau_symmetry_test(&lift, &Tau::star(), 6).unwrap();
        assert!(rep.all_equal);
        assert!(rep.equivalent);
        assert!(rep.modulus_verdict.is_violated());

        let rep = tau_symmetry_test(&lift, &Tau::Ones, 6).unwrap();
        let inner = inner_test(&lift, 6).unwrap();
        assert_eq!(rep.modulus_verdict, inner.residuals.verdict);
    }

    #[test]
    fn tau_symmetry_is_exact_for_rational_radii() {
        let f = ex(&[(1, 3), (2, -1), (3, 2), (4, 1), (6, -2), (12, 5)], 12);
        let lift = bohr_lift(&f).unwrap();
        let tau = Tau::radii(vec![Exact::from_ratio(1, 2), Exact::from_ratio(2, 3)]).unwrap();
        let rep = tau_symmetry_test(&lift, &tau, 6).unwrap();
        assert!(rep.all_equal);
        assert!(rep.pairs.iter().any(|p| !p.lhs.is_zero()));
    }

    #[test]
    fn monomial_diagnostic_examples() {
        let opts = CriteriaOptions::default();
        let rep = monomial_diagnostic(&ex(&[(5, 3)], 5), -1.0, None, &opts).unwrap();
        assert_eq!(rep.ratio_spread, 0.0);
        assert_eq!(rep.verdict, MonomialVerdict::Monomial { degree: 5 });
        assert!(rep.nij_t.verdict.is_all_zero() && rep.nij_t_minus_one.verdict.is_all_zero());
        assert!(rep.eigen_defect < 1e-15);

        let f = ex(&[(1, 1), (2, 1)], 2);
        let rep = monomial_diagnostic(&f, -1.0, None, &opts).unwrap();
        assert_eq!(rep.nij_t.pair(1, 2).unwrap().residual, gaussian(1, 2, 0, 1));
        assert_eq!(rep.verdict, MonomialVerdict::NonMonomial);
        assert_eq!(rep.ratio_spread, 1.0);
        assert!(rep.eigen_defect > 0.1);

        let rep = monomial_diagnostic(&f, 1.0, None, &opts).unwrap();
        assert_eq!(rep.nij_t.pair(1, 2).unwrap().residual, cint(2, 0));
        assert!(matches!(
            monomial_diagnostic(&f, 0.0, None, &opts),
            Err(Error::ZeroT)
        ));
    }

    #[test]
    fn proof_chain_is_exact() {
        let f = ex(&[(1, 1), (2, 1)], 2);
        let chain = proof_chain(&f, -1.0, 1, 2, 1..=4).unwrap();
        assert_eq!(chain.limit, gaussian(1, 2, 0, 1));
        assert_eq!(chain.derivative, gaussian(-1, 4, 0, 1));
        // k = 1: 1/(2 + 1) - 1/2
        assert_eq!(chain.rows[0].difference, gaussian(-1, 6, 0, 1));
        // k = 4: 4 (4/9 - 1/2)
        assert_eq!(chain.rows[3].scaled_difference, gaussian(-2, 9, 0, 1));
    }

    #[test]
    fn verdict_strings() {
        assert_eq!(Verdict::AllZero.to_string(), "all_zero");
        assert_eq!(Verdict::ViolatedAt(1, 2).to_string(), "violated_at(1,2)");
        assert_eq!(
            serde_json::to_string(&Verdict::Inconclusive(2, 3)).unwrap(),
            "\"inconclusive(2,3)\""
        );
    }
}
