//! The operator moment problem `T z^k = lambda_k f(z^k)` on the truncated
//! span of `{z^n : n <= N K}`.

use num_complex::{Complex, Complex64};
use num_traits::Zero;
use serde::Serialize;

use crate::bohr::{bohr_lift_t, sample_moduli, summarize, ModulusSummary};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::scalar::{abs_f64, real, ser_real, ser_scalar, to_c64, Mode, Real};
use crate::series::{dilated_norm_sq, exceeds, gram_with, norm_sq, DirichletWeight, TruncatedSeries};

/// Float tolerance on `||f||_t = 1`.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct MomentProblem<R: Real> {
    pub f: TruncatedSeries<R>,
    pub t: f64,
    pub lambdas: Vec<Complex<R>>,
    pub k_cap: usize,
}

impl<R: Real> MomentProblem<R> {
    /// Checks `||f||_t = 1`: exactly in exact mode without a tail, otherwise
    /// within the tail mass or [`NORM_TOLERANCE`].
    pub fn new(f: TruncatedSeries<R>, t: f64, lambdas: Vec<Complex<R>>, k_cap: usize) -> Result<Self> {
        let n: R = norm_sq(&f, t)?;
        let tail = f.tail().map_or(0.0, |e| e.weighted_l2(t, 1));
        let ok = match (R::MODE, f.tail()) {
            (Mode::Exact, None) => n.is_one(),
            _ => (n.to_f64() - 1.0).abs() <= NORM_TOLERANCE + tail * tail,
        };
        if !ok {
            return Err(Error::NotNormalized(n.to_f64().sqrt()));
        }
        Self::unnormalized(f, t, lambdas, k_cap)
    }

    /// Skips the norm check; the operator is still well defined.
    pub fn unnormalized(
        f: TruncatedSeries<R>,
        t: f64,
        lambdas: Vec<Complex<R>>,
        k_cap: usize,
    ) -> Result<Self> {
        if k_cap == 0 {
            return Err(Error::CapTooSmall("k_cap", 1));
        }
        if lambdas.len() < k_cap {
            return Err(Error::Domain(format!(
                "{} lambdas given for k_cap {k_cap}",
                lambdas.len()
            )));
        }
        DirichletWeight::new(t)?;
        Ok(Self {
            f,
            t,
            lambdas: lambdas[..k_cap].to_vec(),
            k_cap,
        })
    }

    pub fn degree_cap(&self) -> usize {
        self.f.degree_cap()
    }
}

/// `lambda_k = |lambda_k| * phase_k`, phases defaulting to 1.
pub fn lambdas_from_moduli<R: Real>(
    moduli: &[R],
    phases: Option<&[Complex<R>]>,
) -> Result<Vec<Complex<R>>> {
    if let Some(p) = phases {
        if p.len() != moduli.len() {
            return Err(Error::Domain(format!(
                "{} phases for {} moduli",
                p.len(),
                moduli.len()
            )));
        }
    }
    Ok(moduli
        .iter()
        .enumerate()
        .map(|(i, m)| match phases {
            Some(p) => p[i].clone() * real(m.clone()),
            None => real(m.clone()),
        })
        .collect())
}

/// `((kN + k + N + 1) / (kN + 1))^{t/2}`, the modulus making
/// `T z^k = lambda_k c z^{kN}` isometric when `|c| = (N+1)^{-t/2}`.
pub fn monomial_lambda_modulus<R: Real>(k: u64, degree: u64, t: f64) -> Result<R> {
    let num = k * degree + k + degree + 1;
    let den = k * degree + 1;
    if t == 0.0 {
        return Ok(R::one());
    }
    R::pow_ratio(num, den, t / 2.0)
}

/// Matrix of the truncated `T` in the monomial basis.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct OperatorMatrix<R: Real> {
    pub t: f64,
    pub k_cap: usize,
    pub degree_cap: usize,
    /// Column `k - 1`: `(n, lambda_k a_{n/k})` for the nonzero entries.
    #[serde(serialize_with = "ser_columns")]
    pub columns: Vec<Vec<(usize, Complex<R>)>>,
    #[serde(skip)]
    f: TruncatedSeries<R>,
    #[serde(skip)]
    lambdas: Vec<Complex<R>>,
}

fn ser_columns<R: Real, S: serde::Serializer>(
    cols: &[Vec<(usize, Complex<R>)>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    #[derive(Serialize)]
    #[serde(bound = "")]
    struct Entry<'a, R: Real> {
        n: usize,
        k: usize,
        #[serde(serialize_with = "ser_scalar")]
        value: &'a Complex<R>,
    }
    let mut seq = s.serialize_seq(None)?;
    for (k, col) in cols.iter().enumerate() {
        for (n, v) in col {
            seq.serialize_element(&Entry { n: *n, k: k + 1, value: v })?;
        }
    }
    seq.end()
}

impl<R: Real> OperatorMatrix<R> {
    pub fn entry(&self, n: usize, k: usize) -> Complex<R> {
        self.columns
            .get(k.wrapping_sub(1))
            .and_then(|c| c.iter().find(|(m, _)| *m == n))
            .map_or_else(Complex::zero, |(_, v)| v.clone())
    }

    /// Rows `1..=N K`.
    pub fn rows(&self) -> usize {
        self.degree_cap * self.k_cap
    }
}

pub fn build_operator<R: Real>(p: &MomentProblem<R>) -> Result<OperatorMatrix<R>> {
    build_operator_with(p, Exec::default())
}

pub fn build_operator_with<R: Real>(p: &MomentProblem<R>, exec: Exec) -> Result<OperatorMatrix<R>> {
    p.degree_cap()
        .checked_mul(p.k_cap)
        .ok_or_else(|| Error::Overflow(format!("{} * {}", p.degree_cap(), p.k_cap)))?;
    let columns = exec.map_range(p.k_cap, |i| {
        let k = i + 1;
        let lambda = &p.lambdas[i];
        p.f.support()
            .map(|(m, a)| (m * k, lambda.clone() * a.clone()))
            .filter(|(_, v)| !v.is_zero())
            .collect::<Vec<_>>()
    });
    Ok(OperatorMatrix {
        t: p.t,
        k_cap: p.k_cap,
        degree_cap: p.degree_cap(),
        columns,
        f: p.f.clone(),
        lambdas: p.lambdas.clone(),
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct ColumnDefect<R: Real> {
    pub k: usize,
    /// `||T z^k||_t^2`.
    #[serde(serialize_with = "ser_real")]
    pub norm_sq: R,
    /// `||z^k||_t^2 = (k+1)^t`.
    #[serde(serialize_with = "ser_real")]
    pub target_sq: R,
    /// `| ||T z^k||_t - ||z^k||_t |`.
    pub defect: f64,
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct PairDefect<R: Real> {
    pub k: usize,
    pub l: usize,
    /// `<T z^k, T z^l>_t`; the sources are orthogonal.
    #[serde(serialize_with = "ser_scalar")]
    pub value: Complex<R>,
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IsometryVerdict {
    Isometric,
    NonIsometric,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct IsometryReport<R: Real> {
    pub verdict: IsometryVerdict,
    pub columns: Vec<ColumnDefect<R>>,
    pub pairs: Vec<PairDefect<R>>,
    pub resolution: f64,
}

pub fn isometry_check<R: Real>(m: &OperatorMatrix<R>) -> Result<IsometryReport<R>> {
    isometry_check_with(m, crate::criteria::DEFAULT_RESOLUTION, Exec::default())
}

pub fn isometry_check_with<R: Real>(
    m: &OperatorMatrix<R>,
    resolution: f64,
    exec: Exec,
) -> Result<IsometryReport<R>> {
    let w = DirichletWeight::new(m.t)?;
    let mut violated = false;
    let mut coarse = false;
    let mut columns = Vec::with_capacity(m.k_cap);
    for k in 1..=m.k_cap {
        let lam_sq = m.lambdas[k - 1].norm_sqr();
        let norm_sq = lam_sq.clone() * dilated_norm_sq(&m.f, m.t, k)?;
        let target_sq: R = w.norm_weight(k as u64)?;
        let lam = lam_sq.to_f64().sqrt();
        let tail = m.f.tail().map_or(0.0, |e| lam * e.weighted_l2(m.t, k as u64));
        let head = norm_sq.to_f64().max(0.0).sqrt();
        let slack = 10.0 * R::UNIT_ROUNDOFF * (m.f.support_len() + 1) as f64 * head;
        let tail_bound = tail + slack;
        let defect = (head - target_sq.to_f64().sqrt()).abs();
        let off = if tail_bound == 0.0 {
            norm_sq != target_sq
        } else {
            defect > tail_bound
        };
        violated |= off;
        coarse |= tail_bound > resolution;
        columns.push(ColumnDefect {
            k,
            norm_sq,
            target_sq,
            defect,
            tail_bound,
        });
    }

    let mut pairs = Vec::new();
    if m.k_cap >= 2 {
        let gram = gram_with(&m.f, m.t, m.k_cap, exec)?;
        for k in 1..=m.k_cap {
            for l in k + 1..=m.k_cap {
                let (lk, ll) = (&m.lambdas[k - 1], &m.lambdas[l - 1]);
                let value = gram.entry(k, l).clone() * lk.clone() * ll.conj();
                let tail_bound = gram.tail_bound(k, l) * abs_f64(lk) * abs_f64(ll);
                violated |= exceeds(&value, tail_bound);
                coarse |= tail_bound > resolution;
                pairs.push(PairDefect {
                    k,
                    l,
                    value,
                    tail_bound,
                });
            }
        }
    }
    let verdict = if violated {
        IsometryVerdict::NonIsometric
    } else if coarse {
        IsometryVerdict::Inconclusive
    } else {
        IsometryVerdict::Isometric
    };
    Ok(IsometryReport {
        verdict,
        columns,
        pairs,
        resolution,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundednessReport {
    /// Samples of `|B_t f|`.
    pub symbol: ModulusSummary,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Log-log slope of `|lambda_k|` over `k in [K/2, K]`.
    pub lambda_slope: f64,
    pub lambda_two_sided: bool,
    pub bounded_evidence: bool,
    pub invertible_evidence: bool,
    pub floor: f64,
}

/// Largest `|slope|` of `log |lambda_k|` against `log k` still read as bounded.
pub const LAMBDA_SLOPE_TOLERANCE: f64 = 0.1;

pub fn boundedness_probe<R: Real>(
    p: &MomentProblem<R>,
    n_samples: usize,
    seed: u64,
) -> Result<BoundednessReport> {
    boundedness_probe_with(p, n_samples, seed, crate::basis::DEFAULT_FLOOR, Exec::default())
}

pub fn boundedness_probe_with<R: Real>(
    p: &MomentProblem<R>,
    n_samples: usize,
    seed: u64,
    floor: f64,
    exec: Exec,
) -> Result<BoundednessReport> {
    if n_samples == 0 {
        return Err(Error::CapTooSmall("n_samples", 1));
    }
    let lift = bohr_lift_t(&p.f.to_mode::<f64>(), p.t)?;
    let moduli = sample_moduli(&lift, n_samples, seed, exec);
    let symbol = summarize(&moduli, seed, lift.tail_l1());

    let mods: Vec<f64> = p.lambdas.iter().map(abs_f64).collect();
    let lambda_min = mods.iter().copied().fold(f64::INFINITY, f64::min);
    let lambda_max = mods.iter().copied().fold(0.0, f64::max);
    let lambda_slope = loglog_slope(&mods[(p.k_cap / 2).saturating_sub(1)..], p.k_cap / 2);
    let lambda_two_sided = lambda_min > 0.0 && lambda_slope.abs() <= LAMBDA_SLOPE_TOLERANCE;
    let bounded_evidence = lambda_two_sided && (symbol.max + symbol.tail_l1).is_finite();
    let invertible_evidence = bounded_evidence && symbol.min - symbol.tail_l1 > floor;
    Ok(BoundednessReport {
        symbol,
        lambda_min,
        lambda_max,
        lambda_slope,
        lambda_two_sided,
        bounded_evidence,
        invertible_evidence,
        floor,
    })
}

/// Slope of `log v` against `log k` for `k = first.max(1) ..`.
fn loglog_slope(values: &[f64], first: usize) -> f64 {
    let pts: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.0)
        .map(|(i, v)| (((first.max(1) + i) as f64).ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Serialize)]
pub struct NormEstimate {
    pub estimate: f64,
    /// `||W* W v - s^2 v||` at the final iterate.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Power iteration cap.
pub const MAX_ITERATIONS: usize = 1000;

/// Largest singular value of the truncated `T` as a map `D_t -> D_t`.
///
/// Rows are weighted by `(n+1)^{t/2}` and columns by `(k+1)^{-t/2}`.
pub fn operator_norm_estimate<R: Real>(m: &OperatorMatrix<R>) -> NormEstimate {
    let half = m.t / 2.0;
    let cols: Vec<Vec<(usize, Complex64)>> = m
        .columns
        .iter()
        .enumerate()
        .map(|(i, col)| {
            let cw = ((i + 2) as f64).powf(-half);
            col.iter()
                .map(|(n, v)| (*n, to_c64(v) * ((*n + 1) as f64).powf(half) * cw))
                .collect()
        })
        .collect();
    let rows = m.rows();
    let apply = |v: &[Complex64]| -> Vec<Complex64> {
        let mut u = vec![Complex64::zero(); rows + 1];
        for (col, vk) in cols.iter().zip(v) {
            for (n, w) in col {
                u[*n] += w * vk;
            }
        }
        cols.iter()
            .map(|col| col.iter().map(|(n, w)| w.conj() * u[*n]).sum())
            .collect()
    };
    let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    let k = cols.len();
    let mut v = vec![Complex64::new(1.0 / (k as f64).sqrt(), 0.0); k];
    let mut w = apply(&v);
    if norm(&w) == 0.0 && k > 0 {
        v = vec![Complex64::zero(); k];
        v[0] = Complex64::new(1.0, 0.0);
        w = apply(&v);
    }
    let mut sigma_sq = 0.0;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let nw = norm(&w);
        if nw == 0.0 {
            converged = true;
            break;
        }
        let next: Vec<Complex64> = w.iter().map(|z| z / nw).collect();
        let prev = sigma_sq;
        sigma_sq = nw;
        v = next;
        w = apply(&v);
        if (sigma_sq - prev).abs() <= 1e-15 * sigma_sq {
            converged = true;
            break;
        }
    }
    let rq: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
    let residual = norm(
        &w.iter()
            .zip(&v)
            .map(|(b, a)| b - a * rq)
            .collect::<Vec<_>>(),
    );
    NormEstimate {
        estimate: rq.max(0.0).sqrt(),
        residual,
        iterations,
        converged,
    }
}
