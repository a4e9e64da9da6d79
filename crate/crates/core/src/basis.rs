//! Basis and frame diagnostics for dilation systems.

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::bohr::{bohr_lift_t, sample_moduli, summarize, ModulusSummary};
use crate::criteria::{orthogonality_test_with, CriteriaOptions, Verdict};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::primes;
use crate::scalar::{abs_f64, real, ser_real, ser_scalar, Mode, Real};
use crate::series::{dilated_norm_sq, norm_sq, DirichletWeight, TruncatedSeries};

/// Default lower-evidence floor for Riesz/unconditional verdicts.
pub const DEFAULT_FLOOR: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    Riesz,
    Unconditional,
    Frame,
    Parseval,
    None,
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisVerdict {
    pub kind: BasisKind,
    pub t: f64,
    pub evidence: ModulusSummary,
    /// `min - tail_l1`, a lower bound for `|B_t f|` at the sampled points.
    pub lower_evidence: f64,
    /// `max + tail_l1`.
    pub upper_evidence: f64,
    pub floor: f64,
    pub scope: &'static str,
}

/// Sampled symbol test for unconditional (and, at `t = 0`, Riesz) bases.
///
/// Issues `riesz` only at `t = 0`; elsewhere the positive channel is
/// `unconditional`, since non-constant norms exclude Riesz bases.
pub fn riesz_probe<R: Real>(
    f: &TruncatedSeries<R>,
    t: f64,
    n_samples: usize,
    seed: u64,
) -> Result<BasisVerdict> {
    riesz_probe_with(f, t, n_samples, seed, DEFAULT_FLOOR, Exec::default())
}

pub fn riesz_probe_with<R: Real>(
    f: &TruncatedSeries<R>,
    t: f64,
    n_samples: usize,
    seed: u64,
    floor: f64,
    exec: Exec,
) -> Result<BasisVerdict> {
    if n_samples == 0 {
        return Err(Error::CapTooSmall("n_samples", 1));
    }
    let lift = bohr_lift_t(&f.to_mode::<f64>(), t)?;
    let moduli = sample_moduli(&lift, n_samples, seed, exec);
    let evidence = summarize(&moduli, seed, lift.tail_l1());
    let lower = evidence.min - evidence.tail_l1;
    let upper = evidence.max + evidence.tail_l1;
    let kind = if lower > floor && upper.is_finite() {
        if t == 0.0 {
            BasisKind::Riesz
        } else {
            BasisKind::Unconditional
        }
    } else {
        BasisKind::None
    };
    Ok(BasisVerdict {
        kind,
        t,
        evidence,
        lower_evidence: lower,
        upper_evidence: upper,
        floor,
        scope: "sampled points of the symbol; not a certificate of invertibility of the full symbol",
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Constant,
    Increasing,
    Decreasing,
    Mixed,
}

fn trend_of<R: Real>(values: &[R]) -> Trend {
    let mut up = false;
    let mut down = false;
    for w in values.windows(2) {
        if w[1] > w[0] {
            up = true;
        } else if w[1] < w[0] {
            down = true;
        }
    }
    match (up, down) {
        (false, false) => Trend::Constant,
        (true, false) => Trend::Increasing,
        (false, true) => Trend::Decreasing,
        (true, true) => Trend::Mixed,
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct NormProfile<R: Real> {
    pub t: f64,
    /// `||f(z^k)||_t^2` for `k = 1..K`.
    #[serde(serialize_with = "ser_reals")]
    pub norms_sq: Vec<R>,
    pub norms: Vec<f64>,
    pub trend: Trend,
}

fn ser_reals<R: Real, S: serde::Serializer>(
    v: &[R],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct One<'a, R: Real>(&'a R);
    impl<R: Real> Serialize for One<'_, R> {
        fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            ser_real(self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for r in v {
        seq.serialize_element(&One(r))?;
    }
    seq.end()
}

impl<R: Real> NormProfile<R> {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,norm_sq,norm\n");
        for (k, (sq, n)) in self.norms_sq.iter().zip(&self.norms).enumerate() {
            out.push_str(&format!("{},{},{}\n", k + 1, sq, n));
        }
        out
    }
}

pub fn norm_profile<R: Real>(
    f: &TruncatedSeries<R>,
    t: f64,
    k_cap: usize,
) -> Result<NormProfile<R>> {
    if k_cap == 0 {
        return Err(Error::CapTooSmall("k_cap", 1));
    }
    let norms_sq = (1..=k_cap)
        .map(|k| dilated_norm_sq(f, t, k))
        .collect::<Result<Vec<R>>>()?;
    let norms = norms_sq.iter().map(|r| r.to_f64().max(0.0).sqrt()).collect();
    Ok(NormProfile {
        t,
        trend: trend_of(&norms_sq),
        norms_sq,
        norms,
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct ProbeRatio<R: Real> {
    /// Probe `h = z^n`.
    pub n: usize,
    /// `sum_k |<h, f(z^k)>_t|^2 / ||h||_t^2`.
    #[serde(serialize_with = "ser_real")]
    pub ratio: R,
}

#[derive(Debug, Clone, Copy)]
pub struct FrameOptions {
    /// Prime for the `z^{p^m}` probe ladder.
    pub ladder_prime: u64,
    pub exec: Exec,
}

impl Default for FrameOptions {
    fn default() -> Self {
        Self {
            ladder_prime: 2,
            exec: Exec::default(),
        }
    }
}

/// Smallest prime `p > (A / 2B)^{1/t}`.
pub fn threshold_prime(a: f64, b: f64, t: f64) -> Result<u64> {
    if t == 0.0 {
        return Err(Error::ZeroT);
    }
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!("frame bounds must be positive, got {a}, {b}")));
    }
    primes::next_prime_above((a / (2.0 * b)).powf(1.0 / t))
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct FrameReport<R: Real> {
    pub probe_family: String,
    pub t: f64,
    pub k_cap: usize,
    pub degree_cap: usize,
    /// Largest probe degree actually used.
    pub probe_cap: usize,
    #[serde(serialize_with = "ser_real")]
    pub lower_estimate: R,
    /// Probe attaining the lower estimate.
    pub lower_certificate: usize,
    #[serde(serialize_with = "ser_real")]
    pub upper_estimate: R,
    pub upper_certificate: usize,
    /// Ratio at every probe `z^n`, `n <= probe_cap`.
    pub trend: Vec<ProbeRatio<R>>,
    pub ladder_prime: u64,
    /// Ratio along `z^{p^m}`.
    pub ladder: Vec<ProbeRatio<R>>,
}

impl<R: Real> FrameReport<R> {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,ratio,ratio_f64\n");
        for p in &self.trend {
            out.push_str(&format!("{},{},{}\n", p.n, p.ratio, p.ratio.to_f64()));
        }
        out
    }
}

/// `sum_{k | n, k <= K} |a_{n/k}|^2 (n+1)^t`.
fn bessel_ratio<R: Real>(f: &TruncatedSeries<R>, w: DirichletWeight, k_cap: usize, n: usize) -> Result<R> {
    let mut acc = R::zero();
    for k in 1..=k_cap.min(n) {
        if n.is_multiple_of(k) {
            if let Some(a) = f.get(n / k) {
                acc = acc + a.norm_sqr();
            }
        }
    }
    if acc.is_zero() {
        return Ok(acc);
    }
    Ok(acc * w.norm_weight::<R>(n as u64)?)
}

/// Bessel ratios of the truncated system `{f(z^k)}_{k <= K}` on monomial
/// probes.
///
/// Probes run over `z^n` with `n <= min(P, K)` (and `n <= N` when `f` has a
/// tail), where the truncated sum equals the full one, plus the ladder
/// `z^{p^m}` inside the same range.
pub fn frame_bounds<R: Real>(
    f: &TruncatedSeries<R>,
    t: f64,
    k_cap: usize,
    probe_cap: usize,
) -> Result<FrameReport<R>> {
    frame_bounds_with(f, t, k_cap, probe_cap, &FrameOptions::default())
}

pub fn frame_bounds_with<R: Real>(
    f: &TruncatedSeries<R>,
    t: f64,
    k_cap: usize,
    probe_cap: usize,
    opts: &FrameOptions,
) -> Result<FrameReport<R>> {
    if k_cap == 0 {
        return Err(Error::CapTooSmall("k_cap", 1));
    }
    if probe_cap == 0 {
        return Err(Error::CapTooSmall("probe_cap", 1));
    }
    if !primes::is_prime(opts.ladder_prime)? {
        return Err(Error::Domain(format!("ladder base {} is not prime", opts.ladder_prime)));
    }
    let w = DirichletWeight::new(t)?;
    let mut cap = probe_cap.min(k_cap);
    if f.tail().is_some() {
        cap = cap.min(f.degree_cap());
    }
    let ratios = opts.exec.map_range(cap, |i| bessel_ratio(f, w, k_cap, i + 1));
    let trend = ratios
        .into_iter()
        .enumerate()
        .map(|(i, r)| Ok(ProbeRatio { n: i + 1, ratio: r? }))
        .collect::<Result<Vec<_>>>()?;
    let mut ladder = Vec::new();
    let mut q = opts.ladder_prime as usize;
    while q <= cap {
        ladder.push(trend[q - 1].clone());
        q = match q.checked_mul(opts.ladder_prime as usize) {
            Some(v) => v,
            None => break,
        };
    }
    let mut lo = &trend[0];
    let mut hi = &trend[0];
    for p in &trend[1..] {
        if p.ratio < lo.ratio {
            lo = p;
        }
        if p.ratio > hi.ratio {
            hi = p;
        }
    }
    Ok(FrameReport {
        probe_family: format!(
            "monomials z^n, n <= {cap}; ladder z^({}^m) within the same range",
            opts.ladder_prime
        ),
        t,
        k_cap,
        degree_cap: f.degree_cap(),
        probe_cap: cap,
        lower_estimate: lo.ratio.clone(),
        lower_certificate: lo.n,
        upper_estimate: hi.ratio.clone(),
        upper_certificate: hi.n,
        trend,
        ladder_prime: opts.ladder_prime,
        ladder,
    })
}

/// `sum_k c_k f(z^k)` with degree cap `N * K`.
pub fn synthesize<R: Real>(f: &TruncatedSeries<R>, c: &[Complex<R>]) -> Result<TruncatedSeries<R>> {
    let cap = f
        .degree_cap()
        .checked_mul(c.len().max(1))
        .ok_or_else(|| Error::Overflow(format!("{} * {}", f.degree_cap(), c.len())))?;
    let mut coeffs = vec![Complex::<R>::zero(); cap];
    for (k, ck) in c.iter().enumerate() {
        if ck.is_zero() {
            continue;
        }
        for (n, a) in f.support() {
            let idx = n * (k + 1) - 1;
            coeffs[idx] = coeffs[idx].clone() + ck.clone() * a.clone();
        }
    }
    TruncatedSeries::new(coeffs)
}

/// Solve `sum_{k | n} c_k a_{n/k} = g_n` for `n = 1..K` by forward
/// substitution, then check the remaining known coefficients of `g`.
pub fn omega_solve<R: Real>(
    f: &TruncatedSeries<R>,
    g: &TruncatedSeries<R>,
    k_cap: usize,
) -> Result<Vec<Complex<R>>> {
    omega_solve_with(f, g, k_cap, 1e-9)
}

/// As [`omega_solve`] with a relative consistency tolerance for float mode.
pub fn omega_solve_with<R: Real>(
    f: &TruncatedSeries<R>,
    g: &TruncatedSeries<R>,
    k_cap: usize,
    tol: f64,
) -> Result<Vec<Complex<R>>> {
    let a1 = f.coeff(1);
    if a1.is_zero() {
        return Err(Error::LeadingCoefficientZero);
    }
    let coef = |m: usize| f.get(m).cloned().unwrap_or_else(Complex::zero);
    let mut c: Vec<Complex<R>> = Vec::with_capacity(k_cap);
    for n in 1..=k_cap {
        let mut rhs = g.get(n).cloned().unwrap_or_else(Complex::zero);
        for k in 1..n {
            if n % k == 0 {
                rhs = rhs - c[k - 1].clone() * coef(n / k);
            }
        }
        c.push(rhs / a1.clone());
    }

    let scale = g.support().map(|(_, v)| abs_f64(v)).fold(0.0, f64::max) + 1.0;
    for n in k_cap + 1..=g.degree_cap() {
        let mut r = g.coeff(n);
        for k in 1..=k_cap.min(n) {
            if n % k == 0 {
                r = r - c[k - 1].clone() * coef(n / k);
            }
        }
        let bad = match R::MODE {
            Mode::Exact => !r.is_zero(),
            Mode::Float => abs_f64(&r) > tol * scale,
        };
        if bad {
            return Err(Error::Inconsistent {
                degree: n,
                residual: abs_f64(&r),
            });
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct BiorthEntry<R: Real> {
    pub k: usize,
    pub l: usize,
    #[serde(serialize_with = "ser_scalar")]
    pub value: Complex<R>,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct BiorthReport<R: Real> {
    /// Row `k - 1` holds `<f(z^k), y_l>_t` for every dual.
    pub entries: Vec<Vec<BiorthEntry<R>>>,
    pub failures: Vec<(usize, usize)>,
    pub all_ok: bool,
}

/// Kronecker pattern test `<f(z^k), y_l>_t = delta_{kl}`.
pub fn biorthogonal_check<R: Real>(
    f: &TruncatedSeries<R>,
    duals: &[TruncatedSeries<R>],
    t: f64,
    k_cap: usize,
) -> Result<BiorthReport<R>> {
    let w = DirichletWeight::new(t)?;
    let mut entries = Vec::with_capacity(k_cap);
    let mut failures = Vec::new();
    for k in 1..=k_cap {
        let mut row = Vec::with_capacity(duals.len());
        for (li, y) in duals.iter().enumerate() {
            let l = li + 1;
            let mut value = Complex::<R>::zero();
            let mut abs_sum = 0.0;
            for (n, a) in f.support() {
                if let Some(b) = y.get(n * k) {
                    if b.is_zero() {
                        continue;
                    }
                    let wt: R = w.norm_weight((n * k) as u64)?;
                    abs_sum += abs_f64(a) * abs_f64(b) * wt.to_f64();
                    value = value + a.clone() * b.conj() * real(wt);
                }
            }
            let target = if k == l { Complex::new(R::one(), R::zero()) } else { Complex::zero() };
            let ok = match R::MODE {
                Mode::Exact => value == target,
                Mode::Float => {
                    abs_f64(&(value.clone() - target)) <= 16.0 * f64::EPSILON * (abs_sum + 1.0)
                }
            };
            if !ok {
                failures.push((k, l));
            }
            row.push(BiorthEntry { k, l, value, ok });
        }
        entries.push(row);
    }
    Ok(BiorthReport {
        all_ok: failures.is_empty(),
        entries,
        failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParsevalKind {
    Parseval,
    /// Orthonormal within tails, but the probes show the system is not
    /// a Parseval frame at this truncation.
    OrthonormalOnly,
    NotParseval,
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct ParsevalReport<R: Real> {
    pub kind: ParsevalKind,
    pub bessel: FrameReport<R>,
    /// Probes whose Bessel ratio differs from 1.
    pub bessel_failures: Vec<usize>,
    pub orthogonality: Verdict,
    #[serde(serialize_with = "ser_real")]
    pub norm_sq: R,
    pub norm_sq_tail: f64,
    pub unit_norm: bool,
}

/// Parseval-frame check for `H^2_0` (`t = 0`).
pub fn parseval_check<R: Real>(
    f: &TruncatedSeries<R>,
    k_cap: usize,
    probe_cap: usize,
    opts: &CriteriaOptions,
) -> Result<ParsevalReport<R>> {
    let bessel = frame_bounds_with(
        f,
        0.0,
        k_cap,
        probe_cap,
        &FrameOptions {
            exec: opts.exec,
            ..FrameOptions::default()
        },
    )?;
    let near_one = |r: &R, tol: f64| match R::MODE {
        Mode::Exact => r.is_one(),
        Mode::Float => (r.to_f64() - 1.0).abs() <= tol,
    };
    let bessel_failures: Vec<usize> = bessel
        .trend
        .iter()
        .filter(|p| !near_one(&p.ratio, 1e-12))
        .map(|p| p.n)
        .collect();
    let orthogonality = if k_cap >= 2 {
        orthogonality_test_with(f, 0.0, k_cap, opts)?.verdict
    } else {
        Verdict::AllZero
    };
    let norm_sq: R = norm_sq(f, 0.0)?;
    let tail = f.tail().map_or(0.0, |t| t.weighted_l2(0.0, 1));
    let norm_sq_tail = tail * tail + 10.0 * R::UNIT_ROUNDOFF * f.support_len() as f64;
    let unit_norm = if norm_sq_tail == 0.0 {
        norm_sq.is_one()
    } else {
        (norm_sq.to_f64() - 1.0).abs() <= norm_sq_tail
    };
    let kind = if !(unit_norm && orthogonality.is_all_zero()) {
        ParsevalKind::NotParseval
    } else if bessel_failures.is_empty() {
        ParsevalKind::Parseval
    } else {
        ParsevalKind::OrthonormalOnly
    };
    Ok(ParsevalReport {
        kind,
        bessel,
        bessel_failures,
        orthogonality,
        norm_sq,
        norm_sq_tail,
        unit_norm,
    })
}
