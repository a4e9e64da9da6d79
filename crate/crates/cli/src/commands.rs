use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use dilation_core::basis::{
    frame_bounds_with, norm_profile, omega_solve_with, riesz_probe_with, threshold_prime,
    FrameOptions,
};
use dilation_core::bohr::{bohr_lift_t, modulus_histogram, sample_moduli, Tau};
use dilation_core::criteria::{
    inner_test_with, monomial_diagnostic, orthogonality_test_with, tau_symmetry_test_with,
    CriteriaOptions, Verdict,
};
use dilation_core::error::Error;
use dilation_core::exec::Exec;
use dilation_core::io::{
    self, blaschke, bohr_to_json, coefficients_to_json, read_coefficients, AnySeries,
    MomentInput, RandomSpec,
};
use dilation_core::moment::{
    boundedness_probe_with, build_operator_with, isometry_check_with, operator_norm_estimate,
    IsometryVerdict, MomentProblem,
};
use dilation_core::scalar::{convert, ser_scalar, Exact, Mode, Real};
use dilation_core::series::{gram_with, TruncatedSeries};
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::json;

use crate::args::{Command, Common, GenKind};
use crate::report::{Outputs, RunManifest};

/// Run generic code on whichever mode a series has.
macro_rules! dispatch {
    ($series:expr, |$s:ident| $body:expr) => {
        match $series {
            AnySeries::Exact($s) => $body,
            AnySeries::Float($s) => $body,
        }
    };
}

fn exec(common: &Common) -> Exec {
    if common.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

fn opts(common: &Common) -> CriteriaOptions {
    CriteriaOptions {
        resolution: common.resolution,
        exec: exec(common),
    }
}

fn pad(series: AnySeries, degree_cap: Option<usize>) -> Result<AnySeries> {
    let Some(cap) = degree_cap else {
        return Ok(series);
    };
    if cap < series.degree_cap() {
        bail!(
            "--degree-cap {cap} is below the input's degree cap {}",
            series.degree_cap()
        );
    }
    Ok(match series {
        AnySeries::Exact(s) => AnySeries::Exact(s.padded(cap)?),
        AnySeries::Float(s) => AnySeries::Float(s.padded(cap)?),
    })
}

/// Read, convert and pad an input series; fills the manifest's mode and t.
fn load(
    path: &Path,
    common: &Common,
    degree_cap: Option<usize>,
    manifest: &mut RunManifest,
) -> Result<AnySeries> {
    let file = read_coefficients(path)?;
    let mut series = file.series;
    if let Some(mode) = common.mode {
        series = series.into_mode(mode);
    }
    let series = pad(series, degree_cap)?;
    manifest.inputs.push(path.display().to_string());
    manifest.mode = series.mode();
    manifest.t = common.t.or(file.t).unwrap_or(0.0);
    manifest.caps.degree_cap = Some(series.degree_cap());
    Ok(series)
}

/// Integer, decimal (`-0.125`), or `p/q`, parsed exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || anyhow!("`{s}` is not a rational number");
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q == BigInt::from(0) {
            bail!("`{s}` has a zero denominator");
        }
        return Ok(BigRational::new(p, q));
    }
    if let Ok(i) = s.parse::<BigInt>() {
        return Ok(BigRational::from_integer(i));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if !frac.is_empty() && frac.chars().all(|c| c.is_ascii_digit()) {
            let neg = int.starts_with('-');
            let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
            let mut num: BigInt = digits.parse().map_err(|_| bad())?;
            if neg {
                num = -num;
            }
            let den = num_traits::pow(BigInt::from(10), frac.len());
            return Ok(BigRational::new(num, den));
        }
    }
    let x: f64 = s.parse().map_err(|_| bad())?;
    <BigRational as num_traits::FromPrimitive>::from_f64(x).ok_or_else(bad)
}

fn parse_complex<R: Real>(re: &str, im: &str) -> Result<Complex<R>> {
    let z = Complex::new(parse_rational(re)?, parse_rational(im)?);
    Ok(convert::<Exact, R>(&z))
}

fn parse_tau<R: Real>(spec: &str) -> Result<Tau<R>> {
    match spec.trim() {
        "star" if R::MODE == Mode::Exact => {
            bail!("tau `star` has irrational radii 1/sqrt(p); use --mode float or rational radii")
        }
        "star" => Ok(Tau::star()),
        "ones" => Ok(Tau::Ones),
        list => {
            let radii = list
                .split(',')
                .map(|r| Ok(convert::<Exact, R>(&Complex::new(parse_rational(r)?, BigRational::from_integer(0.into()))).re))
                .collect::<Result<Vec<R>>>()?;
            Ok(Tau::radii(radii)?)
        }
    }
}

fn verdict_inconclusive(v: &Verdict) -> bool {
    matches!(v, Verdict::Inconclusive(..))
}

pub fn run(command: &Command) -> Result<Outputs> {
    let common = command.common();
    let mut manifest = RunManifest::new(command.name(), &common.out, common.timestamp);
    manifest
        .tolerances
        .insert("resolution".into(), common.resolution);
    let mut out = Outputs::default();
    match command {
        Command::Gen {
            kind,
            a,
            a_im,
            m,
            n,
            c,
            c_im,
            degree_cap,
            support,
            range,
            leading,
            seed,
            name,
            ..
        } => {
            let mode = common.mode.unwrap_or(Mode::Exact);
            manifest.mode = mode;
            let series: AnySeries = match kind {
                GenKind::Blaschke => {
                    let m = m.ok_or_else(|| anyhow!("blaschke needs --m (degree cap 2^M)"))?;
                    match mode {
                        Mode::Exact => blaschke(parse_complex::<Exact>(a, a_im)?, m)?.into(),
                        Mode::Float => blaschke(parse_complex::<f64>(a, a_im)?, m)?.into(),
                    }
                }
                GenKind::Monomial => match mode {
                    Mode::Exact => io::monomial(*n, parse_complex::<Exact>(c, c_im)?)?.into(),
                    Mode::Float => io::monomial(*n, parse_complex::<f64>(c, c_im)?)?.into(),
                },
                GenKind::Random => {
                    let spec = RandomSpec {
                        degree_cap: *degree_cap,
                        support: *support,
                        seed: *seed,
                        leading: *leading,
                        range: *range,
                    };
                    match mode {
                        Mode::Exact => io::random::<Exact>(&spec)?.into(),
                        Mode::Float => io::random::<f64>(&spec)?.into(),
                    }
                }
            };
            let file = match name {
                Some(n) if Path::new(n).extension().is_some() => n.clone(),
                Some(n) => format!("{n}.json"),
                None => format!("{}.json", format!("{kind:?}").to_lowercase()),
            };
            let text = coefficients_to_json(&series, common.t)?;
            out.write_file(&manifest, &file, &(text + "\n"))?;
            out.summary = format!("wrote {} coefficients", series.degree_cap());
        }

        Command::Gram {
            input,
            k_cap,
            degree_cap,
            ..
        } => {
            let series = load(input, common, *degree_cap, &mut manifest)?;
            manifest.caps.k_cap = Some(*k_cap);
            let t = manifest.t;
            dispatch!(&series, |s| {
                let g = gram_with(s, t, *k_cap, exec(common))?;
                out.write_file(&manifest, "gram.csv", &g.to_csv())?;
                out.write_report(&manifest, "gram", &g)?;
                let v = g.off_diagonal_violations();
                out.summary = match v.first() {
                    None => "off-diagonal entries within tail bounds".into(),
                    Some((k, l)) => format!("first off-diagonal violation at ({k},{l})"),
                };
            });
        }

        Command::Ortho {
            input,
            k_cap,
            degree_cap,
            pairs_cap,
            ..
        } => {
            let series = load(input, common, *degree_cap, &mut manifest)?;
            manifest.caps.k_cap = Some(*k_cap);
            manifest.caps.pairs_cap = *pairs_cap;
            let t = manifest.t;
            let o = opts(common);
            dispatch!(&series, |s| {
                let rep = orthogonality_test_with(s, t, *k_cap, &o)?;
                let mono = if t != 0.0 {
                    Some(monomial_diagnostic(s, t, *pairs_cap, &o)?)
                } else {
                    None
                };
                #[derive(Serialize)]
                #[serde(bound = "")]
                struct Ortho<'a, R: Real> {
                    orthogonality: &'a dilation_core::criteria::ResidualReport<R>,
                    #[serde(skip_serializing_if = "Option::is_none")]
                    monomial: Option<&'a dilation_core::criteria::MonomialReport<R>>,
                }
                out.write_report(
                    &manifest,
                    "ortho",
                    &Ortho {
                        orthogonality: &rep,
                        monomial: mono.as_ref(),
                    },
                )?;
                out.inconclusive = verdict_inconclusive(&rep.verdict);
                out.summary = format!("verdict: {}", rep.verdict);
            });
        }

        Command::Inner {
            input,
            pairs_cap,
            degree_cap,
            ..
        } => {
            let series = load(input, common, *degree_cap, &mut manifest)?;
            manifest.caps.pairs_cap = Some(*pairs_cap);
            let t = manifest.t;
            let o = opts(common);
            dispatch!(&series, |s| {
                let lift = bohr_lift_t(s, t)?;
                let rep = inner_test_with(&lift, *pairs_cap, &o)?;
                out.write_report(&manifest, "bohr-lift", &json!({ "terms": bohr_to_json(&lift) }))?;
                out.write_report(&manifest, "inner", &rep)?;
                out.inconclusive = verdict_inconclusive(&rep.residuals.verdict);
                out.summary = format!(
                    "verdict: {}, c^2 = {}",
                    rep.residuals.verdict,
                    rep.c_squared.to_f64()
                );
            });
        }

        Command::TauSym {
            input,
            pairs_cap,
            tau,
            degree_cap,
            ..
        } => {
            let series = load(input, common, *degree_cap, &mut manifest)?;
            manifest.caps.pairs_cap = Some(*pairs_cap);
            manifest.parameters.insert("tau".into(), json!(tau));
            let t = manifest.t;
            let o = opts(common);
            dispatch!(&series, |s| {
                let lift = bohr_lift_t(s, t)?;
                let tau = parse_tau(tau)?;
                let rep = tau_symmetry_test_with(&lift, &tau, *pairs_cap, &o)?;
                out.write_report(&manifest, "tau-sym", &rep)?;
                out.inconclusive = verdict_inconclusive(&rep.modulus_verdict)
                    || verdict_inconclusive(&rep.product_verdict);
                out.summary = format!(
                    "identity holds: {}; modulus {}; product {}",
                    rep.all_equal, rep.modulus_verdict, rep.product_verdict
                );
            });
        }

        Command::RieszProbe {
            input,
            samples,
            seed,
            floor,
            bins,
            degree_cap,
            ..
        } => {
            let series = load(input, common, *degree_cap, &mut manifest)?;
            manifest.caps.samples = Some(*samples);
            manifest.seed = Some(*seed);
            manifest.tolerances.insert("floor".into(), *floor);
            let t = manifest.t;
            let ex = exec(common);
            dispatch!(&series, |s| {
                let v = riesz_probe_with(s, t, *samples, *seed, *floor, ex)?;
                let lift = bohr_lift_t(&s.to_mode::<f64>(), t)?;
                let moduli = sample_moduli(&lift, *samples, *seed, ex);
                let mut csv = String::from("lo,hi,count\n");
                for (lo, hi, c) in modulus_histogram(&moduli, *bins) {
                    csv.push_str(&format!("{lo},{hi},{c}\n"));
                }
                out.write_file(&manifest, "riesz-histogram.csv", &csv)?;
                out.write_report(&manifest, "riesz-probe", &v)?;
                out.summary = format!(
                    "kind: {}; min {} max {}",
                    serde_json::to_value(v.kind)?.as_str().unwrap_or("?"),
                    v.evidence.min,
                    v.evidence.max
                );
            });
        }

        Command::FrameBounds {
            input,
            k_cap,
            probes,
            ladder_prime,
            ladder_threshold,
            degree_cap,
            ..
        } => {
            let series = load(input, common, *degree_cap, &mut manifest)?;
            let probes = probes.unwrap_or(*k_cap);
            manifest.caps.k_cap = Some(*k_cap);
            manifest.caps.probes = Some(probes);
            let t = manifest.t;
            let prime = match ladder_threshold {
                None => *ladder_prime,
                Some(spec) => {
                    let (a, b) = spec
                        .split_once(',')
                        .ok_or_else(|| anyhow!("--ladder-threshold expects A,B"))?;
                    let a: f64 = a.trim().parse().context("--ladder-threshold A")?;
                    let b: f64 = b.trim().parse().context("--ladder-threshold B")?;
                    manifest
                        .parameters
                        .insert("ladder_threshold".into(), json!([a, b]));
                    threshold_prime(a, b, t)?
                }
            };
            manifest
                .parameters
                .insert("ladder_prime".into(), json!(prime));
            let fo = FrameOptions {
                ladder_prime: prime,
                exec: exec(common),
            };
            dispatch!(&series, |s| {
                let rep = frame_bounds_with(s, t, *k_cap, probes, &fo)?;
                out.write_file(&manifest, "frame-trend.csv", &rep.to_csv())?;
                out.write_report(&manifest, "frame-bounds", &rep)?;
                out.summary = format!(
                    "A_est = {} (z^{}), B_est = {} (z^{})",
                    rep.lower_estimate,
                    rep.lower_certificate,
                    rep.upper_estimate,
                    rep.upper_certificate
                );
            });
        }

        Command::OmegaSolve {
            input,
            rhs,
            k_cap,
            tolerance,
            ..
        } => {
            let f = load(input, common, None, &mut manifest)?;
            let g = read_coefficients(rhs)?.series;
            let g = match common.mode {
                Some(m) => g.into_mode(m),
                None => g,
            };
            f.check_same_mode(&g)?;
            manifest.inputs.push(rhs.display().to_string());
            manifest.caps.k_cap = Some(*k_cap);
            manifest.tolerances.insert("consistency".into(), *tolerance);

            #[derive(Serialize)]
            #[serde(bound = "")]
            struct Solution<R: Real> {
                status: &'static str,
                #[serde(serialize_with = "ser_scalars")]
                c: Vec<Complex<R>>,
                #[serde(skip_serializing_if = "Option::is_none")]
                inconsistent_degree: Option<usize>,
                #[serde(skip_serializing_if = "Option::is_none")]
                residual: Option<f64>,
            }
            match (&f, &g) {
                (AnySeries::Exact(f), AnySeries::Exact(g)) => {
                    omega_report(f, g, *k_cap, *tolerance, &manifest, &mut out)?
                }
                (AnySeries::Float(f), AnySeries::Float(g)) => {
                    omega_report(f, g, *k_cap, *tolerance, &manifest, &mut out)?
                }
                _ => unreachable!("modes checked above"),
            }

            fn omega_report<R: Real>(
                f: &TruncatedSeries<R>,
                g: &TruncatedSeries<R>,
                k_cap: usize,
                tol: f64,
                manifest: &RunManifest,
                out: &mut Outputs,
            ) -> Result<()> {
                let sol = match omega_solve_with(f, g, k_cap, tol) {
                    Ok(c) => Solution {
                        status: "solved",
                        c,
                        inconsistent_degree: None,
                        residual: None,
                    },
                    Err(Error::Inconsistent { degree, residual }) => Solution {
                        status: "inconsistent",
                        c: Vec::new(),
                        inconsistent_degree: Some(degree),
                        residual: Some(residual),
                    },
                    Err(e) => return Err(e.into()),
                };
                out.write_report(manifest, "omega-solve", &sol)?;
                out.summary = match sol.inconsistent_degree {
                    None => format!("solved for c_1..c_{k_cap}"),
                    Some(d) => format!("inconsistent at degree {d}"),
                };
                Ok(())
            }
        }

        Command::Moment {
            input,
            samples,
            seed,
            floor,
            k_cap,
            degree_cap,
            skip_norm_check,
            ..
        } => {
            let (spec, file) = MomentInput::read(input)?;
            let mut spec = spec;
            if let Some(k) = k_cap {
                spec.k_cap = *k;
            }
            if let Some(d) = degree_cap {
                spec.degree_cap = Some(*d);
            }
            if let Some(t) = common.t {
                spec.t = t;
            }
            let mut series = spec.series(&file)?;
            if let Some(m) = common.mode {
                series = series.into_mode(m);
            }
            manifest.inputs.push(input.display().to_string());
            manifest.inputs.push(spec.f.display().to_string());
            manifest.mode = series.mode();
            manifest.t = spec.t;
            manifest.caps.k_cap = Some(spec.k_cap);
            manifest.caps.degree_cap = Some(series.degree_cap());
            manifest.caps.samples = Some(*samples);
            manifest.seed = Some(*seed);
            manifest.tolerances.insert("floor".into(), *floor);
            manifest
                .parameters
                .insert("skip_norm_check".into(), json!(skip_norm_check));
            let ex = exec(common);
            let resolution = common.resolution;
            dispatch!(series, |s| {
                let lambdas = spec.lambdas(&s)?;
                let p = if *skip_norm_check {
                    MomentProblem::unnormalized(s, spec.t, lambdas, spec.k_cap)?
                } else {
                    MomentProblem::new(s, spec.t, lambdas, spec.k_cap)?
                };
                let m = build_operator_with(&p, ex)?;
                let iso = isometry_check_with(&m, resolution, ex)?;
                let bounded = boundedness_probe_with(&p, *samples, *seed, *floor, ex)?;
                let norm = operator_norm_estimate(&m);
                out.write_report(
                    &manifest,
                    "moment",
                    &json!({
                        "isometry": iso,
                        "boundedness": bounded,
                        "operator_norm": norm,
                        "operator": m,
                    }),
                )?;
                out.inconclusive = iso.verdict == IsometryVerdict::Inconclusive;
                out.summary = format!(
                    "isometry: {}; bounded evidence: {}; invertible evidence: {}; norm estimate {}",
                    serde_json::to_value(iso.verdict)?.as_str().unwrap_or("?"),
                    bounded.bounded_evidence,
                    bounded.invertible_evidence,
                    norm.estimate
                );
            });
        }

        Command::NormProfile {
            input,
            k_cap,
            degree_cap,
            ..
        } => {
            let series = load(input, common, *degree_cap, &mut manifest)?;
            manifest.caps.k_cap = Some(*k_cap);
            let t = manifest.t;
            dispatch!(&series, |s| {
                let p = norm_profile(s, t, *k_cap)?;
                out.write_file(&manifest, "norm-profile.csv", &p.to_csv())?;
                out.write_report(&manifest, "norm-profile", &p)?;
                out.summary = format!(
                    "trend: {}",
                    serde_json::to_value(p.trend)?.as_str().unwrap_or("?")
                );
            });
        }
    }
    Ok(out)
}

fn ser_scalars<R: Real, S: serde::Serializer>(
    v: &[Complex<R>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct One<'a, R: Real>(&'a Complex<R>);
    impl<R: Real> Serialize for One<'_, R> {
        fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            ser_scalar(self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&One(z))?;
    }
    seq.end()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_parse_exactly() {
        let r = |s| parse_rational(s).unwrap();
        assert_eq!(r("1/2"), BigRational::new(1.into(), 2.into()));
        assert_eq!(r("-3"), BigRational::from_integer((-3).into()));
        assert_eq!(r("0.125"), BigRational::new(1.into(), 8.into()));
        assert_eq!(r("-0.1"), BigRational::new((-1).into(), 10.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }
}
