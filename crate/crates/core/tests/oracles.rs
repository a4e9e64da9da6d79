//! Independent oracles for derived example values.
//!
//! Every value here is recomputed from first principles with plain
//! `BigRational` arithmetic or closed forms, without the library's Gram,
//! residual, or lift code paths.

use std::collections::BTreeMap;

use dilation_core::basis::{frame_bounds, norm_profile};
use dilation_core::bohr::{factorize, index_to_int};
use dilation_core::criteria::{coprime_residual, proof_chain, WeightLaw};
use dilation_core::io::blaschke;
use dilation_core::scalar::{cint, gaussian, Exact, Real};
use dilation_core::series::{gram, TruncatedSeries};
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

type Q = BigRational;
type C = Complex<Q>;

fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn weight(n: u64, t: i32) -> Q {
    Pow::pow(&Q::from_integer(BigInt::from(n + 1)), t)
}

/// `f(z^k)` as an explicit index map.
fn expand(f: &[(u64, C)], k: u64) -> BTreeMap<u64, C> {
    f.iter().map(|(n, c)| (n * k, c.clone())).collect()
}

fn brute_gram(f: &[(u64, C)], t: i32, k_cap: u64) -> Vec<Vec<C>> {
    (1..=k_cap)
        .map(|k| {
            let fk = expand(f, k);
            (1..=k_cap)
                .map(|l| {
                    let fl = expand(f, l);
                    let mut acc = C::zero();
                    for (n, a) in &fk {
                        if let Some(b) = fl.get(n) {
                            acc += a * b.conj() * Complex::new(weight(*n, t), Q::zero());
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn series(f: &[(u64, C)]) -> TruncatedSeries<Exact> {
    let cap = f.iter().map(|(n, _)| *n).max().unwrap() as usize;
    TruncatedSeries::from_sparse(cap, f.iter().map(|(n, c)| (*n as usize, c.clone()))).unwrap()
}

#[test]
fn gram_matches_expansion_oracle() {
    let fixtures: Vec<Vec<(u64, C)>> = vec![
        vec![(1, cint(1, 0)), (2, cint(1, 0))],
        vec![(2, gaussian(1, 2, 1, 3)), (3, cint(-1, 0)), (6, cint(0, 2))],
        vec![(1, cint(3, 0)), (4, gaussian(-1, 5, 0, 1)), (9, cint(1, 1)), (12, cint(2, -1))],
    ];
    for f in &fixtures {
        for t in [-2, -1, 0, 1, 2] {
            let g = gram(&series(f), t as f64, 6).unwrap();
            let o = brute_gram(f, t, 6);
            for k in 1..=6 {
                for l in 1..=6 {
                    assert_eq!(*g.entry(k, l), o[k - 1][l - 1], "t={t} ({k},{l})");
                }
            }
        }
    }
}

#[test]
fn gram_of_z_plus_z2_at_bergman_weight() {
    // <f, f(z^2)>_{-1}: the only shared index is 2, weight 1/3.
    let g = gram(&series(&[(1, cint(1, 0)), (2, cint(1, 0))]), -1.0, 2).unwrap();
    assert_eq!(*g.entry(1, 2), Complex::new(q(1, 3), Q::zero()));
    assert_eq!(*g.entry(1, 1), Complex::new(q(1, 2) + q(1, 3), Q::zero()));
}

fn trial_division(mut n: u64) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    let mut d = 2;
    while d * d <= n {
        while n.is_multiple_of(d) {
            *out.entry(d).or_insert(0) += 1;
            n /= d;
        }
        d += 1;
    }
    if n > 1 {
        *out.entry(n).or_insert(0) += 1;
    }
    out
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

#[test]
fn factorization_matches_trial_division() {
    let primes: Vec<u64> = (2..2000).filter(|&n| is_prime(n)).collect();
    for n in (1..3000u64).chain([1_000_000, 999_983, 720_720, 2 * 999_983]) {
        let idx = factorize(n).unwrap();
        let oracle = trial_division(n);
        for (m, e) in idx.iter() {
            if e > 0 {
                let p = match primes.get(m) {
                    Some(p) => *p,
                    None => *oracle.keys().last().unwrap(),
                };
                assert_eq!(oracle.get(&p), Some(&e), "n = {n}");
            }
        }
        assert_eq!(idx.iter().filter(|(_, e)| *e > 0).count(), oracle.len(), "n = {n}");
        assert_eq!(index_to_int(&idx).unwrap(), n);
    }
}

#[test]
fn blaschke_coefficients_match_formula() {
    // a = 1/2: a_1 = 1/2, a_{2^m} = -(3/4)(1/2)^{m-1}.
    let s = blaschke(gaussian(1, 2, 0, 1), 6).unwrap();
    assert_eq!(s.coeff(1), gaussian(1, 2, 0, 1));
    for m in 1..=6u32 {
        let want = -q(3, 4) * Pow::pow(&q(1, 2), (m - 1) as i32);
        assert_eq!(s.coeff(1 << m), Complex::new(want, Q::zero()), "m = {m}");
    }
    assert_eq!(s.support_len(), 7);
    // a = 0 gives -z^2.
    let s = blaschke(gaussian(0, 1, 0, 1), 4).unwrap();
    assert_eq!(s.support().map(|(n, c)| (n, c.clone())).collect::<Vec<_>>(), vec![(2, cint(-1, 0))]);
}

#[test]
fn blaschke_residual_vanishes_in_the_limit() {
    // sum_n conj(a_n) a_{2n} over the full series telescopes to zero:
    // a_1 a_2 + sum_m a_{2^m} a_{2^{m+1}} = -3/8 + (9/16) sum_m 4^{-m} 2 = 0.
    // The truncation at 2^M leaves exactly the tail sum from m = M.
    for m in 3..=10u32 {
        let s = blaschke(gaussian(1, 2, 0, 1), m).unwrap();
        let r = coprime_residual(&s, &s, 1, 2, WeightLaw::Unweighted).unwrap();
        // sum_{j >= M} (9/16) 2^{1-2j} = (9/16) 2^{1-2M} (4/3) = (3/2) 4^{-M}
        let missing = q(3, 2) * Pow::pow(&q(1, 4), m as i32);
        assert_eq!(r, Complex::new(-missing, Q::zero()), "M = {m}");
    }
}

#[test]
fn norm_profile_direct_weight_sums() {
    // f = z + z^2, t = -1: ||f(z^k)||^2 = 1/(k+1) + 1/(2k+1).
    let p = norm_profile(&series(&[(1, cint(1, 0)), (2, cint(1, 0))]), -1.0, 6).unwrap();
    for k in 1..=6i64 {
        assert_eq!(p.norms_sq[k as usize - 1], q(1, k + 1) + q(1, 2 * k + 1));
    }
}

#[test]
fn frame_ratios_are_single_overlap_terms() {
    // f = z: <z^n, z^n>_t^2 / ||z^n||_t^2 = (n+1)^t.
    let z = series(&[(1, cint(1, 0))]);
    for t in [-2i32, -1, 1, 2] {
        let r = frame_bounds(&z, t as f64, 32, 32).unwrap();
        for p in &r.trend {
            assert_eq!(p.ratio, weight(p.n as u64, t));
        }
    }
}

#[test]
fn proof_chain_closed_form() {
    // f = z + z^2, t = -1, (i, j) = (1, 2): the only term is n = 1.
    // perturbed(k) = (2 + 1/k)^{-1} = k / (2k + 1), limit 1/2,
    // difference = -1 / (2(2k+1)), derivative target -1/4.
    let f = series(&[(1, cint(1, 0)), (2, cint(1, 0))]);
    let chain = proof_chain(&f, -1.0, 1, 2, 1..=32).unwrap();
    assert_eq!(chain.limit, Complex::new(q(1, 2), Q::zero()));
    assert_eq!(chain.derivative, Complex::new(q(-1, 4), Q::zero()));
    for row in &chain.rows {
        let k = row.k as i64;
        assert_eq!(row.perturbed, Complex::new(q(k, 2 * k + 1), Q::zero()));
        assert_eq!(row.difference, Complex::new(q(-1, 2 * (2 * k + 1)), Q::zero()));
    }
}

#[test]
fn monomial_lambda_identity() {
    // (kN + k + N + 1) = (k + 1)(N + 1), so the lambda law gives
    // |lambda_k|^2 |c|^2 (kN+1)^t = (k+1)^t.
    for k in 1..=200i64 {
        for n in 1..=50i64 {
            assert_eq!(k * n + k + n + 1, (k + 1) * (n + 1));
        }
    }
    for t in [-2i32, 2] {
        for n in 1..=3u64 {
            for k in 1..=10u64 {
                let lam: Q = dilation_core::moment::monomial_lambda_modulus(k, n, t as f64).unwrap();
                let c_sq = Pow::pow(&Q::from_integer(BigInt::from(n + 1)), -t);
                let lhs = lam.clone() * lam * c_sq * weight(k * n, t);
                assert_eq!(lhs, weight(k, t), "k={k} N={n} t={t}");
            }
        }
    }
}

#[test]
fn circle_extremes_of_one_plus_half_w() {
    // |1 + 0.5 w| on |w| = 1 ranges over [0.5, 1.5]; a fine grid of angles
    // approaches both ends.
    let vals: Vec<f64> = (0..100_000)
        .map(|i| {
            let th = std::f64::consts::TAU * i as f64 / 100_000.0;
            (Complex::new(1.0, 0.0) + Complex::from_polar(0.5, th)).norm()
        })
        .collect();
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(0.0, f64::max);
    assert!((lo - 0.5).abs() < 1e-9 && (hi - 1.5).abs() < 1e-9);
    let probe = dilation_core::basis::riesz_probe(
        &TruncatedSeries::<f64>::from_sparse(2, [(1, cint(1, 0)), (2, Complex::new(0.5, 0.0))]).unwrap(),
        0.0,
        50_000,
        11,
    )
    .unwrap();
    assert!(probe.evidence.min >= lo - 1e-12 && probe.evidence.max <= hi + 1e-12);
}

#[test]
fn exact_pow_agrees_with_oracle_weight() {
    for n in 1..50u64 {
        for t in -3..=3 {
            let w: Exact = Exact::pow_ratio(n + 1, 1, t as f64).unwrap();
            assert_eq!(w, weight(n, t));
        }
    }
    assert!(weight(0, 0).is_one());
}
