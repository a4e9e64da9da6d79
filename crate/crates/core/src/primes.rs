//! Incremental prime sieve shared by factorization and the Bohr lift.
//!
//! The table grows by sieving the next segment with the primes already
//! known, doubling the limit each time. Lookups take a read lock; only growth
//! takes the write lock.

use std::sync::{OnceLock, RwLock};

use crate::error::{Error, Result};

/// Largest value the sieve will extend to.
pub const SIEVE_LIMIT: u64 = 1 << 27;

const INITIAL_LIMIT: u64 = 1 << 12;

#[derive(Debug)]
struct Sieve {
    limit: u64,
    primes: Vec<u64>,
}

impl Sieve {
    fn new() -> Self {
        let n = INITIAL_LIMIT as usize;
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if !composite[i] {
                primes.push(i as u64);
                let mut j = i * i;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        Self {
            limit: INITIAL_LIMIT,
            primes,
        }
    }

    /// Sieve `(limit, new_limit]`; requires `new_limit <= limit^2`.
    fn extend_to(&mut self, new_limit: u64) {
        if new_limit <= self.limit {
            return;
        }
        let lo = self.limit + 1;
        let len = (new_limit - self.limit) as usize;
        let mut composite = vec![false; len];
        for &p in &self.primes {
            if p * p > new_limit {
                break;
            }
            let first = (p * p).max(lo.div_ceil(p) * p);
            let mut m = first;
            while m <= new_limit {
                composite[(m - lo) as usize] = true;
                m += p;
            }
        }
        self.primes.extend(
            composite
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| lo + i as u64),
        );
        self.limit = new_limit;
    }

    fn grow(&mut self, target: u64) {
        while self.limit < target {
            let next = (self.limit * 2).max(target.min(self.limit * self.limit));
            self.extend_to(next.min(SIEVE_LIMIT));
        }
    }
}

fn sieve() -> &'static RwLock<Sieve> {
    static SIEVE: OnceLock<RwLock<Sieve>> = OnceLock::new();
    SIEVE.get_or_init(|| RwLock::new(Sieve::new()))
}

fn ensure_limit(target: u64) -> Result<()> {
    if target > SIEVE_LIMIT {
        return Err(Error::PrimeTooLarge(target));
    }
    if sieve().read().expect("sieve lock").limit >= target {
        return Ok(());
    }
    sieve().write().expect("sieve lock").grow(target);
    Ok(())
}

fn ensure_count(count: usize) -> Result<()> {
    loop {
        let (len, limit) = {
            let s = sieve().read().expect("sieve lock");
            (s.primes.len(), s.limit)
        };
        if len >= count {
            return Ok(());
        }
        if limit >= SIEVE_LIMIT {
            return Err(Error::PrimeTooLarge(limit));
        }
        ensure_limit((limit * 2).min(SIEVE_LIMIT))?;
    }
}

/// The `m`-th prime, 0-based (`nth(0) == 2`).
pub fn nth(m: usize) -> Result<u64> {
    ensure_count(m + 1)?;
    Ok(sieve().read().expect("sieve lock").primes[m])
}

/// First `count` primes.
pub fn first(count: usize) -> Result<Vec<u64>> {
    ensure_count(count)?;
    Ok(sieve().read().expect("sieve lock").primes[..count].to_vec())
}

/// 0-based position of the prime `p`, or `None` if `p` is not prime.
pub fn index_of(p: u64) -> Result<Option<usize>> {
    ensure_limit(p)?;
    Ok(sieve().read().expect("sieve lock").primes.binary_search(&p).ok())
}

pub fn is_prime(n: u64) -> Result<bool> {
    Ok(n >= 2 && index_of(n)?.is_some())
}

/// Smallest prime strictly greater than `x`.
pub fn next_prime_above(x: f64) -> Result<u64> {
    let start = if x < 2.0 { 2 } else { x.floor() as u64 + 1 };
    let mut n = start;
    loop {
        if is_prime(n)? {
            return Ok(n);
        }
        n += 1;
    }
}

/// `(prime index, exponent)` pairs of `n`, prime indices increasing.
pub fn factor_indices(n: u64) -> Result<Vec<(usize, u32)>> {
    if n == 0 {
        return Err(Error::ZeroIndex);
    }
    let mut rest = n;
    let mut out = Vec::new();
    let mut m = 0;
    while rest > 1 {
        let p = nth(m)?;
        if p * p > rest {
            break;
        }
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            out.push((m, e));
        }
        m += 1;
    }
    if rest > 1 {
        let idx = index_of(rest)?.expect("cofactor after trial division is prime");
        out.push((idx, 1));
    }
    Ok(out)
}
