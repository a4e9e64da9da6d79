//! Envelope for the coefficients a truncated series discards.
//!
//! A [`GeometricTail`] describes discarded coefficients living on a power
//! chain: index `dilation * base^m` for `m >= start`, with modulus at most
//! `amplitude * ratio^(m - start) * (base^m)^(scale / 2)`. The Blaschke-type
//! fixtures have exactly this shape, and the envelope is closed under
//! dilation and the `S_t` scaling, so bounds survive every transformation the
//! diagnostics apply.

use serde::{Deserialize, Serialize};

/// Number of envelope terms summed explicitly before the geometric remainder.
const EXPLICIT_TERMS: u32 = 256;
/// Relative outward widening of every envelope sum.
const OUTWARD: f64 = 1.0 + 64.0 * f64::EPSILON;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricTail {
    pub base: u64,
    pub start: u32,
    pub amplitude: f64,
    pub ratio: f64,
    #[serde(default = "one")]
    pub dilation: u64,
    #[serde(default)]
    pub scale: f64,
}

fn one() -> u64 {
    1
}

impl GeometricTail {
    pub fn new(base: u64, start: u32, amplitude: f64, ratio: f64) -> Self {
        Self {
            base,
            start,
            amplitude: amplitude.abs(),
            ratio: ratio.abs(),
            dilation: 1,
            scale: 0.0,
        }
    }

    /// Smallest index the envelope covers, as a double (may exceed `u64`).
    pub fn first_index(&self) -> f64 {
        self.dilation as f64 * (self.base as f64).powi(self.start as i32)
    }

    pub fn is_valid(&self) -> bool {
        self.base >= 2
            && self.dilation >= 1
            && self.amplitude.is_finite()
            && self.ratio.is_finite()
            && self.scale.is_finite()
    }

    /// Envelope of the tail of `f(z^k)`.
    pub fn dilated(&self, k: u64) -> Self {
        Self {
            dilation: self.dilation.saturating_mul(k),
            ..self.clone()
        }
    }

    /// Envelope of the tail after multiplying coefficient `n` by `n^(s/2)`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            amplitude: self.amplitude * (self.dilation as f64).powf(s / 2.0),
            scale: self.scale + s,
            ..self.clone()
        }
    }

    fn ln_modulus(&self, j: u32) -> f64 {
        let m = (self.start + j) as f64;
        let lnb = (self.base as f64).ln();
        self.amplitude.ln() + j as f64 * self.ratio.ln() + m * lnb * self.scale / 2.0
    }

    /// Sum of a non-negative series given by `ln_term(j)` whose successive
    /// ratios are bounded by `q`.
    fn envelope_sum(&self, q: f64, ln_term: impl Fn(u32) -> f64) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        if self.ratio == 0.0 {
            return ln_term(0).exp();
        }
        if !(q < 1.0) {
            return f64::INFINITY;
        }
        let mut sum = 0.0;
        let mut last = 0.0;
        for j in 0..EXPLICIT_TERMS {
            last = ln_term(j).exp();
            sum += last;
        }
        (sum + last * q / (1.0 - q)) * OUTWARD
    }

    /// Upper bound on `||C_k e||_t` where `e` is the enveloped tail.
    pub fn weighted_l2(&self, t: f64, k: u64) -> f64 {
        let b = self.base as f64;
        let q = self.ratio * self.ratio * b.powf(self.scale + t.max(0.0));
        let lnkd = (k as f64).ln() + (self.dilation as f64).ln();
        let lnb = b.ln();
        let sq = self.envelope_sum(q, |j| {
            let m = (self.start + j) as f64;
            let x = lnkd + m * lnb;
            let ln_weight = t * (x + (-x).exp().ln_1p());
            2.0 * self.ln_modulus(j) + ln_weight
        });
        sq.sqrt()
    }

    /// Upper bound on the l1 norm of the enveloped coefficients.
    pub fn l1(&self) -> f64 {
        let q = self.ratio * (self.base as f64).powf(self.scale / 2.0);
        self.envelope_sum(q, |j| self.ln_modulus(j))
    }
}
