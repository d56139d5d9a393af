//! Exact factorization of single integers and the additive statistics
//! omega (distinct prime factors) and Omega (prime factors with
//! multiplicity), plus h-free / h-full classification.
//!
//! This is the correctness oracle for the bulk sieve: slow, allocation-light
//! trial division that shares no code with the segmented sieve.

use crate::error::{Error, Result};
use serde::Serialize;

/// An integer together with its canonical prime factorization.
///
/// Invariants: primes strictly increasing, every exponent >= 1, and the
/// product of `p^e` equals `n` exactly. `n = 1` has an empty factor list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactoredInteger {
    n: u128,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    /// Assemble from parts, checking the invariants.
    pub fn from_parts(n: u128, factors: Vec<(u64, u32)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroInput);
        }
        let mut prod: u128 = 1;
        let mut last = 0u64;
        for &(p, e) in &factors {
            if p <= last || e == 0 {
                return Err(Error::InvalidParameter(format!(
                    "bad factor ({p},{e}) after {last}"
                )));
            }
            last = p;
            for _ in 0..e {
                prod = prod.checked_mul(p as u128).ok_or(Error::ZeroInput)?;
            }
        }
        if prod != n {
            return Err(Error::InvalidParameter(format!(
                "factors multiply to {prod}, not {n}"
            )));
        }
        Ok(Self { n, factors })
    }

    pub fn n(&self) -> u128 {
        self.n
    }

    /// `(prime, exponent)` pairs with primes strictly increasing.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Number of distinct prime factors; 0 for n = 1.
    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }

    /// Number of prime factors counted with multiplicity; 0 for n = 1.
    pub fn big_omega(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    /// Largest exponent in the factorization; 0 for n = 1.
    pub fn max_exponent(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).max().unwrap_or(0)
    }

    /// Smallest exponent, or `None` for n = 1 (vacuously infinite).
    pub fn min_exponent(&self) -> Option<u32> {
        self.factors.iter().map(|&(_, e)| e).min()
    }
}

/// h-free / h-full membership of one integer at a fixed `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HClass {
    pub h: u32,
    pub is_h_free: bool,
    pub is_h_full: bool,
}

/// Canonical factorization by trial division with a 2-3-5 wheel.
///
/// Deterministic and exact for any positive input; intended for single
/// values and spot checks, not bulk ranges (the sieve handles those).
pub fn factorize(n: u128) -> Result<FactoredInteger> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    let original = n;
    let mut rest = n;
    let mut factors: Vec<(u64, u32)> = Vec::new();

    let mut strip = |p: u128, rest: &mut u128| {
        let mut e = 0u32;
        while (*rest).is_multiple_of(p) {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p as u64, e));
        }
    };
    strip(2, &mut rest);
    strip(3, &mut rest);
    strip(5, &mut rest);

    // increments that skip multiples of 2, 3, 5 starting from 7
    const WHEEL: [u128; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut d: u128 = 7;
    let mut w = 0usize;
    while d * d <= rest {
        if rest.is_multiple_of(d) {
            let mut e = 0u32;
            while rest.is_multiple_of(d) {
                rest /= d;
                e += 1;
            }
            factors.push((d as u64, e));
        }
        d += WHEEL[w];
        w = (w + 1) % WHEEL.len();
    }
    if rest > 1 {
        debug_assert!(rest <= u64::MAX as u128, "cofactor exceeds 64 bits");
        factors.push((rest as u64, 1));
    }
    Ok(FactoredInteger {
        n: original,
        factors,
    })
}

/// Classify membership in the h-free and h-full sets.
///
/// h-free: every exponent <= h-1. h-full: every exponent >= h.
/// n = 1 is vacuously both.
pub fn classify_h(f: &FactoredInteger, h: u32) -> Result<HClass> {
    if h < 2 {
        return Err(Error::HTooSmall(h));
    }
    Ok(HClass {
        h,
        is_h_free: f.factors.iter().all(|&(_, e)| e < h),
        is_h_full: f.factors.iter().all(|&(_, e)| e >= h),
    })
}
