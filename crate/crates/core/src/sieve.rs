//! Bulk enumeration engines.
//!
//! Two very different regimes:
//!
//! * [`sieve_range`] / [`sieve_map_reduce`]: a segmented factorization sieve
//!   that produces omega, Omega and the exponent extremes for every n in a
//!   range. Cost is O(x log log x) time and O(segment) memory, so it is the
//!   workhorse for h-free and unrestricted sums up to ~1e8..1e9.
//!
//! * [`enumerate_h_full`]: depth-first construction of h-full integers from
//!   their factorizations. There are only O(x^(1/h)) of them, so this runs
//!   to 1e12 and beyond for h = 2 in well under a second.
//!
//! Each segment divides every n by the base primes (and their powers) while
//! counting exponents; whatever is left over 1 after that is a single prime
//! exceeding sqrt(hi) with exponent 1.

use crate::error::{Error, Result};
use crate::factor::FactoredInteger;
use crate::primes::{isqrt, primes_up_to};
use rayon::prelude::*;
use serde::Serialize;

/// Sentinel for `min_exponent` of n = 1: vacuously h-full for every h.
pub const MIN_EXP_INFINITE: u8 = u8::MAX;

/// Per-integer statistics emitted by the sieve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SieveRecord {
    pub n: u64,
    pub omega: u8,
    pub big_omega: u8,
    pub max_exponent: u8,
    pub min_exponent: u8,
}

impl SieveRecord {
    pub fn is_h_free(&self, h: u32) -> bool {
        (self.max_exponent as u32) < h
    }

    pub fn is_h_full(&self, h: u32) -> bool {
        self.min_exponent as u32 >= h
    }
}

/// Default segment length, in records.
pub const DEFAULT_SEGMENT_SIZE: usize = 1 << 22;

/// Default memory budget for segment buffers plus base primes.
pub const DEFAULT_MEMORY_BUDGET: u64 = 1 << 31;

/// Bytes of working memory per record in a segment (residual + 4 counters).
const BYTES_PER_RECORD: u64 = 12;

/// A validated sieving job: range, segment size, and base primes.
#[derive(Debug, Clone)]
pub struct SegmentPlan {
    lo: u64,
    hi: u64,
    segment_size: usize,
    base_primes: Vec<u64>,
}

impl SegmentPlan {
    /// Plan a sieve over `[lo, hi]` with the given segment size, checking the
    /// memory budget (segment buffers plus the base-prime table) before any
    /// large allocation happens.
    pub fn new(lo: u64, hi: u64, segment_size: usize, memory_budget: u64) -> Result<Self> {
        if lo == 0 || lo > hi {
            return Err(Error::InvalidRange { lo, hi });
        }
        let segment_size = segment_size.max(1024);
        let root = isqrt(hi);
        // pi(x) < 1.3 x / log x for x >= 17
        let prime_estimate = if root < 17 {
            8
        } else {
            (1.3 * root as f64 / (root as f64).ln()) as u64
        };
        let needed = segment_size as u64 * BYTES_PER_RECORD + prime_estimate * 8;
        if needed > memory_budget {
            return Err(Error::BudgetExceeded {
                lo,
                hi,
                needed,
                budget: memory_budget,
            });
        }
        let base_primes = primes_up_to(root);
        Ok(Self {
            lo,
            hi,
            segment_size,
            base_primes,
        })
    }

    pub fn with_defaults(lo: u64, hi: u64) -> Result<Self> {
        Self::new(lo, hi, DEFAULT_SEGMENT_SIZE, DEFAULT_MEMORY_BUDGET)
    }

    fn segment_count(&self) -> u64 {
        (self.hi - self.lo) / self.segment_size as u64 + 1
    }

    fn segment_bounds(&self, index: u64) -> (u64, u64) {
        let lo = self.lo + index * self.segment_size as u64;
        let hi = lo
            .saturating_add(self.segment_size as u64 - 1)
            .min(self.hi);
        (lo, hi)
    }

    /// Fill `out` with the records for one segment, in increasing n.
    fn run_segment(&self, index: u64, out: &mut Vec<SieveRecord>) {
        let (lo, hi) = self.segment_bounds(index);
        let len = (hi - lo + 1) as usize;
        out.clear();
        out.reserve(len);
        let mut residual: Vec<u64> = (lo..=hi).collect();
        let mut rec: Vec<SieveRecord> = (lo..=hi)
            .map(|n| SieveRecord {
                n,
                omega: 0,
                big_omega: 0,
                max_exponent: 0,
                min_exponent: MIN_EXP_INFINITE,
            })
            .collect();
        for &p in &self.base_primes {
            if p > hi {
                break;
            }
            let mut m = lo.div_ceil(p).saturating_mul(p);
            while m <= hi {
                let i = (m - lo) as usize;
                let mut e = 0u8;
                while residual[i].is_multiple_of(p) {
                    residual[i] /= p;
                    e += 1;
                }
                let r = &mut rec[i];
                r.omega += 1;
                r.big_omega += e;
                r.max_exponent = r.max_exponent.max(e);
                r.min_exponent = r.min_exponent.min(e);
                match m.checked_add(p) {
                    Some(next) => m = next,
                    None => break,
                }
            }
        }
        for (i, r) in rec.iter_mut().enumerate() {
            if residual[i] > 1 {
                r.omega += 1;
                r.big_omega += 1;
                r.max_exponent = r.max_exponent.max(1);
                r.min_exponent = r.min_exponent.min(1);
            }
        }
        out.extend_from_slice(&rec);
    }
}

/// Emit a [`SieveRecord`] for every n in the plan's range, in increasing n.
/// Returns the number of records emitted.
pub fn sieve_range<F: FnMut(&SieveRecord)>(plan: &SegmentPlan, mut consumer: F) -> u64 {
    let mut buf = Vec::new();
    let mut count = 0u64;
    for seg in 0..plan.segment_count() {
        plan.run_segment(seg, &mut buf);
        for r in &buf {
            consumer(r);
            count += 1;
        }
    }
    count
}

/// Parallel sieve: `map` runs on whole segments (concurrently), partial
/// results are folded in segment order. With an associative `fold` this is
/// deterministic for any thread count.
pub fn sieve_map_reduce<T, M, R>(plan: &SegmentPlan, map: M, fold: R) -> Option<T>
where
    T: Send,
    M: Fn(&[SieveRecord]) -> T + Sync,
    R: Fn(T, T) -> T,
{
    let partials: Vec<T> = (0..plan.segment_count())
        .into_par_iter()
        .map(|seg| {
            let mut buf = Vec::new();
            plan.run_segment(seg, &mut buf);
            map(&buf)
        })
        .collect();
    partials.into_iter().reduce(fold)
}

/// Enumerate every h-full integer `<= x` with its full factorization, by
/// depth-first search over strictly increasing primes with exponents >= h.
/// Returns the count (n = 1 included). Order is deterministic for a fixed
/// prime table but not sorted.
pub fn enumerate_h_full<F: FnMut(&FactoredInteger)>(x: u64, h: u32, consumer: F) -> Result<u64> {
    enumerate_h_full_coprime(x, h, &[], consumer)
}

/// Same as [`enumerate_h_full`] but skipping numbers divisible by any of
/// `excluded` (which must be distinct primes).
pub fn enumerate_h_full_coprime<F: FnMut(&FactoredInteger)>(
    x: u64,
    h: u32,
    excluded: &[u64],
    mut consumer: F,
) -> Result<u64> {
    if h < 2 {
        return Err(Error::HTooSmall(h));
    }
    if x == 0 {
        return Err(Error::ZeroInput);
    }
    for (i, &q) in excluded.iter().enumerate() {
        let is_prime = q >= 2 && (2..q).take_while(|d| d * d <= q).all(|d| q % d != 0);
        if !is_prime || excluded[..i].contains(&q) {
            return Err(Error::BadExcludedPrime(q));
        }
    }
    // p^h <= x forces p <= x^(1/h)
    let p_cap = crate::primes::nth_root(x, h);
    let primes: Vec<u64> = primes_up_to(p_cap)
        .into_iter()
        .filter(|p| !excluded.contains(p))
        .collect();
    let mut stack: Vec<(u64, u32)> = Vec::new();
    let mut count = 0u64;
    dfs(1, 0, x, h, &primes, &mut stack, &mut consumer, &mut count);
    Ok(count)
}

#[allow(clippy::too_many_arguments)]
fn dfs<F: FnMut(&FactoredInteger)>(
    value: u64,
    next_idx: usize,
    x: u64,
    h: u32,
    primes: &[u64],
    stack: &mut Vec<(u64, u32)>,
    consumer: &mut F,
    count: &mut u64,
) {
    let f = FactoredInteger::from_parts(value as u128, stack.clone())
        .expect("DFS maintains canonical factorizations");
    consumer(&f);
    *count += 1;
    for idx in next_idx..primes.len() {
        let p = primes[idx];
        // p^h must fit in the remaining budget; primes increase, so stop at
        // the first that does not
        let Some(step) = crate::primes::pow_checked(p, h) else {
            break;
        };
        let Some(mut v) = value.checked_mul(step) else {
            break;
        };
        if v > x {
            break;
        }
        let mut e = h;
        loop {
            stack.push((p, e));
            dfs(v, idx + 1, x, h, primes, stack, consumer, count);
            stack.pop();
            match v.checked_mul(p) {
                Some(nv) if nv <= x => {
                    v = nv;
                    e += 1;
                }
                _ => break,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::factorize;

    fn records(lo: u64, hi: u64) -> Vec<SieveRecord> {
        let plan = SegmentPlan::with_defaults(lo, hi).unwrap();
        let mut out = Vec::new();
        sieve_range(&plan, |r| out.push(*r));
        out
    }

    #[test]
    fn first_ten_omegas() {
        let rs = records(1, 10);
        let omegas: Vec<u8> = rs.iter().map(|r| r.omega).collect();
        assert_eq!(omegas, vec![0, 1, 1, 1, 1, 2, 1, 1, 1, 2]);
        assert_eq!(rs[0].min_exponent, MIN_EXP_INFINITE);
        assert_eq!(rs[0].big_omega, 0);
    }

    #[test]
    fn squarefree_and_squarefull_counts_to_100() {
        let rs = records(1, 100);
        let squarefree = rs.iter().filter(|r| r.is_h_free(2)).count();
        assert_eq!(squarefree, 61);
        let squarefull: Vec<u64> = rs.iter().filter(|r| r.is_h_full(2)).map(|r| r.n).collect();
        assert_eq!(
            squarefull,
            vec![1, 4, 8, 9, 16, 25, 27, 32, 36, 49, 64, 72, 81, 100]
        );
    }

    #[test]
    fn agrees_with_factorize_on_segment_boundaries() {
        // a small segment size forces several boundaries inside the range
        let plan = SegmentPlan::new(999_950, 1_000_150, 1024, DEFAULT_MEMORY_BUDGET).unwrap();
        let mut rs = Vec::new();
        sieve_range(&plan, |r| rs.push(*r));
        assert_eq!(rs.len(), 201);
        for r in &rs {
            let f = factorize(r.n as u128).unwrap();
            assert_eq!(r.omega as u32, f.omega(), "n={}", r.n);
            assert_eq!(r.big_omega as u32, f.big_omega(), "n={}", r.n);
            assert_eq!(r.max_exponent as u32, f.max_exponent(), "n={}", r.n);
            let min = f.min_exponent().unwrap_or(u32::MAX).min(255);
            assert_eq!(r.min_exponent as u32, min, "n={}", r.n);
        }
    }

    #[test]
    fn map_reduce_matches_serial() {
        let plan = SegmentPlan::new(1, 200_000, 4096, DEFAULT_MEMORY_BUDGET).unwrap();
        let serial = {
            let mut s = 0u64;
            sieve_range(&plan, |r| s += r.omega as u64);
            s
        };
        let parallel = sieve_map_reduce(
            &plan,
            |seg| seg.iter().map(|r| r.omega as u64).sum::<u64>(),
            |a, b| a + b,
        )
        .unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn budget_rejects_tiny_allowance() {
        let err = SegmentPlan::new(1, 1 << 30, DEFAULT_SEGMENT_SIZE, 1024).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
        assert!(SegmentPlan::new(5, 4, 1024, DEFAULT_MEMORY_BUDGET).is_err());
        assert!(SegmentPlan::new(0, 4, 1024, DEFAULT_MEMORY_BUDGET).is_err());
    }

    #[test]
    fn h_full_enumeration_counts() {
        let mut seen = Vec::new();
        let count = enumerate_h_full(100, 2, |f| seen.push(f.n() as u64)).unwrap();
        assert_eq!(count, 14);
        seen.sort_unstable();
        assert_eq!(
            seen,
            vec![1, 4, 8, 9, 16, 25, 27, 32, 36, 49, 64, 72, 81, 100]
        );

        let mut cubes = Vec::new();
        let count3 = enumerate_h_full(100, 3, |f| cubes.push(f.n() as u64)).unwrap();
        assert_eq!(count3, 7);
        cubes.sort_unstable();
        assert_eq!(cubes, vec![1, 8, 16, 27, 32, 64, 81]);

        assert_eq!(enumerate_h_full(1, 4, |_| {}).unwrap(), 1);
        assert!(enumerate_h_full(0, 2, |_| {}).is_err());
        assert!(enumerate_h_full(10, 1, |_| {}).is_err());
    }

    #[test]
    fn h_full_factorizations_are_valid() {
        enumerate_h_full(5000, 2, |f| {
            assert!(f.factors().iter().all(|&(_, e)| e >= 2));
            let prod: u128 = f
                .factors()
                .iter()
                .map(|&(p, e)| (p as u128).pow(e))
                .product();
            assert_eq!(prod, f.n());
        })
        .unwrap();
    }

    #[test]
    fn h_full_coprime_exclusion() {
        let mut odd = Vec::new();
        let count = enumerate_h_full_coprime(100, 2, &[2], |f| odd.push(f.n() as u64)).unwrap();
        assert_eq!(count, 6);
        odd.sort_unstable();
        assert_eq!(odd, vec![1, 9, 25, 27, 49, 81]);
        assert!(enumerate_h_full_coprime(100, 2, &[4], |_| {}).is_err());
        assert!(enumerate_h_full_coprime(100, 2, &[3, 3], |_| {}).is_err());
    }

    #[test]
    fn h_full_matches_sieve_filter() {
        for h in [2u32, 3, 4] {
            let mut dfs_count = 0u64;
            enumerate_h_full(50_000, h, |_| dfs_count += 1).unwrap();
            let plan = SegmentPlan::with_defaults(1, 50_000).unwrap();
            let mut sieve_count = 0u64;
            sieve_range(&plan, |r| {
                if r.is_h_full(h) {
                    sieve_count += 1;
                }
            });
            assert_eq!(dfs_count, sieve_count, "h={h}");
        }
    }
}
