//! Prime generation: a simple in-memory sieve for moderate bounds and a
//! segmented enumeration for long prime sums (up to ~1e9) that never holds
//! the whole range in memory.

use crate::summation::KahanSum;
use rayon::prelude::*;

/// All primes `<= x`, increasing. Plain odd-only Eratosthenes.
pub fn primes_up_to(x: u64) -> Vec<u64> {
    if x < 2 {
        return Vec::new();
    }
    let x = x as usize;
    let mut primes = vec![2];
    // index i represents the odd number 2i + 3
    let len = (x.saturating_sub(1)) / 2;
    let mut composite = vec![false; len];
    let mut i = 0usize;
    while {
        let p = 2 * i + 3;
        p * p <= x
    } {
        if !composite[i] {
            let p = 2 * i + 3;
            let mut m = (p * p - 3) / 2;
            while m < len {
                composite[m] = true;
                m += p;
            }
        }
        i += 1;
    }
    for (i, &c) in composite.iter().enumerate() {
        if !c {
            primes.push((2 * i + 3) as u64);
        }
    }
    primes
}

/// Exact integer square root.
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|rr| rr > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|rr| rr <= n) {
        r += 1;
    }
    r
}

/// Exact integer k-th root: largest r with r^k <= n.
pub fn nth_root(n: u64, k: u32) -> u64 {
    if n == 0 || k == 0 {
        return if k == 0 { 1 } else { 0 };
    }
    if k == 1 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / k as f64).round() as u64;
    // float seeding can be off by one either way near perfect powers
    while r > 0 && pow_checked(r, k).is_none_or(|v| v > n) {
        r -= 1;
    }
    while pow_checked(r + 1, k).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}

/// r^k if it fits in u64.
pub fn pow_checked(r: u64, k: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..k {
        acc = acc.checked_mul(r)?;
    }
    Some(acc)
}

const BLOCK: u64 = 1 << 21;

/// Visit every prime `<= limit` in increasing order, sieving in fixed-size
/// blocks. Memory stays O(sqrt(limit) + block).
pub fn for_each_prime<F: FnMut(u64)>(limit: u64, mut f: F) {
    if limit < 2 {
        return;
    }
    let base = primes_up_to(isqrt(limit));
    for &p in &base {
        f(p);
    }
    let mut lo = isqrt(limit) + 1;
    let mut composite = vec![false; BLOCK as usize];
    while lo <= limit {
        let hi = (lo + BLOCK - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        composite[..len].iter_mut().for_each(|c| *c = false);
        for &p in &base {
            let mut m = lo.div_ceil(p).saturating_mul(p);
            while m <= hi {
                composite[(m - lo) as usize] = true;
                match m.checked_add(p) {
                    Some(next) => m = next,
                    None => break,
                }
            }
        }
        for (i, &c) in composite[..len].iter().enumerate() {
            if !c {
                f(lo + i as u64);
            }
        }
        lo = hi + 1;
    }
}

/// Compensated sum of `term(p)` over primes `p <= limit`.
///
/// Blocks are sieved in parallel; per-block partials are folded in block
/// order, so the result is bitwise identical for any thread count.
pub fn prime_sum<F>(limit: u64, term: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    if limit < 2 {
        return 0.0;
    }
    let base = primes_up_to(isqrt(limit));
    let mut total = KahanSum::new();
    for &p in &base {
        total.add(term(p));
    }
    let first = isqrt(limit) + 1;
    if first > limit {
        return total.value();
    }
    let blocks = (limit - first) / BLOCK + 1;
    let partials: Vec<KahanSum> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let lo = first + b * BLOCK;
            let hi = (lo + BLOCK - 1).min(limit);
            let len = (hi - lo + 1) as usize;
            let mut composite = vec![false; len];
            for &p in &base {
                let mut m = lo.div_ceil(p).saturating_mul(p);
                while m <= hi {
                    composite[(m - lo) as usize] = true;
                    match m.checked_add(p) {
                        Some(next) => m = next,
                        None => break,
                    }
                }
            }
            let mut acc = KahanSum::new();
            for (i, &c) in composite.iter().enumerate() {
                if !c {
                    acc.add(term(lo + i as u64));
                }
            }
            acc
        })
        .collect();
    for p in partials {
        total.merge(p);
    }
    total.value()
}

/// pi(x): number of primes <= x.
pub fn prime_count(limit: u64) -> u64 {
    let mut n = 0u64;
    for_each_prime(limit, |_| n += 1);
    n
}
