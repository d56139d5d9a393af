//! Exact moment sums of omega and Omega over the integers, the h-free
//! integers, and the h-full integers, paired with the predicted main terms
//! of the matching asymptotic expansion; plus the Mertens reciprocal sum,
//! the prime-pair double sum, the variance of omega over h-full numbers,
//! and normal-order concentration counts.
//!
//! Each report's `normalized_residual` divides (exact - predicted) by the
//! expansion's own error scale, so boundedness over a geometric grid of x
//! is the empirical form of the big-O statement.

use crate::constants::ConstantBundle;
use crate::error::{Error, Result};
use crate::primes::{prime_sum, primes_up_to};
use crate::sieve::{enumerate_h_full, sieve_map_reduce, SegmentPlan};
use crate::summation::KahanSum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Population {
    All,
    HFree,
    HFull,
}

impl std::fmt::Display for Population {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Population::All => "all",
            Population::HFree => "h-free",
            Population::HFull => "h-full",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    /// Number of distinct prime factors.
    Omega,
    /// Number of prime factors with multiplicity.
    BigOmega,
}

impl std::fmt::Display for Statistic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Statistic::Omega => "omega",
            Statistic::BigOmega => "big-omega",
        })
    }
}

/// One exact moment against its predicted main terms.
#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub x: u64,
    pub h: u32,
    pub population: Population,
    pub statistic: Statistic,
    pub power: u8,
    pub exact_sum: u128,
    pub predicted: f64,
    pub residual: f64,
    pub normalized_residual: f64,
    /// Which asymptotic law produced the prediction.
    pub theorem: &'static str,
}

/// Main-term coefficients of one law: with L = log log x, the predicted
/// value is `leading_power(x) * (ll2 L^2 + ll1 L + ll0)` where the leading
/// power is x itself (h-free, all) or x^(1/h) (h-full).
#[derive(Debug, Clone, Copy)]
pub struct MainTermCoefficients {
    pub ll2: f64,
    pub ll1: f64,
    pub ll0: f64,
}

/// Coefficients and tag of the law for one (population, statistic, power).
pub fn main_term_coefficients(
    bundle: &ConstantBundle,
    population: Population,
    statistic: Statistic,
    power: u8,
) -> Result<(MainTermCoefficients, &'static str)> {
    use Population::*;
    use Statistic::*;
    let b = bundle;
    let inv_zh = 1.0 / b.zeta_h.value;
    let g0 = b.gamma0.value;
    let hf = b.h as f64;
    let c = |ll2, ll1, ll0| MainTermCoefficients { ll2, ll1, ll0 };
    match (population, statistic, power) {
        (All, Omega, 1) => Ok((c(0.0, 1.0, b.b1.value), "average-omega")),
        (All, BigOmega, 1) => Ok((c(0.0, 1.0, b.b2.value), "average-big-omega")),
        (HFree, Omega, 1) => Ok((
            c(0.0, inv_zh, b.c1.value * inv_zh),
            "hfree-omega-first-moment",
        )),
        (HFree, Omega, 2) => Ok((
            c(
                inv_zh,
                (2.0 * b.c1.value + 1.0) * inv_zh,
                b.c2.value * inv_zh,
            ),
            "hfree-omega-second-moment",
        )),
        (HFree, BigOmega, 1) => Ok((
            c(0.0, inv_zh, b.c3.value * inv_zh),
            "hfree-big-omega-first-moment",
        )),
        (HFree, BigOmega, 2) => Ok((
            c(
                inv_zh,
                (2.0 * b.c3.value + 1.0) * inv_zh,
                b.c4.value * inv_zh,
            ),
            "hfree-big-omega-second-moment",
        )),
        (HFull, Omega, 1) => Ok((
            c(0.0, g0, b.d1.value * g0),
            "hfull-omega-first-moment",
        )),
        (HFull, Omega, 2) => Ok((
            c(g0, (2.0 * b.d1.value + 1.0) * g0, b.d2.value * g0),
            "hfull-omega-second-moment",
        )),
        (HFull, BigOmega, 1) => Ok((
            c(0.0, hf * g0, b.b3.value * g0),
            "hfull-big-omega-first-moment",
        )),
        (HFull, BigOmega, 2) => Ok((
            c(
                hf * hf * g0,
                (2.0 * b.b3.value + 1.0) * hf * g0,
                b.b4.value * g0,
            ),
            "hfull-big-omega-second-moment",
        )),
        _ => Err(Error::InvalidCombination {
            population: match population {
                All => "all",
                HFree => "h-free",
                HFull => "h-full",
            },
            statistic: match statistic {
                Omega => "omega",
                BigOmega => "big-omega",
            },
            power,
        }),
    }
}

fn leading_power(x: f64, h: u32, population: Population) -> f64 {
    match population {
        Population::All | Population::HFree => x,
        Population::HFull => x.powf(1.0 / h as f64),
    }
}

/// The law's error scale: x/log x for h-free and unrestricted sums,
/// x^(1/h)/log x for h-full first moments, and x^(1/h) loglog x / log x for
/// h-full second moments.
fn error_scale(x: f64, h: u32, population: Population, power: u8) -> f64 {
    match population {
        Population::All | Population::HFree => x / x.ln(),
        Population::HFull => {
            let base = x.powf(1.0 / h as f64) / x.ln();
            if power == 2 {
                base * x.ln().ln()
            } else {
                base
            }
        }
    }
}

/// Exact sum of statistic^power over the population up to x, with default
/// sieve sizing.
pub fn exact_moment_sum(
    x: u64,
    h: u32,
    population: Population,
    statistic: Statistic,
    power: u8,
) -> Result<u128> {
    exact_moment_sum_with(
        x,
        h,
        population,
        statistic,
        power,
        crate::sieve::DEFAULT_SEGMENT_SIZE,
        crate::sieve::DEFAULT_MEMORY_BUDGET,
    )
}

/// Exact sum with explicit sieve sizing (h-full sums never touch the sieve
/// and ignore both knobs).
pub fn exact_moment_sum_with(
    x: u64,
    h: u32,
    population: Population,
    statistic: Statistic,
    power: u8,
    segment_size: usize,
    memory_budget: u64,
) -> Result<u128> {
    if !(power == 1 || power == 2) {
        return Err(Error::InvalidParameter(format!("power must be 1 or 2, got {power}")));
    }
    let stat_of = move |omega: u64, big_omega: u64| -> u64 {
        let v = match statistic {
            Statistic::Omega => omega,
            Statistic::BigOmega => big_omega,
        };
        if power == 2 {
            v * v
        } else {
            v
        }
    };
    match population {
        Population::HFull => {
            let mut total: u128 = 0;
            enumerate_h_full(x, h, |f| {
                total += stat_of(f.omega() as u64, f.big_omega() as u64) as u128;
            })?;
            Ok(total)
        }
        _ => {
            let plan = SegmentPlan::new(1, x, segment_size, memory_budget)?;
            let filter_free = matches!(population, Population::HFree);
            Ok(sieve_map_reduce(
                &plan,
                |segment| {
                    let mut acc: u64 = 0;
                    for r in segment {
                        if !filter_free || r.is_h_free(h) {
                            acc += stat_of(r.omega as u64, r.big_omega as u64);
                        }
                    }
                    acc as u128
                },
                |a, b| a + b,
            )
            .unwrap_or(0))
        }
    }
}

/// Exact-vs-predicted moment report at one x.
pub fn moment(
    bundle: &ConstantBundle,
    x: u64,
    population: Population,
    statistic: Statistic,
    power: u8,
) -> Result<MomentReport> {
    moment_with(
        bundle,
        x,
        population,
        statistic,
        power,
        crate::sieve::DEFAULT_SEGMENT_SIZE,
        crate::sieve::DEFAULT_MEMORY_BUDGET,
    )
}

/// [`moment`] with explicit sieve sizing.
pub fn moment_with(
    bundle: &ConstantBundle,
    x: u64,
    population: Population,
    statistic: Statistic,
    power: u8,
    segment_size: usize,
    memory_budget: u64,
) -> Result<MomentReport> {
    if x < 3 {
        return Err(Error::XTooSmall { got: x, min: 3 });
    }
    let exact = exact_moment_sum_with(
        x,
        bundle.h,
        population,
        statistic,
        power,
        segment_size,
        memory_budget,
    )?;
    moment_from_exact(bundle, x, population, statistic, power, exact)
}

/// Assemble a report from an externally computed exact sum (for callers
/// that harvest several sums from one enumeration pass).
pub fn moment_from_exact(
    bundle: &ConstantBundle,
    x: u64,
    population: Population,
    statistic: Statistic,
    power: u8,
    exact_sum: u128,
) -> Result<MomentReport> {
    let (coeff, theorem) = main_term_coefficients(bundle, population, statistic, power)?;
    let xf = x as f64;
    let ll = xf.ln().ln();
    let predicted =
        leading_power(xf, bundle.h, population) * (coeff.ll2 * ll * ll + coeff.ll1 * ll + coeff.ll0);
    let residual = exact_sum as f64 - predicted;
    Ok(MomentReport {
        x,
        h: bundle.h,
        population,
        statistic,
        power,
        exact_sum,
        predicted,
        residual,
        normalized_residual: residual / error_scale(xf, bundle.h, population, power),
        theorem,
    })
}

/// A reciprocal prime sum against its predicted value, residual normalized
/// by the expansion's error scale.
#[derive(Debug, Clone, Serialize)]
pub struct PrimeSumReport {
    pub x: u64,
    pub exact: f64,
    pub predicted: f64,
    pub residual: f64,
    pub normalized_residual: f64,
}

/// sum_{p <= x} 1/p against loglog x + B1; error scale 1/log x.
pub fn mertens_sum(x: u64, bundle: &ConstantBundle) -> Result<PrimeSumReport> {
    if x < 3 {
        return Err(Error::XTooSmall { got: x, min: 3 });
    }
    let exact = prime_sum(x, |p| 1.0 / p as f64);
    let xf = x as f64;
    let predicted = xf.ln().ln() + bundle.b1.value;
    let residual = exact - predicted;
    Ok(PrimeSumReport {
        x,
        exact,
        predicted,
        residual,
        normalized_residual: residual * xf.ln(),
    })
}

/// The ordered double sum over prime pairs, sum_{pq <= x} 1/(pq), with the
/// diagonal p = q included, against
/// (loglog x)^2 + 2 B1 loglog x + B1^2 - zeta(2); error scale loglog x/log x.
pub fn saidak_double_sum(x: u64, bundle: &ConstantBundle) -> Result<PrimeSumReport> {
    if x < 6 {
        return Err(Error::XTooSmall { got: x, min: 6 });
    }
    let primes = primes_up_to(x);
    // prefix[i] = compensated sum of 1/p over the first i primes
    let mut prefix = Vec::with_capacity(primes.len() + 1);
    prefix.push(0.0);
    let mut acc = KahanSum::new();
    for &p in &primes {
        acc.add(1.0 / p as f64);
        prefix.push(acc.value());
    }
    let mut total = KahanSum::new();
    for &p in &primes {
        if p > x / 2 {
            break;
        }
        let budget = x / p;
        let count = primes.partition_point(|&q| q <= budget);
        total.add(prefix[count] / p as f64);
    }
    let exact = total.value();
    let xf = x as f64;
    let ll = xf.ln().ln();
    let b1 = bundle.b1.value;
    let predicted = ll * ll + 2.0 * b1 * ll + b1 * b1 - bundle.zeta_2.value;
    let residual = exact - predicted;
    Ok(PrimeSumReport {
        x,
        exact,
        predicted,
        residual,
        normalized_residual: residual / (ll / xf.ln()),
    })
}

/// Variance-style sum of (omega(n) - loglog n)^2 over h-full n in [3, x].
#[derive(Debug, Clone, Serialize)]
pub struct VarianceReport {
    pub x: u64,
    pub h: u32,
    pub exact_variance_sum: f64,
    pub predicted: f64,
    pub residual: f64,
    pub normalized_residual: f64,
    /// Members of the population below 3 (where loglog is not usable);
    /// always just n = 1 here since 2 is never h-full.
    pub excluded_count: u64,
}

/// Exact variance sum against gamma0 x^(1/h) (loglog x + D2); error scale
/// x^(1/h) loglog x / log x.
pub fn variance_hfull(x: u64, bundle: &ConstantBundle) -> Result<VarianceReport> {
    if x < 3 {
        return Err(Error::XTooSmall { got: x, min: 3 });
    }
    let mut sum = KahanSum::new();
    let mut excluded = 0u64;
    enumerate_h_full(x, bundle.h, |f| {
        let n = f.n() as u64;
        if n < 3 {
            excluded += 1;
            return;
        }
        let dev = f.omega() as f64 - (n as f64).ln().ln();
        sum.add(dev * dev);
    })?;
    let xf = x as f64;
    let ll = xf.ln().ln();
    let root = xf.powf(1.0 / bundle.h as f64);
    let g0 = bundle.gamma0.value;
    let predicted = g0 * root * ll + bundle.d2.value * g0 * root;
    let exact = sum.value();
    let residual = exact - predicted;
    Ok(VarianceReport {
        x,
        h: bundle.h,
        exact_variance_sum: exact,
        predicted,
        residual,
        normalized_residual: residual / (root * ll / xf.ln()),
        excluded_count: excluded,
    })
}

/// How exceptional members are selected.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum ConcentrationMode {
    /// |omega(n) - loglog n| >= epsilon * loglog n.
    Epsilon(f64),
    /// |omega(n) - loglog n| >= g * sqrt(loglog n).
    SqrtThreshold(f64),
}

/// Exceptional counts over h-full n in [3, x].
#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationReport {
    pub x: u64,
    pub h: u32,
    pub mode: ConcentrationMode,
    pub exceptional_count: u64,
    pub population_count: u64,
    pub fraction: f64,
}

/// Count h-full n in [3, x] whose omega deviates from loglog n by the
/// mode's threshold. Normal order means the fraction tends to zero.
pub fn concentration(x: u64, h: u32, mode: ConcentrationMode) -> Result<ConcentrationReport> {
    if x < 16 {
        return Err(Error::XTooSmall { got: x, min: 16 });
    }
    let threshold_ok = match mode {
        ConcentrationMode::Epsilon(e) => e > 0.0,
        ConcentrationMode::SqrtThreshold(g) => g > 0.0,
    };
    if !threshold_ok {
        return Err(Error::InvalidParameter(
            "concentration threshold must be positive".into(),
        ));
    }
    let mut exceptional = 0u64;
    let mut population = 0u64;
    enumerate_h_full(x, h, |f| {
        let n = f.n() as u64;
        if n < 3 {
            return;
        }
        population += 1;
        let ll = (n as f64).ln().ln();
        let dev = (f.omega() as f64 - ll).abs();
        let bar = match mode {
            ConcentrationMode::Epsilon(e) => e * ll,
            ConcentrationMode::SqrtThreshold(g) => g * ll.sqrt(),
        };
        if dev >= bar {
            exceptional += 1;
        }
    })?;
    Ok(ConcentrationReport {
        x,
        h,
        mode,
        exceptional_count: exceptional,
        population_count: population,
        fraction: if population == 0 {
            0.0
        } else {
            exceptional as f64 / population as f64
        },
    })
}

/// One grid point of any exact-vs-predicted comparison.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualPoint {
    pub x: u64,
    pub exact: f64,
    pub predicted: f64,
    pub residual: f64,
    pub normalized_residual: f64,
}

impl From<&MomentReport> for ResidualPoint {
    fn from(r: &MomentReport) -> Self {
        ResidualPoint {
            x: r.x,
            exact: r.exact_sum as f64,
            predicted: r.predicted,
            residual: r.residual,
            normalized_residual: r.normalized_residual,
        }
    }
}

impl From<&PrimeSumReport> for ResidualPoint {
    fn from(r: &PrimeSumReport) -> Self {
        ResidualPoint {
            x: r.x,
            exact: r.exact,
            predicted: r.predicted,
            residual: r.residual,
            normalized_residual: r.normalized_residual,
        }
    }
}

impl From<&VarianceReport> for ResidualPoint {
    fn from(r: &VarianceReport) -> Self {
        ResidualPoint {
            x: r.x,
            exact: r.exact_variance_sum,
            predicted: r.predicted,
            residual: r.residual,
            normalized_residual: r.normalized_residual,
        }
    }
}

impl From<&crate::counting::CountComparison> for ResidualPoint {
    fn from(r: &crate::counting::CountComparison) -> Self {
        ResidualPoint {
            x: r.x,
            exact: r.exact as f64,
            predicted: r.predicted,
            residual: r.residual,
            normalized_residual: r.normalized_residual,
        }
    }
}

/// Normalized residuals across a geometric grid; the boundedness harness.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualSeries {
    pub points: Vec<ResidualPoint>,
    pub max_abs_normalized: f64,
}

impl ResidualSeries {
    /// Non-explosion heuristic: the last |normalized residual| is at most
    /// twice the grid median of |normalized residual|.
    pub fn last_within_twice_median(&self) -> bool {
        let mut mags: Vec<f64> = self
            .points
            .iter()
            .map(|p| p.normalized_residual.abs())
            .collect();
        let last = match mags.last() {
            Some(&v) => v,
            None => return true,
        };
        mags.sort_by(f64::total_cmp);
        let median = mags[mags.len() / 2];
        last <= 2.0 * median
    }
}

/// Evaluate `point` across a geometric grid (at least 4 points, each at
/// least double the previous) and collect normalized residuals.
pub fn residual_series<F>(grid: &[u64], point: F) -> Result<ResidualSeries>
where
    F: Fn(u64) -> Result<ResidualPoint>,
{
    if grid.len() < 4 || grid.windows(2).any(|w| w[1] < w[0].saturating_mul(2)) {
        return Err(Error::BadGrid { min: 4 });
    }
    let points = grid.iter().map(|&x| point(x)).collect::<Result<Vec<_>>>()?;
    let max_abs_normalized = points
        .iter()
        .map(|p| p.normalized_residual.abs())
        .fold(0.0, f64::max);
    Ok(ResidualSeries {
        points,
        max_abs_normalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::factorize;

    fn small_bundle(h: u32) -> ConstantBundle {
        ConstantBundle::compute(h, 100_000, 100_000).unwrap()
    }

    /// brute-force moment sum over factorize, independent of the sieve
    fn brute_moment(x: u64, h: u32, population: Population, statistic: Statistic, power: u8) -> u128 {
        let mut total = 0u128;
        for n in 1..=x {
            let f = factorize(n as u128).unwrap();
            let keep = match population {
                Population::All => true,
                Population::HFree => f.max_exponent() < h,
                Population::HFull => f.min_exponent().is_none_or(|m| m >= h),
            };
            if keep {
                let v = match statistic {
                    Statistic::Omega => f.omega() as u128,
                    Statistic::BigOmega => f.big_omega() as u128,
                };
                total += if power == 2 { v * v } else { v };
            }
        }
        total
    }

    #[test]
    fn exact_sums_match_brute_force() {
        for &(pop, stat, power) in &[
            (Population::All, Statistic::Omega, 1u8),
            (Population::All, Statistic::BigOmega, 1),
            (Population::HFree, Statistic::Omega, 1),
            (Population::HFree, Statistic::Omega, 2),
            (Population::HFree, Statistic::BigOmega, 2),
            (Population::HFull, Statistic::Omega, 1),
            (Population::HFull, Statistic::BigOmega, 2),
        ] {
            let got = exact_moment_sum(3000, 2, pop, stat, power).unwrap();
            let want = brute_moment(3000, 2, pop, stat, power);
            assert_eq!(got, want, "{pop:?} {stat:?} ^{power}");
        }
    }

    #[test]
    fn hand_counted_small_moments() {
        // squarefree n <= 10: 1,2,3,5,6,7,10 with omega 0,1,1,1,2,1,2
        assert_eq!(
            exact_moment_sum(10, 2, Population::HFree, Statistic::Omega, 1).unwrap(),
            8
        );
        assert_eq!(
            exact_moment_sum(10, 2, Population::HFree, Statistic::Omega, 2).unwrap(),
            12
        );
        // squarefull n <= 100: ten with omega 1, three with omega 2
        assert_eq!(
            exact_moment_sum(100, 2, Population::HFull, Statistic::Omega, 1).unwrap(),
            16
        );
        assert_eq!(
            exact_moment_sum(100, 2, Population::HFull, Statistic::BigOmega, 1).unwrap(),
            46
        );
    }

    #[test]
    fn second_moment_dominates_first() {
        let b = small_bundle(2);
        for &pop in &[Population::HFree, Population::HFull] {
            let m1 = moment(&b, 5000, pop, Statistic::Omega, 1).unwrap();
            let m2 = moment(&b, 5000, pop, Statistic::Omega, 2).unwrap();
            assert!(m2.exact_sum >= m1.exact_sum);
        }
    }

    #[test]
    fn invalid_combinations_rejected() {
        let b = small_bundle(2);
        assert!(matches!(
            moment(&b, 100, Population::All, Statistic::Omega, 2),
            Err(Error::InvalidCombination { .. })
        ));
        assert!(moment(&b, 100, Population::All, Statistic::Omega, 3).is_err());
        assert!(moment(&b, 2, Population::All, Statistic::Omega, 1).is_err());
    }

    #[test]
    fn hfull_big_omega_leading_is_h_times_omega() {
        for h in [2u32, 3] {
            let b = small_bundle(h);
            let (om, _) =
                main_term_coefficients(&b, Population::HFull, Statistic::Omega, 1).unwrap();
            let (bo, _) =
                main_term_coefficients(&b, Population::HFull, Statistic::BigOmega, 1).unwrap();
            assert!((bo.ll1 / om.ll1 - h as f64).abs() < 1e-12);
            // and the second-moment leading term carries h^2
            let (bo2, _) =
                main_term_coefficients(&b, Population::HFull, Statistic::BigOmega, 2).unwrap();
            let (om2, _) =
                main_term_coefficients(&b, Population::HFull, Statistic::Omega, 2).unwrap();
            assert!((bo2.ll2 / om2.ll2 - (h * h) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn mertens_small_and_decay() {
        let b = small_bundle(2);
        let r10 = mertens_sum(10, &b).unwrap();
        assert!((r10.exact - (0.5 + 1.0 / 3.0 + 0.2 + 1.0 / 7.0)).abs() < 1e-15);
        let r5 = mertens_sum(100_000, &b).unwrap();
        let r6 = mertens_sum(1_000_000, &b).unwrap();
        assert!(r6.residual.abs() < r5.residual.abs());
        assert!(r6.normalized_residual.abs() < 1.0);
    }

    #[test]
    fn saidak_hand_value_at_ten() {
        let b = small_bundle(2);
        let r = saidak_double_sum(10, &b).unwrap();
        // ordered pairs: (2,2),(2,3),(3,2),(2,5),(5,2),(3,3) -> 161/180
        assert!((r.exact - 161.0 / 180.0).abs() < 1e-15, "exact={}", r.exact);
        assert!(saidak_double_sum(5, &b).is_err());
    }

    #[test]
    fn saidak_sign_discrimination() {
        let b = small_bundle(2);
        let r = saidak_double_sum(100_000, &b).unwrap();
        // with the correct -zeta(2) the residual is small ...
        assert!(r.residual.abs() < 0.3, "residual={}", r.residual);
        // ... and flipping the sign shifts it by exactly 2 zeta(2)
        let flipped = r.residual - 2.0 * b.zeta_2.value;
        assert!(flipped.abs() > 2.3);
    }

    #[test]
    fn variance_small_value() {
        let b = small_bundle(2);
        let v = variance_hfull(100, &b).unwrap();
        // brute force over the 13 squarefull members of [3, 100]
        let mut want = 0.0;
        for n in 3..=100u64 {
            let f = factorize(n as u128).unwrap();
            if f.min_exponent().is_some_and(|m| m >= 2) {
                let d = f.omega() as f64 - (n as f64).ln().ln();
                want += d * d;
            }
        }
        assert!((v.exact_variance_sum - want).abs() < 1e-9);
        assert!((v.exact_variance_sum - 2.282_181_948_794_971).abs() < 1e-9);
        assert_eq!(v.excluded_count, 1);
        // the n = 4 term alone
        let term4 = (1.0 - 4f64.ln().ln()).powi(2);
        assert!((term4 - 0.4534) < 1e-3);
    }

    #[test]
    fn variance_decomposition_identity() {
        // sum (omega - lln)^2 == sum omega^2 - 2 sum omega*lln + sum lln^2
        let b = small_bundle(2);
        let x = 100_000u64;
        let v = variance_hfull(x, &b).unwrap();
        let mut s_om2 = 0.0;
        let mut s_cross = KahanSum::new();
        let mut s_ll2 = KahanSum::new();
        enumerate_h_full(x, 2, |f| {
            let n = f.n() as u64;
            if n < 3 {
                return;
            }
            let ll = (n as f64).ln().ln();
            let om = f.omega() as f64;
            s_om2 += om * om;
            s_cross.add(om * ll);
            s_ll2.add(ll * ll);
        })
        .unwrap();
        let recomposed = s_om2 - 2.0 * s_cross.value() + s_ll2.value();
        let rel = (v.exact_variance_sum - recomposed).abs() / v.exact_variance_sum.abs();
        assert!(rel < 1e-6, "relative gap {rel}");
    }

    #[test]
    fn concentration_monotone_in_epsilon() {
        let mut last_frac = f64::INFINITY;
        for eps in [0.1, 0.25, 0.5, 1.0, 2.0] {
            let r = concentration(100_000, 2, ConcentrationMode::Epsilon(eps)).unwrap();
            assert!(r.fraction <= last_frac, "eps={eps}");
            last_frac = r.fraction;
        }
    }

    #[test]
    fn concentration_huge_threshold_is_empty() {
        let r = concentration(1_000_000, 2, ConcentrationMode::SqrtThreshold(1e6)).unwrap();
        assert_eq!(r.exceptional_count, 0);
        assert_eq!(r.fraction, 0.0);
        assert!(concentration(8, 2, ConcentrationMode::Epsilon(0.5)).is_err());
        assert!(concentration(100, 2, ConcentrationMode::Epsilon(0.0)).is_err());
    }

    #[test]
    fn residual_series_grid_rules() {
        let ok = |x: u64| {
            Ok(ResidualPoint {
                x,
                exact: 0.0,
                predicted: 1.0,
                residual: -1.0,
                normalized_residual: -1.0,
            })
        };
        assert!(residual_series(&[10, 20, 40, 80], ok).is_ok());
        assert!(residual_series(&[10, 20, 40], ok).is_err());
        assert!(residual_series(&[10, 15, 40, 80], ok).is_err());
    }

    #[test]
    fn residual_series_degenerate_zero_statistic() {
        // an exact sum that is identically zero leaves residual = -predicted
        let series = residual_series(&[16, 32, 64, 128], |x| {
            let predicted = (x as f64).sqrt();
            Ok(ResidualPoint {
                x,
                exact: 0.0,
                predicted,
                residual: 0.0 - predicted,
                normalized_residual: -predicted,
            })
        })
        .unwrap();
        for p in &series.points {
            assert_eq!(p.residual, -p.predicted);
        }
    }
}
