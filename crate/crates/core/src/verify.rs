//! The verification suite: every acceptance check, in a quick tier
//! (sub-two-minute smoke grids) and a full tier (the real grids).
//!
//! Checks that the literature leaves as big-O statements are pinned here to
//! explicit numeric thresholds, chosen once from measured behavior with
//! margin; each check reports the measured quantity, its threshold, and the
//! elapsed time, so a reviewer can see exactly what was compared.
//!
//! Expensive enumerations are shared: one factorization-sieve pass feeds the
//! density, h-free moment, and additivity checks, and one h-full DFS pass
//! feeds the counting, h-full moment, variance, and concentration checks.
//! The first criterion that needs a pass pays for it, so per-criterion
//! timings are upper bounds on standalone cost.

use crate::constants::{
    a_coefficients, gamma0_squarefull_accelerated, zeta_real, ConstantBundle,
};
use crate::counting::HFullPrediction;
use crate::error::{Error, Result};
use crate::factor::factorize;
use crate::moments::{
    main_term_coefficients, moment_from_exact, saidak_double_sum, MomentReport, Population,
    Statistic,
};
use crate::primes::for_each_prime;
use crate::sieve::{enumerate_h_full, sieve_map_reduce, sieve_range, SegmentPlan};
use crate::summation::KahanSum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Tier {
    Quick,
    Full,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyConfig {
    pub tier: Tier,
    /// Truncation prime for ordinary prime sums.
    pub fast_p: u64,
    /// Truncation prime for the slowest sums.
    pub slow_p: u64,
    /// Seed for the random sieve-vs-factorization cross-check.
    pub seed: u64,
}

impl VerifyConfig {
    pub fn quick() -> Self {
        Self {
            tier: Tier::Quick,
            fast_p: 1_000_000,
            slow_p: 10_000_000,
            seed: 0x5eed_0111,
        }
    }

    pub fn full() -> Self {
        Self {
            tier: Tier::Full,
            fast_p: 10_000_000,
            slow_p: 100_000_000,
            seed: 0x5eed_0111,
        }
    }
}

/// One check: a measured quantity against its pinned threshold.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub criterion: u8,
    pub id: String,
    pub description: String,
    pub measured: f64,
    pub threshold: f64,
    /// How measured relates to threshold when the check passes.
    pub comparison: &'static str,
    pub passed: bool,
    pub seconds: f64,
}

impl CheckResult {
    fn le(criterion: u8, id: &str, description: &str, measured: f64, threshold: f64) -> Self {
        Self {
            criterion,
            id: id.into(),
            description: description.into(),
            measured,
            threshold,
            comparison: "<=",
            passed: measured <= threshold && measured.is_finite(),
            seconds: 0.0,
        }
    }

    fn lt(criterion: u8, id: &str, description: &str, measured: f64, threshold: f64) -> Self {
        Self {
            criterion,
            id: id.into(),
            description: description.into(),
            measured,
            threshold,
            comparison: "<",
            passed: measured < threshold && measured.is_finite(),
            seconds: 0.0,
        }
    }

    fn ge(criterion: u8, id: &str, description: &str, measured: f64, threshold: f64) -> Self {
        Self {
            criterion,
            id: id.into(),
            description: description.into(),
            measured,
            threshold,
            comparison: ">=",
            passed: measured >= threshold && measured.is_finite(),
            seconds: 0.0,
        }
    }
}

struct Grids {
    /// h-free moment grid (also carries density and additivity captures).
    sieve_grid: Vec<u64>,
    /// x values for the exact additivity identity.
    identity_xs: Vec<u64>,
    /// x for the h-free density check.
    density_x: u64,
    /// h-full moment grid (h = 2).
    dfs_grid: Vec<u64>,
    /// variance / concentration grid.
    var_grid: Vec<u64>,
    /// two-term counting grid.
    count_grid: Vec<u64>,
    /// number of 100-wide random windows for the sieve cross-check.
    random_windows: usize,
}

impl Grids {
    fn for_tier(tier: Tier) -> Self {
        match tier {
            Tier::Full => Grids {
                sieve_grid: vec![10_000, 100_000, 1_000_000, 10_000_000],
                identity_xs: vec![1_000, 100_000, 10_000_000],
                density_x: 10_000_000,
                dfs_grid: vec![
                    100_000_000,
                    1_000_000_000,
                    10_000_000_000,
                    100_000_000_000,
                ],
                var_grid: vec![100_000_000, 1_000_000_000, 10_000_000_000],
                count_grid: vec![1_000_000, 100_000_000, 10_000_000_000],
                random_windows: 100,
            },
            Tier::Quick => Grids {
                sieve_grid: vec![1_000, 10_000, 100_000, 1_000_000],
                identity_xs: vec![1_000, 100_000, 1_000_000],
                density_x: 1_000_000,
                dfs_grid: vec![10_000_000, 100_000_000, 1_000_000_000, 10_000_000_000],
                var_grid: vec![10_000_000, 100_000_000, 1_000_000_000],
                count_grid: vec![1_000_000, 10_000_000, 100_000_000],
                random_windows: 20,
            },
        }
    }
}

// Pinned thresholds. Where the acceptance statement names a number, that
// number appears verbatim; where it only asserts boundedness, the pin is
// twice the magnitude measured for the proved omega laws on the full grid.
const GAMMA_DUAL_TOL: f64 = 1e-9;
const IDENTITY_CLOSURE_TOL: f64 = 1e-12;
const DENSITY_TOL: f64 = 5e-4;
const COUNT_TWO_TERM_MAX: f64 = 1.0;
const SAIDAK_NORMALIZED_MAX: f64 = 3.0;
const SAIDAK_SIGN_GAP: f64 = 2.3;
const HFREE_NR_MAX: f64 = 10.0;
const HFULL_M1_NR_MAX: f64 = 35.0;
const HFULL_M2_NR_MAX: f64 = 60.0;
const NON_EXPLOSION_RATIO: f64 = 2.0;
const VARIANCE_NR_MAX: f64 = 10.0;
const COEFF_IDENTITY_TOL: f64 = 1e-12;

/// Per-criterion wall-clock budgets, seconds.
const TIME_BUDGETS: [f64; 10] = [5.0, 1.0, 30.0, 120.0, 60.0, 300.0, 600.0, 600.0, 600.0, 120.0];

// ---------------------------------------------------------------------------
// Shared harvests
// ---------------------------------------------------------------------------

/// Running sums captured at each point of a sorted grid by one sieve pass.
struct SieveHarvest {
    points: Vec<u64>,
    /// cumulative moment sums, indexed [point][h: 2|3][stat][power-1]
    moments: Vec<[[[u128; 2]; 2]; 2]>,
    all_omega: Vec<u128>,
    free2: Vec<u64>,
    free2_odd: Vec<u64>,
}

fn harvest_sieve(points_in: &[u64]) -> Result<SieveHarvest> {
    let mut points = points_in.to_vec();
    points.sort_unstable();
    points.dedup();
    let x_max = *points.last().expect("nonempty grid");
    let k = points.len();
    let plan = SegmentPlan::with_defaults(1, x_max)?;

    #[derive(Clone)]
    struct Buckets {
        moments: Vec<[[[u128; 2]; 2]; 2]>,
        all_omega: Vec<u128>,
        free2: Vec<u64>,
        free2_odd: Vec<u64>,
    }
    let zero = Buckets {
        moments: vec![[[[0; 2]; 2]; 2]; k],
        all_omega: vec![0; k],
        free2: vec![0; k],
        free2_odd: vec![0; k],
    };
    let points_ref = &points;
    let merged = sieve_map_reduce(
        &plan,
        |segment| {
            let mut b = zero.clone();
            for r in segment {
                let idx = points_ref.partition_point(|&g| g < r.n);
                if idx >= k {
                    continue;
                }
                let om = r.omega as u128;
                let bg = r.big_omega as u128;
                b.all_omega[idx] += om;
                for (hi, h) in [2u32, 3].into_iter().enumerate() {
                    if r.is_h_free(h) {
                        b.moments[idx][hi][0][0] += om;
                        b.moments[idx][hi][0][1] += om * om;
                        b.moments[idx][hi][1][0] += bg;
                        b.moments[idx][hi][1][1] += bg * bg;
                    }
                }
                if r.is_h_free(2) {
                    b.free2[idx] += 1;
                    if r.n % 2 == 1 {
                        b.free2_odd[idx] += 1;
                    }
                }
            }
            b
        },
        |mut a, b| {
            for i in 0..k {
                for hi in 0..2 {
                    for si in 0..2 {
                        for pi in 0..2 {
                            a.moments[i][hi][si][pi] += b.moments[i][hi][si][pi];
                        }
                    }
                }
                a.all_omega[i] += b.all_omega[i];
                a.free2[i] += b.free2[i];
                a.free2_odd[i] += b.free2_odd[i];
            }
            a
        },
    )
    .expect("at least one segment");

    // turn per-bucket contributions into cumulative snapshots
    let mut h = SieveHarvest {
        points,
        moments: merged.moments,
        all_omega: merged.all_omega,
        free2: merged.free2,
        free2_odd: merged.free2_odd,
    };
    for i in 1..k {
        for hi in 0..2 {
            for si in 0..2 {
                for pi in 0..2 {
                    h.moments[i][hi][si][pi] += h.moments[i - 1][hi][si][pi];
                }
            }
        }
        h.all_omega[i] += h.all_omega[i - 1];
        h.free2[i] += h.free2[i - 1];
        h.free2_odd[i] += h.free2_odd[i - 1];
    }
    Ok(h)
}

impl SieveHarvest {
    fn index_of(&self, x: u64) -> usize {
        self.points
            .binary_search(&x)
            .expect("x is a harvest point")
    }

    fn moment_sum(&self, x: u64, h: u32, stat: Statistic, power: u8) -> u128 {
        let hi = if h == 2 { 0 } else { 1 };
        let si = match stat {
            Statistic::Omega => 0,
            Statistic::BigOmega => 1,
        };
        self.moments[self.index_of(x)][hi][si][power as usize - 1]
    }
}

/// Counts and sums over h-full (h = 2) integers captured at grid points by
/// one DFS pass.
struct DfsHarvest {
    points: Vec<u64>,
    count: Vec<u64>,
    omega: Vec<u128>,
    omega2: Vec<u128>,
    big_omega: Vec<u128>,
    big_omega2: Vec<u128>,
    /// sum over n >= 3 of (omega - loglog n)^2
    variance: Vec<f64>,
    /// exceptional members at epsilon = 1/2, population n >= 3
    exceptional: Vec<u64>,
    population: Vec<u64>,
}

const CONCENTRATION_EPSILON: f64 = 0.5;

fn harvest_dfs(points_in: &[u64]) -> Result<DfsHarvest> {
    let mut points = points_in.to_vec();
    points.sort_unstable();
    points.dedup();
    let x_max = *points.last().expect("nonempty grid");
    let k = points.len();
    let mut count = vec![0u64; k];
    let mut omega = vec![0u128; k];
    let mut omega2 = vec![0u128; k];
    let mut big_omega = vec![0u128; k];
    let mut big_omega2 = vec![0u128; k];
    let mut variance = vec![KahanSum::new(); k];
    let mut exceptional = vec![0u64; k];
    let mut population = vec![0u64; k];
    enumerate_h_full(x_max, 2, |f| {
        let n = f.n() as u64;
        let idx = points.partition_point(|&g| g < n);
        debug_assert!(idx < k);
        let om = f.omega() as u128;
        let bg = f.big_omega() as u128;
        count[idx] += 1;
        omega[idx] += om;
        omega2[idx] += om * om;
        big_omega[idx] += bg;
        big_omega2[idx] += bg * bg;
        if n >= 3 {
            let ll = (n as f64).ln().ln();
            let dev = f.omega() as f64 - ll;
            variance[idx].add(dev * dev);
            population[idx] += 1;
            if dev.abs() >= CONCENTRATION_EPSILON * ll {
                exceptional[idx] += 1;
            }
        }
    })?;
    // cumulative
    for i in 1..k {
        count[i] += count[i - 1];
        omega[i] += omega[i - 1];
        omega2[i] += omega2[i - 1];
        big_omega[i] += big_omega[i - 1];
        big_omega2[i] += big_omega2[i - 1];
        let prev = variance[i - 1];
        variance[i].merge(prev);
        exceptional[i] += exceptional[i - 1];
        population[i] += population[i - 1];
    }
    Ok(DfsHarvest {
        points,
        count,
        omega,
        omega2,
        big_omega,
        big_omega2,
        variance: variance.into_iter().map(|v| v.value()).collect(),
        exceptional,
        population,
    })
}

impl DfsHarvest {
    fn index_of(&self, x: u64) -> usize {
        self.points.binary_search(&x).expect("x is a harvest point")
    }

    fn moment_sum(&self, x: u64, stat: Statistic, power: u8) -> u128 {
        let i = self.index_of(x);
        match (stat, power) {
            (Statistic::Omega, 1) => self.omega[i],
            (Statistic::Omega, 2) => self.omega2[i],
            (Statistic::BigOmega, 1) => self.big_omega[i],
            (Statistic::BigOmega, 2) => self.big_omega2[i],
            _ => unreachable!("power is 1 or 2"),
        }
    }
}

// ---------------------------------------------------------------------------
// Session
// ---------------------------------------------------------------------------

/// Lazily-computed shared state for a verification run.
pub struct Session {
    config: VerifyConfig,
    grids: Grids,
    bundle2: Option<ConstantBundle>,
    bundle3: Option<ConstantBundle>,
    sieve: Option<SieveHarvest>,
    dfs: Option<DfsHarvest>,
}

impl Session {
    pub fn new(config: VerifyConfig) -> Self {
        let grids = Grids::for_tier(config.tier);
        Session {
            config,
            grids,
            bundle2: None,
            bundle3: None,
            sieve: None,
            dfs: None,
        }
    }

    pub fn config(&self) -> &VerifyConfig {
        &self.config
    }

    fn bundle2(&mut self) -> Result<&ConstantBundle> {
        if self.bundle2.is_none() {
            self.bundle2 = Some(ConstantBundle::compute(
                2,
                self.config.fast_p,
                self.config.slow_p,
            )?);
        }
        Ok(self.bundle2.as_ref().unwrap())
    }

    fn bundle3(&mut self) -> Result<&ConstantBundle> {
        if self.bundle3.is_none() {
            self.bundle3 = Some(ConstantBundle::compute(
                3,
                self.config.fast_p,
                self.config.slow_p,
            )?);
        }
        Ok(self.bundle3.as_ref().unwrap())
    }

    fn sieve(&mut self) -> Result<&SieveHarvest> {
        if self.sieve.is_none() {
            let mut points = self.grids.sieve_grid.clone();
            points.extend_from_slice(&self.grids.identity_xs);
            points.push(self.grids.density_x);
            self.sieve = Some(harvest_sieve(&points)?);
        }
        Ok(self.sieve.as_ref().unwrap())
    }

    fn dfs(&mut self) -> Result<&DfsHarvest> {
        if self.dfs.is_none() {
            let mut points = self.grids.dfs_grid.clone();
            points.extend_from_slice(&self.grids.var_grid);
            points.extend_from_slice(&self.grids.count_grid);
            self.dfs = Some(harvest_dfs(&points)?);
        }
        Ok(self.dfs.as_ref().unwrap())
    }

    /// Run one criterion (1..=10).
    pub fn run_criterion(&mut self, n: u8) -> Result<Vec<CheckResult>> {
        let started = Instant::now();
        let mut checks = match n {
            1 => self.criterion_gamma_dual()?,
            2 => self.criterion_coefficient_identity()?,
            3 => self.criterion_density()?,
            4 => self.criterion_two_term_count()?,
            5 => self.criterion_prime_pair_sum()?,
            6 => self.criterion_hfree_omega()?,
            7 => self.criterion_hfull_omega()?,
            8 => self.criterion_big_omega()?,
            9 => self.criterion_variance_concentration()?,
            10 => self.criterion_exact_identities()?,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "criterion must be 1..=10, got {n}"
                )))
            }
        };
        let elapsed = started.elapsed().as_secs_f64();
        for c in &mut checks {
            c.seconds = elapsed;
        }
        checks.push(CheckResult::le(
            n,
            &format!("{n}t"),
            "wall-clock seconds within budget",
            elapsed,
            TIME_BUDGETS[n as usize - 1],
        ));
        if let Some(last) = checks.last_mut() {
            last.seconds = elapsed;
        }
        Ok(checks)
    }

    /// Run all ten criteria in order.
    pub fn run_all(&mut self) -> Result<Vec<CheckResult>> {
        let mut out = Vec::new();
        for n in 1..=10 {
            out.extend(self.run_criterion(n)?);
        }
        Ok(out)
    }

    // -- criterion bodies ----------------------------------------------------

    fn criterion_gamma_dual(&mut self) -> Result<Vec<CheckResult>> {
        let via_product = gamma0_squarefull_accelerated()?;
        let via_zeta = zeta_real(1.5)?.value / zeta_real(3.0)?.value;
        Ok(vec![CheckResult::le(
            1,
            "1a",
            "gamma0 (h=2) Euler product vs zeta(3/2)/zeta(3)",
            (via_product.value - via_zeta).abs(),
            GAMMA_DUAL_TOL,
        )])
    }

    fn criterion_coefficient_identity(&mut self) -> Result<Vec<CheckResult>> {
        let p2 = a_coefficients(2)?;
        let mut violations = 0u32;
        if p2.degree() != 6 || p2.coefficient(0) != 1 || p2.coefficient(6) != -1 {
            violations += 1;
        }
        violations += p2.corrections().count() as u32;
        let trivial = CheckResult::le(
            2,
            "2a",
            "h=2 expansion is exactly 1 - v^6",
            violations as f64,
            0.0,
        );

        let mut structure_violations = 0u32;
        let mut worst_closure = 0.0f64;
        for h in 3..=8u32 {
            let poly = a_coefficients(h)?;
            let bound = (3 * h * h + h - 2) as usize / 2;
            if poly.degree() != bound {
                structure_violations += 1;
            }
            if poly.max_abs_correction() > h as i64 * (1 << h) {
                structure_violations += 1;
            }
            let gap = (poly.eval_product_form(0.5) - poly.eval(0.5)).abs();
            worst_closure = worst_closure.max(gap);
        }
        Ok(vec![
            trivial,
            CheckResult::le(
                2,
                "2b",
                "degree and |a| bounds hold for h = 3..8",
                structure_violations as f64,
                0.0,
            ),
            CheckResult::le(
                2,
                "2c",
                "identity closes numerically at v = 1/2",
                worst_closure,
                IDENTITY_CLOSURE_TOL,
            ),
        ])
    }

    fn criterion_density(&mut self) -> Result<Vec<CheckResult>> {
        let x = self.grids.density_x;
        let inv_zeta2 = 1.0 / zeta_real(2.0)?.value;
        let harvest = self.sieve()?;
        let i = harvest.index_of(x);
        let dens = harvest.free2[i] as f64 / x as f64;
        let dens_odd = harvest.free2_odd[i] as f64 / x as f64;
        Ok(vec![
            CheckResult::le(
                3,
                "3a",
                &format!("|squarefree density at {x} - 1/zeta(2)|"),
                (dens - inv_zeta2).abs(),
                DENSITY_TOL,
            ),
            CheckResult::le(
                3,
                "3b",
                &format!("|odd squarefree density at {x} - (2/3)/zeta(2)|"),
                (dens_odd - (2.0 / 3.0) * inv_zeta2).abs(),
                DENSITY_TOL,
            ),
        ])
    }

    fn criterion_two_term_count(&mut self) -> Result<Vec<CheckResult>> {
        let grid = self.grids.count_grid.clone();
        let prediction = HFullPrediction::new(2, &[], self.config.fast_p)?;
        let harvest = self.dfs()?;
        let mut nrs = Vec::new();
        for &x in &grid {
            let exact = harvest.count[harvest.index_of(x)];
            let resid = exact as f64 - prediction.eval(x as f64);
            nrs.push((resid / (x as f64).powf(1.0 / 3.0)).abs());
        }
        let worst_increase = nrs
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(vec![
            CheckResult::le(
                4,
                "4a",
                "two-term h-full count residual / x^(1/3)",
                nrs.iter().copied().fold(0.0, f64::max),
                COUNT_TWO_TERM_MAX,
            ),
            CheckResult::lt(
                4,
                "4b",
                "normalized count residual decreases across the grid",
                worst_increase,
                0.0,
            ),
        ])
    }

    fn criterion_prime_pair_sum(&mut self) -> Result<Vec<CheckResult>> {
        let bundle = self.bundle2()?.clone();
        let report = saidak_double_sum(1_000_000, &bundle)?;
        let sign_gap = (report.residual - 2.0 * bundle.zeta_2.value).abs();
        Ok(vec![
            CheckResult::le(
                5,
                "5a",
                "prime-pair double sum normalized residual at 1e6",
                report.normalized_residual.abs(),
                SAIDAK_NORMALIZED_MAX,
            ),
            CheckResult::ge(
                5,
                "5b",
                "flipping the zeta(2) sign pushes the residual past",
                sign_gap,
                SAIDAK_SIGN_GAP,
            ),
        ])
    }

    /// Moment reports across the sieve grid from harvested sums.
    fn hfree_series(
        &mut self,
        h: u32,
        stat: Statistic,
        power: u8,
    ) -> Result<Vec<MomentReport>> {
        let bundle = if h == 2 {
            self.bundle2()?.clone()
        } else {
            self.bundle3()?.clone()
        };
        let grid = self.grids.sieve_grid.clone();
        let harvest = self.sieve()?;
        grid.iter()
            .map(|&x| {
                let exact = harvest.moment_sum(x, h, stat, power);
                moment_from_exact(&bundle, x, Population::HFree, stat, power, exact)
            })
            .collect()
    }

    fn hfull_series(&mut self, stat: Statistic, power: u8) -> Result<Vec<MomentReport>> {
        let bundle = self.bundle2()?.clone();
        let grid = self.grids.dfs_grid.clone();
        let harvest = self.dfs()?;
        grid.iter()
            .map(|&x| {
                let exact = harvest.moment_sum(x, stat, power);
                moment_from_exact(&bundle, x, Population::HFull, stat, power, exact)
            })
            .collect()
    }

    fn criterion_hfree_omega(&mut self) -> Result<Vec<CheckResult>> {
        let mut out = Vec::new();
        for (h, max_id, ratio_id) in [(2u32, "6a", "6b"), (3, "6c", "6d")] {
            let m1 = self.hfree_series(h, Statistic::Omega, 1)?;
            let m2 = self.hfree_series(h, Statistic::Omega, 2)?;
            out.push(CheckResult::le(
                6,
                max_id,
                &format!("h={h} omega moments over h-free: max |normalized residual|"),
                max_abs_nr(&[&m1, &m2]),
                HFREE_NR_MAX,
            ));
            out.push(CheckResult::le(
                6,
                ratio_id,
                &format!("h={h} omega moments over h-free: last/median non-explosion"),
                worst_last_to_median(&[&m1, &m2]),
                NON_EXPLOSION_RATIO,
            ));
        }
        Ok(out)
    }

    fn criterion_hfull_omega(&mut self) -> Result<Vec<CheckResult>> {
        let m1 = self.hfull_series(Statistic::Omega, 1)?;
        let m2 = self.hfull_series(Statistic::Omega, 2)?;
        Ok(vec![
            CheckResult::le(
                7,
                "7a",
                "h=2 omega first moment over h-full: max |normalized residual|",
                max_abs_nr(&[&m1]),
                HFULL_M1_NR_MAX,
            ),
            CheckResult::le(
                7,
                "7b",
                "h=2 omega second moment over h-full: max |normalized residual|",
                max_abs_nr(&[&m2]),
                HFULL_M2_NR_MAX,
            ),
            CheckResult::le(
                7,
                "7c",
                "h=2 omega moments over h-full: last/median non-explosion",
                worst_last_to_median(&[&m1, &m2]),
                NON_EXPLOSION_RATIO,
            ),
        ])
    }

    fn criterion_big_omega(&mut self) -> Result<Vec<CheckResult>> {
        let mut out = Vec::new();
        for (h, id) in [(2u32, "8a"), (3, "8b")] {
            let m1 = self.hfree_series(h, Statistic::BigOmega, 1)?;
            let m2 = self.hfree_series(h, Statistic::BigOmega, 2)?;
            out.push(CheckResult::le(
                8,
                id,
                &format!("h={h} Omega moments over h-free: max |normalized residual|"),
                max_abs_nr(&[&m1, &m2]),
                HFREE_NR_MAX,
            ));
        }
        let m1 = self.hfull_series(Statistic::BigOmega, 1)?;
        let m2 = self.hfull_series(Statistic::BigOmega, 2)?;
        out.push(CheckResult::le(
            8,
            "8c",
            "h=2 Omega first moment over h-full: max |normalized residual|",
            max_abs_nr(&[&m1]),
            HFULL_M1_NR_MAX,
        ));
        out.push(CheckResult::le(
            8,
            "8d",
            "h=2 Omega second moment over h-full: max |normalized residual|",
            max_abs_nr(&[&m2]),
            HFULL_M2_NR_MAX,
        ));
        // leading-coefficient identity: Omega's h-full main terms carry h and
        // h^2 times the omega coefficients
        let mut worst = 0.0f64;
        for h in [2u32, 3] {
            let bundle = if h == 2 {
                self.bundle2()?.clone()
            } else {
                self.bundle3()?.clone()
            };
            let (om1, _) =
                main_term_coefficients(&bundle, Population::HFull, Statistic::Omega, 1)?;
            let (bo1, _) =
                main_term_coefficients(&bundle, Population::HFull, Statistic::BigOmega, 1)?;
            worst = worst.max((bo1.ll1 / om1.ll1 - h as f64).abs());
            let (om2, _) =
                main_term_coefficients(&bundle, Population::HFull, Statistic::Omega, 2)?;
            let (bo2, _) =
                main_term_coefficients(&bundle, Population::HFull, Statistic::BigOmega, 2)?;
            worst = worst.max((bo2.ll2 / om2.ll2 - (h * h) as f64).abs());
        }
        out.push(CheckResult::le(
            8,
            "8e",
            "h-full Omega leading coefficients are h and h^2 times omega's",
            worst,
            COEFF_IDENTITY_TOL,
        ));
        Ok(out)
    }

    fn criterion_variance_concentration(&mut self) -> Result<Vec<CheckResult>> {
        let bundle = self.bundle2()?.clone();
        let grid = self.grids.var_grid.clone();
        let harvest = self.dfs()?;
        let mut max_nr = 0.0f64;
        let mut fracs = Vec::new();
        for &x in &grid {
            let i = harvest.index_of(x);
            let xf = x as f64;
            let ll = xf.ln().ln();
            let root = xf.sqrt();
            let g0 = bundle.gamma0.value;
            let predicted = g0 * root * ll + bundle.d2.value * g0 * root;
            let nr = (harvest.variance[i] - predicted) / (root * ll / xf.ln());
            max_nr = max_nr.max(nr.abs());
            fracs.push(harvest.exceptional[i] as f64 / harvest.population[i] as f64);
        }
        let worst_increase = fracs
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(vec![
            CheckResult::le(
                9,
                "9a",
                "variance of omega over h-full: max |normalized residual|",
                max_nr,
                VARIANCE_NR_MAX,
            ),
            CheckResult::lt(
                9,
                "9b",
                "exceptional fraction (epsilon = 1/2) strictly decreases",
                worst_increase,
                0.0,
            ),
        ])
    }

    fn criterion_exact_identities(&mut self) -> Result<Vec<CheckResult>> {
        let xs = self.grids.identity_xs.clone();
        let harvest = self.sieve()?;
        let mut worst_gap = 0.0f64;
        for &x in &xs {
            let lhs = harvest.all_omega[harvest.index_of(x)];
            let mut rhs: u128 = 0;
            for_each_prime(x, |p| rhs += (x / p) as u128);
            worst_gap = worst_gap.max((lhs as i128 - rhs as i128).unsigned_abs() as f64);
        }
        let identity = CheckResult::lt(
            10,
            "10a",
            "sum of omega(n) equals sum of floor(x/p) exactly",
            worst_gap,
            0.5,
        );

        let windows = self.grids.random_windows;
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        let mut mismatches = 0u64;
        for _ in 0..windows {
            let lo: u64 = rng.gen_range(1..=999_999_900);
            let plan = SegmentPlan::new(lo, lo + 99, 1024, crate::sieve::DEFAULT_MEMORY_BUDGET)?;
            sieve_range(&plan, |r| {
                let f = factorize(r.n as u128).expect("positive n");
                let min = f.min_exponent().unwrap_or(u32::MAX).min(255);
                if r.omega as u32 != f.omega()
                    || r.big_omega as u32 != f.big_omega()
                    || r.max_exponent as u32 != f.max_exponent()
                    || r.min_exponent as u32 != min
                {
                    mismatches += 1;
                }
            });
        }
        Ok(vec![
            identity,
            CheckResult::lt(
                10,
                "10b",
                &format!(
                    "sieve vs single-integer factorization on {} random n below 1e9",
                    windows * 100
                ),
                mismatches as f64,
                0.5,
            ),
        ])
    }
}

fn max_abs_nr(series: &[&[MomentReport]]) -> f64 {
    series
        .iter()
        .flat_map(|s| s.iter())
        .map(|r| r.normalized_residual.abs())
        .fold(0.0, f64::max)
}

/// Worst ratio of the last |normalized residual| to the series median.
fn worst_last_to_median(series: &[&[MomentReport]]) -> f64 {
    let mut worst = 0.0f64;
    for s in series {
        let mut mags: Vec<f64> = s.iter().map(|r| r.normalized_residual.abs()).collect();
        let last = *mags.last().expect("nonempty series");
        mags.sort_by(f64::total_cmp);
        let median = mags[mags.len() / 2];
        worst = worst.max(last / median);
    }
    worst
}
