//! Command-line front end: computes the named constants, counting and
//! moment comparisons, the h-full variance, raw sieve dumps, and runs the
//! verification suite. Structured output goes to stdout or `--out` as CSV
//! or JSON lines; diagnostics go to stderr.

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use omega_core::constants::{
    c_rh, gamma_coefficient, l_h, ConstantBundle, ConstantValue, DEFAULT_TRUNCATION_PRIME,
    SLOW_TRUNCATION_PRIME,
};
use omega_core::counting::{count_h_free, count_h_full, s_h_partial, HFullPrediction};
use omega_core::moments::{
    concentration, moment_with, variance_hfull, ConcentrationMode, Population, Statistic,
};
use omega_core::sieve::{sieve_range, SegmentPlan, DEFAULT_MEMORY_BUDGET, DEFAULT_SEGMENT_SIZE};
use omega_core::verify::{Session, Tier, VerifyConfig};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

const THREADS_ENV: &str = "OMEGA_MOMENTS_THREADS";

#[derive(Parser)]
#[command(
    name = "omega-moments",
    version,
    about = "Prime-factor statistics over h-free and h-full integers",
    after_help = "Thread count falls back to the OMEGA_MOMENTS_THREADS environment variable."
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output format (constants defaults to json, everything else to csv).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Truncation prime for prime sums and Euler products.
    #[arg(long, global = true)]
    truncation_prime: Option<u64>,

    /// Memory budget in bytes for sieve segments.
    #[arg(long, global = true, default_value_t = DEFAULT_MEMORY_BUDGET)]
    memory_budget: u64,

    /// Seed for randomized cross-checks.
    #[arg(long, global = true, default_value_t = 0x5eed_0111)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every named constant for one h.
    Constants {
        #[arg(long)]
        h: u32,
    },
    /// Exact counts against predicted main terms.
    Counting {
        #[arg(long)]
        h: u32,
        #[arg(long, value_enum, default_value_t = CountKind::HFree)]
        kind: CountKind,
        /// Primes the counted integers must avoid (h-free / h-full kinds).
        #[arg(long, value_delimiter = ',')]
        exclude: Vec<u64>,
        #[command(flatten)]
        at: XOrGrid,
    },
    /// Exact moment sums of omega / Omega against predicted main terms.
    Moments {
        #[arg(long)]
        h: u32,
        #[arg(long, value_enum)]
        population: PopulationArg,
        #[arg(long, value_enum)]
        stat: StatArg,
        #[arg(long)]
        power: u8,
        #[command(flatten)]
        at: XOrGrid,
    },
    /// Variance of omega over h-full integers; optionally the exceptional
    /// fraction at a fixed epsilon.
    Variance {
        #[arg(long)]
        h: u32,
        #[arg(long)]
        epsilon: Option<f64>,
        #[command(flatten)]
        at: XOrGrid,
    },
    /// Raw sieve dump: one record per integer in [lo, hi].
    SieveStats {
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
    },
    /// Run the verification suite and print a pass/fail table.
    Verify {
        #[arg(long, conflicts_with = "full")]
        quick: bool,
        #[arg(long)]
        full: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CountKind {
    HFree,
    HFull,
    /// Partial sums of the representation counts behind the h-full expansion.
    SPartial,
}

#[derive(Clone, Copy, ValueEnum)]
enum PopulationArg {
    All,
    HFree,
    HFull,
}

impl From<PopulationArg> for Population {
    fn from(p: PopulationArg) -> Self {
        match p {
            PopulationArg::All => Population::All,
            PopulationArg::HFree => Population::HFree,
            PopulationArg::HFull => Population::HFull,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StatArg {
    Omega,
    BigOmega,
}

impl From<StatArg> for Statistic {
    fn from(s: StatArg) -> Self {
        match s {
            StatArg::Omega => Statistic::Omega,
            StatArg::BigOmega => Statistic::BigOmega,
        }
    }
}

/// Either a single evaluation point or a geometric grid lo:hi:factor.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct XOrGrid {
    #[arg(long)]
    x: Option<u64>,
    /// Geometric grid "lo:hi:factor", e.g. 10000:10000000:10.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<Grid>,
}

#[derive(Clone)]
struct Grid(Vec<u64>);

impl XOrGrid {
    fn points(&self) -> Vec<u64> {
        match (&self.x, &self.grid) {
            (Some(x), _) => vec![*x],
            (None, Some(g)) => g.0.clone(),
            (None, None) => unreachable!("clap group enforces one"),
        }
    }
}

fn parse_grid(raw: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        return Err("expected lo:hi:factor".into());
    }
    let lo: u64 = parts[0].parse().map_err(|e| format!("lo: {e}"))?;
    let hi: u64 = parts[1].parse().map_err(|e| format!("hi: {e}"))?;
    let factor: u64 = parts[2].parse().map_err(|e| format!("factor: {e}"))?;
    if lo == 0 || hi < lo || factor < 2 {
        return Err("need 0 < lo <= hi and factor >= 2".into());
    }
    let mut points = Vec::new();
    let mut x = lo;
    loop {
        points.push(x);
        match x.checked_mul(factor) {
            Some(next) if next <= hi => x = next,
            _ => break,
        }
    }
    Ok(Grid(points))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            // budget problems get their own exit status
            if let Some(omega_core::Error::BudgetExceeded { .. }) =
                err.downcast_ref::<omega_core::Error>()
            {
                eprintln!("error: {err}");
                return ExitCode::from(3);
            }
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    configure_threads(cli.threads)?;
    let fast_p = cli.truncation_prime.unwrap_or(DEFAULT_TRUNCATION_PRIME);
    let slow_p = cli.truncation_prime.unwrap_or(SLOW_TRUNCATION_PRIME);
    let mut sink: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(
            std::fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?,
        ),
        None => Box::new(std::io::stdout().lock()),
    };

    match cli.command {
        Command::Constants { h } => {
            let format = cli.format.unwrap_or(Format::Json);
            let values = collect_constants(h, fast_p, slow_p)?;
            if format == Format::Csv {
                writeln!(sink, "name,h,value,truncation_prime,tail_bound")?;
                for c in &values {
                    writeln!(
                        sink,
                        "{},{},{},{},{}",
                        c.name,
                        c.h.map_or(String::new(), |h| h.to_string()),
                        c.value,
                        c.truncation_prime,
                        c.tail_bound
                    )?;
                }
            } else {
                for c in &values {
                    writeln!(sink, "{}", serde_json::to_string(c)?)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Counting {
            h,
            kind,
            exclude,
            at,
        } => {
            let format = cli.format.unwrap_or(Format::Csv);
            let points = at.points();
            if format == Format::Csv {
                writeln!(sink, "x,h,excluded,exact,predicted,residual,normalized_residual")?;
            }
            let prediction = match kind {
                CountKind::HFull => Some(HFullPrediction::new(h, &exclude, fast_p)?),
                _ => None,
            };
            for x in points {
                let report = match kind {
                    CountKind::HFree => {
                        let plan =
                            SegmentPlan::new(1, x, DEFAULT_SEGMENT_SIZE, cli.memory_budget)?;
                        count_h_free(x, h, &exclude, &plan)?
                    }
                    CountKind::HFull => count_h_full(x, prediction.as_ref().unwrap())?,
                    CountKind::SPartial => {
                        if !exclude.is_empty() {
                            return Err(anyhow!("--exclude does not apply to s-partial"));
                        }
                        s_h_partial(x, h)?
                    }
                };
                if format == Format::Csv {
                    let excl = report
                        .excluded
                        .iter()
                        .map(|q| q.to_string())
                        .collect::<Vec<_>>()
                        .join(";");
                    writeln!(
                        sink,
                        "{},{},{},{},{},{},{}",
                        report.x,
                        report.h,
                        excl,
                        report.exact,
                        report.predicted,
                        report.residual,
                        report.normalized_residual
                    )?;
                } else {
                    writeln!(sink, "{}", serde_json::to_string(&report)?)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Moments {
            h,
            population,
            stat,
            power,
            at,
        } => {
            let format = cli.format.unwrap_or(Format::Csv);
            let bundle = ConstantBundle::compute(h, fast_p, slow_p)?;
            if format == Format::Csv {
                writeln!(
                    sink,
                    "x,h,population,statistic,power,exact,predicted,residual,normalized_residual"
                )?;
            }
            for x in at.points() {
                let report = moment_with(
                    &bundle,
                    x,
                    population.into(),
                    stat.into(),
                    power,
                    DEFAULT_SEGMENT_SIZE,
                    cli.memory_budget,
                )?;
                if format == Format::Csv {
                    writeln!(
                        sink,
                        "{},{},{},{},{},{},{},{},{}",
                        report.x,
                        report.h,
                        report.population,
                        report.statistic,
                        report.power,
                        report.exact_sum,
                        report.predicted,
                        report.residual,
                        report.normalized_residual
                    )?;
                } else {
                    writeln!(sink, "{}", serde_json::to_string(&report)?)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Variance { h, epsilon, at } => {
            let format = cli.format.unwrap_or(Format::Csv);
            let bundle = ConstantBundle::compute(h, fast_p, slow_p)?;
            let points = at.points();
            if format == Format::Csv {
                writeln!(
                    sink,
                    "x,h,exact_variance_sum,predicted,residual,normalized_residual,excluded_count"
                )?;
            }
            for &x in &points {
                let report = variance_hfull(x, &bundle)?;
                if format == Format::Csv {
                    writeln!(
                        sink,
                        "{},{},{},{},{},{},{}",
                        report.x,
                        report.h,
                        report.exact_variance_sum,
                        report.predicted,
                        report.residual,
                        report.normalized_residual,
                        report.excluded_count
                    )?;
                } else {
                    writeln!(sink, "{}", serde_json::to_string(&report)?)?;
                }
            }
            if let Some(eps) = epsilon {
                if format == Format::Csv {
                    writeln!(sink, "x,h,epsilon,exceptional,population,fraction")?;
                }
                for &x in &points {
                    let report = concentration(x, h, ConcentrationMode::Epsilon(eps))?;
                    if format == Format::Csv {
                        writeln!(
                            sink,
                            "{},{},{},{},{},{}",
                            report.x,
                            report.h,
                            eps,
                            report.exceptional_count,
                            report.population_count,
                            report.fraction
                        )?;
                    } else {
                        writeln!(sink, "{}", serde_json::to_string(&report)?)?;
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::SieveStats { lo, hi } => {
            let format = cli.format.unwrap_or(Format::Csv);
            let plan = SegmentPlan::new(lo, hi, DEFAULT_SEGMENT_SIZE, cli.memory_budget)?;
            if format == Format::Csv {
                writeln!(sink, "n,omega,big_omega,max_exp,min_exp")?;
            }
            let mut io_err = None;
            let emitted = sieve_range(&plan, |r| {
                if io_err.is_some() {
                    return;
                }
                let res = if format == Format::Csv {
                    writeln!(
                        sink,
                        "{},{},{},{},{}",
                        r.n, r.omega, r.big_omega, r.max_exponent, r.min_exponent
                    )
                } else {
                    serde_json::to_string(r)
                        .map_err(std::io::Error::other)
                        .and_then(|s| writeln!(sink, "{s}"))
                };
                if let Err(e) = res {
                    io_err = Some(e);
                }
            });
            if let Some(e) = io_err {
                return Err(e.into());
            }
            eprintln!("emitted {emitted} records");
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { quick: _, full } => {
            let tier = if full { Tier::Full } else { Tier::Quick };
            let mut config = if full {
                VerifyConfig::full()
            } else {
                VerifyConfig::quick()
            };
            if let Some(p) = cli.truncation_prime {
                config.fast_p = p;
                config.slow_p = p;
            }
            config.seed = cli.seed;
            let mut session = Session::new(config);
            let results = session.run_all()?;
            let format = cli.format.unwrap_or(Format::Csv);
            if format == Format::Json {
                writeln!(sink, "{}", serde_json::to_string_pretty(&results)?)?;
            } else {
                writeln!(
                    sink,
                    "{:<5} {:<6} {:>13} {:<2} {:>10} {:>8}  description",
                    "check", "result", "measured", "", "threshold", "sec"
                )?;
                for r in &results {
                    writeln!(
                        sink,
                        "{:<5} {:<6} {:>13.6e} {:<2} {:>10.3e} {:>8.2}  {}",
                        r.id,
                        if r.passed { "PASS" } else { "FAIL" },
                        r.measured,
                        r.comparison,
                        r.threshold,
                        r.seconds,
                        r.description
                    )?;
                }
                let passed = results.iter().filter(|r| r.passed).count();
                let mut failed_criteria: Vec<u8> = results
                    .iter()
                    .filter(|r| !r.passed)
                    .map(|r| r.criterion)
                    .collect();
                failed_criteria.dedup();
                writeln!(
                    sink,
                    "checks passed: {passed}/{} ({} tier)",
                    results.len(),
                    match tier {
                        Tier::Quick => "quick",
                        Tier::Full => "full",
                    }
                )?;
                if !failed_criteria.is_empty() {
                    writeln!(sink, "failing criteria: {failed_criteria:?}")?;
                }
            }
            if results.iter().all(|r| r.passed) {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::FAILURE)
            }
        }
    }
}

fn configure_threads(arg: Option<usize>) -> anyhow::Result<()> {
    let from_env = || {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
    };
    if let Some(n) = arg.or_else(from_env) {
        if n == 0 {
            return Err(anyhow!("thread count must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("initializing thread pool")?;
    }
    Ok(())
}

fn collect_constants(h: u32, fast_p: u64, slow_p: u64) -> anyhow::Result<Vec<ConstantValue>> {
    let bundle = ConstantBundle::compute(h, fast_p, slow_p)?;
    let mut values: Vec<ConstantValue> = bundle.listed().into_iter().cloned().collect();
    for i in 1..h {
        values.push(gamma_coefficient(i, h, &[], fast_p)?);
    }
    values.push(l_h(h, h + 1, slow_p)?);
    values.push(l_h(h, 2 * h, fast_p)?);
    for r in h..2 * h {
        values.push(c_rh(r, h)?);
    }
    Ok(values)
}
