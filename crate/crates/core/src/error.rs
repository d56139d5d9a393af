use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("n must be positive")]
    ZeroInput,

    #[error("h must be at least 2 (got {0})")]
    HTooSmall(u32),

    #[error("h must be at most {max} for coefficient expansion (got {h})")]
    HTooLarge { h: u32, max: u32 },

    #[error("zeta argument must be positive and away from the pole at 1 (got {0})")]
    ZetaDomain(f64),

    #[error("truncation prime must be at least {min} (got {got})")]
    TruncationTooSmall { got: u64, min: u64 },

    #[error("tail majorant exponent must exceed 1 (got {0})")]
    TailExponent(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Euler product local factor vanishes at p={p} for s={s}")]
    LocalFactorVanishes { p: u64, s: f64 },

    #[error("coefficient identity failed to close: nonzero coefficient {coeff} at degree {degree} (bound {bound})")]
    IdentityOverflow { degree: usize, bound: usize, coeff: i64 },

    #[error("range [{lo}, {hi}] needs {needed} bytes, over the {budget}-byte budget")]
    BudgetExceeded { lo: u64, hi: u64, needed: u64, budget: u64 },

    #[error("invalid range: lo={lo}, hi={hi}")]
    InvalidRange { lo: u64, hi: u64 },

    #[error("no asymptotic law for population={population}, statistic={statistic}, power={power}")]
    InvalidCombination {
        population: &'static str,
        statistic: &'static str,
        power: u8,
    },

    #[error("x too small: {got} (need at least {min})")]
    XTooSmall { got: u64, min: u64 },

    #[error("grid must grow geometrically (factor >= 2) with at least {min} points")]
    BadGrid { min: usize },

    #[error("excluded primes must be distinct primes (got {0})")]
    BadExcludedPrime(u64),
}

pub type Result<T> = std::result::Result<T, Error>;
