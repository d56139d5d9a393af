//! Prime-factor statistics over h-free and h-full integers.
//!
//! An integer is h-free when every exponent in its prime factorization is
//! at most h-1, and h-full when every exponent is at least h (h = 2 gives
//! the squarefree and squarefull numbers). This crate computes the additive
//! statistics omega(n) and Omega(n) over those sets in bulk, evaluates the
//! closed-form constants appearing in their first and second moment
//! expansions, and compares exact sums against the predicted main terms
//! with residuals normalized by each expansion's error scale.
//!
//! Layout:
//! * [`factor`]: single-integer factorization, the statistics, and h-free /
//!   h-full classification (the correctness oracle for everything bulk).
//! * [`sieve`]: segmented factorization sieve over ranges and depth-first
//!   enumeration of h-full integers far beyond sieve range.
//! * [`constants`]: zeta on the real line, Mertens-type prime sums, Euler
//!   products, and the coefficient polynomial behind the h-full counting
//!   expansion, all with rigorous truncation-tail bounds.
//! * [`counting`]: exact counts of h-free / h-full integers (optionally
//!   coprime to a few primes) against their predicted expansions.
//! * [`moments`]: exact moment sums of omega / Omega over the three
//!   populations, the Mertens and prime-pair reference sums, the variance
//!   over h-full numbers, and normal-order concentration counts.
//! * [`verify`]: the acceptance checks wired together, in a quick and a
//!   full tier.

pub mod constants;
pub mod counting;
pub mod error;
pub mod factor;
pub mod moments;
pub mod primes;
pub mod sieve;
pub mod summation;
pub mod verify;

pub use error::{Error, Result};
