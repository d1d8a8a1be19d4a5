//! Generalized divisor functions `σ_t(n) = Σ_{d | n} d^t` and the structure of
//! the range of `σ_{-r}` inside `[1, ζ(r))`.
//!
//! The crate is organised bottom-up:
//!
//! - [`primes`]: sieve, prime-ratio checks and the explicit large-prime bound.
//! - [`analytic`]: `ζ(r)`, Euler factors, partial and tail Euler products.
//! - [`divisor`]: factorization and evaluation of `σ_t` on factored integers.
//! - [`density`]: the density criterion, the critical exponent `η`, gap intervals.
//! - [`greedy`]: the greedy construction of integers approximating a target value.
//! - [`scan`]: brute-force range tables used as an oracle.
//!
//! All analytic quantities are plain `f64` values; logarithms are natural logs.

pub mod analytic;
pub mod density;
pub mod divisor;
mod error;
pub mod format;
pub mod greedy;
pub mod primes;
pub mod scan;

pub use analytic::{euler_factor, partial_euler_product, tail_product, zeta};
pub use density::{
    critical_exponent, eta, f_value, gap_at, gap_census, is_dense, DensityReport, GapCensus,
    GapInterval,
};
pub use divisor::{factorize, log_sigma, sigma, sigma_factored, FactoredInteger};
pub use error::{Error, Result};
pub use greedy::{
    approximate_target, greedy_trace, witness, Alpha, Approximation, GreedyStep, GreedyTrace,
};
pub use primes::PrimeTable;
pub use scan::{empirical_gaps, range_scan, verify_gap_empty, CandidateGap, RangeSample};
