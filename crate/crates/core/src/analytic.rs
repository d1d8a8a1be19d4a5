//! Riemann zeta at real arguments and Euler-product pieces.
//!
//! `ζ(r)` is evaluated by Euler–Maclaurin summation: the Dirichlet series is
//! summed exactly up to `N - 1 = 63`, the remainder is replaced by its
//! integral, the half end term and six Bernoulli corrections. The truncation
//! error of the last omitted correction is below `1e-30` on the whole domain,
//! so the result is limited only by binary64 rounding (a few ulps of `ζ(r)`).

use crate::error::{Error, Result};
use crate::primes::PrimeTable;

/// Smallest accepted argument of [`zeta`].
pub const ZETA_MIN_ARG: f64 = 1.0 + 1e-6;
/// Largest accepted argument of [`zeta`].
pub const ZETA_MAX_ARG: f64 = 64.0;

const EM_CUTOFF: u32 = 64;

/// `B_{2k} / (2k)!` for `k = 1..=6`.
const BERNOULLI_OVER_FACTORIAL: [f64; 6] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
];

pub(crate) fn check_zeta_domain(r: f64) -> Result<()> {
    if (ZETA_MIN_ARG..=ZETA_MAX_ARG).contains(&r) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "r must lie in [{ZETA_MIN_ARG}, {ZETA_MAX_ARG}], got {r}"
        )))
    }
}

/// `ζ(r)` for real `r` in `[1 + 1e-6, 64]`.
pub fn zeta(r: f64) -> Result<f64> {
    Ok(1.0 + zeta_minus_one(r)?)
}

/// `ζ(r) - 1`, with full relative precision even when `ζ(r)` rounds to 1.
pub fn zeta_minus_one(r: f64) -> Result<f64> {
    check_zeta_domain(r)?;
    let n = EM_CUTOFF as f64;
    let n_pow = n.powf(-r);

    // Correction terms shrink fastest, add them first.
    let mut corrections = 0.0;
    let mut rising = r;
    let mut n_pow_k = n_pow / n;
    for (k, coeff) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if k > 0 {
            let j = 2.0 * k as f64;
            rising *= (r + j - 1.0) * (r + j);
            n_pow_k /= n * n;
        }
        corrections += coeff * rising * n_pow_k;
    }
    let mut sum = corrections + 0.5 * n_pow + n * n_pow / (r - 1.0);
    for k in (2..EM_CUTOFF).rev() {
        sum += (k as f64).powf(-r);
    }
    Ok(sum)
}

/// The Euler factor `Σ_{j>=0} p^{-jr} = 1 / (1 - p^{-r})`, in closed form.
///
/// Requires `r > 1`.
pub fn euler_factor(p: u64, r: f64) -> f64 {
    debug_assert!(r > 1.0);
    1.0 / (1.0 - (p as f64).powf(-r))
}

/// Natural log of [`euler_factor`].
pub fn log_euler_factor(p: u64, r: f64) -> f64 {
    -(-(p as f64).powf(-r)).ln_1p()
}

/// `∏_{i=1}^{m} 1 / (1 - p_i^{-r})`; the empty product is 1.
pub fn partial_euler_product(m: usize, r: f64, table: &PrimeTable) -> Result<f64> {
    check_exponent(r)?;
    Ok(table
        .first(m)?
        .iter()
        .map(|&p| euler_factor(p, r))
        .product())
}

/// `∏_{i>m} 1 / (1 - p_i^{-r})`, computed as `ζ(r) ∏_{i<=m} (1 - p_i^{-r})`.
pub fn tail_product(m: usize, r: f64, table: &PrimeTable) -> Result<f64> {
    let z = zeta(r)?;
    let head: f64 = table
        .first(m)?
        .iter()
        .map(|&p| 1.0 - (p as f64).powf(-r))
        .product();
    Ok(z * head)
}

pub(crate) fn check_exponent(r: f64) -> Result<()> {
    if r > 1.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "exponent r must be a finite number > 1, got {r}"
        )))
    }
}
