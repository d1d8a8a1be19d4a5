//! The generalized divisor functions `σ_t(n) = Σ_{d | n} d^t` for real `t`.
//!
//! `σ_t` is multiplicative, so every evaluation goes through the prime
//! factorization: `σ_t(∏ p^a) = ∏ (1 + p^t + … + p^{at})`. Integers are kept
//! in factored form, which lets witnesses far beyond `u64` be evaluated.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest integer accepted by [`factorize`] and [`sigma`].
pub const MAX_FACTORIZABLE: u64 = i64::MAX as u64;

/// A positive integer as an ordered list of `(prime, exponent)` pairs.
///
/// Primes are strictly increasing and exponents are at least 1. The empty
/// list is the integer 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<(u64, u32)>", into = "Vec<(u64, u32)>")]
pub struct FactoredInteger {
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    /// The integer 1.
    pub fn one() -> Self {
        Self::default()
    }

    /// Validates and wraps a factor list.
    pub fn new(factors: Vec<(u64, u32)>) -> Result<Self> {
        for (i, &(p, a)) in factors.iter().enumerate() {
            if a == 0 {
                return Err(Error::domain(format!("exponent of {p} must be positive")));
            }
            if !is_prime(p) {
                return Err(Error::domain(format!("{p} is not prime")));
            }
            if i > 0 && factors[i - 1].0 >= p {
                return Err(Error::domain("primes must be strictly increasing"));
            }
        }
        Ok(FactoredInteger { factors })
    }

    /// Caller guarantees the factor-list invariants.
    pub(crate) fn from_sorted_prime_powers(factors: Vec<(u64, u32)>) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(factors.iter().all(|&(_, a)| a > 0));
        FactoredInteger { factors }
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// The integer value, if it fits in a `u64`.
    pub fn to_u64(&self) -> Option<u64> {
        self.factors
            .iter()
            .try_fold(1u64, |acc, &(p, a)| acc.checked_mul(p.checked_pow(a)?))
    }

    /// Natural log of the integer value.
    pub fn ln(&self) -> f64 {
        self.factors
            .iter()
            .map(|&(p, a)| a as f64 * (p as f64).ln())
            .sum()
    }
}

impl TryFrom<Vec<(u64, u32)>> for FactoredInteger {
    type Error = Error;

    fn try_from(factors: Vec<(u64, u32)>) -> Result<Self> {
        Self::new(factors)
    }
}

impl From<FactoredInteger> for Vec<(u64, u32)> {
    fn from(f: FactoredInteger) -> Self {
        f.factors
    }
}

impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, &(p, a)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" * ")?;
            }
            if a == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{a}")?;
            }
        }
        Ok(())
    }
}

fn is_prime(n: u64) -> bool {
    if n < 4 {
        return n >= 2;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d <= n / d {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Canonical factorization by trial division.
pub fn factorize(n: u64) -> Result<FactoredInteger> {
    if n == 0 {
        return Err(Error::domain("cannot factorize 0"));
    }
    if n > MAX_FACTORIZABLE {
        return Err(Error::domain(format!("{n} exceeds 2^63 - 1")));
    }
    let mut rest = n;
    let mut factors = Vec::new();
    let mut push = |rest: &mut u64, p: u64| {
        let mut a = 0;
        while (*rest).is_multiple_of(p) {
            *rest /= p;
            a += 1;
        }
        if a > 0 {
            factors.push((p, a));
        }
    };
    push(&mut rest, 2);
    push(&mut rest, 3);
    let mut d = 5u64;
    while d <= rest / d {
        push(&mut rest, d);
        push(&mut rest, d + 2);
        d += 6;
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(FactoredInteger::from_sorted_prime_powers(factors))
}

/// `Σ_{j=1}^{a} p^{jt}`, i.e. `σ_t(p^a) - 1`, by Horner's rule.
///
/// For `p^t < 1` the exponent is truncated where the remaining terms fall
/// below `2^-56` relative to the sum; the truncation never changes the
/// result by more than an ulp or two.
pub(crate) fn prime_power_excess(p: u64, a: u32, t: f64) -> f64 {
    let q = (p as f64).powf(t);
    let terms = if q < 1.0 {
        a.min(significant_terms(q))
    } else {
        a
    };
    let mut inner = 0.0;
    for _ in 0..terms {
        inner = q * (1.0 + inner);
    }
    inner
}

/// Number of terms of `Σ q^j` (0 < q < 1) that can affect a binary64 sum.
fn significant_terms(q: f64) -> u32 {
    let decay = -q.ln();
    if decay <= 0.0 {
        return u32::MAX;
    }
    let needed = (56.0 * std::f64::consts::LN_2 - (-q).ln_1p()) / decay;
    if needed >= u32::MAX as f64 {
        u32::MAX
    } else {
        needed.ceil() as u32 + 1
    }
}

/// `σ_t(n)` for `1 <= n <= 2^63 - 1`.
pub fn sigma(t: f64, n: u64) -> Result<f64> {
    Ok(sigma_factored(t, &factorize(n)?))
}

/// `σ_t` of an integer given by its factorization.
pub fn sigma_factored(t: f64, f: &FactoredInteger) -> f64 {
    f.factors
        .iter()
        .map(|&(p, a)| 1.0 + prime_power_excess(p, a, t))
        .product()
}

/// `ln σ_t`, accumulated as a sum of per-prime logs.
pub fn log_sigma(t: f64, f: &FactoredInteger) -> f64 {
    f.factors
        .iter()
        .map(|&(p, a)| prime_power_excess(p, a, t).ln_1p())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_sigma(t: f64, n: u64) -> f64 {
        let mut divisors = Vec::new();
        let mut d = 1;
        while d * d <= n {
            if n.is_multiple_of(d) {
                divisors.push(d);
                if d * d != n {
                    divisors.push(n / d);
                }
            }
            d += 1;
        }
        divisors.sort_unstable();
        divisors.iter().rev().map(|&d| (d as f64).powf(t)).sum()
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs()
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().is_one());
        assert_eq!(factorize(12).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert_eq!(
            factorize(999_999_999_989).unwrap().factors(),
            &[(999_999_999_989, 1)]
        );
        assert_eq!(factorize(360).unwrap().factors(), &[(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(1 << 62).unwrap().factors(), &[(2, 62)]);
        assert!(matches!(factorize(0), Err(Error::Domain(_))));
        assert!(matches!(factorize(u64::MAX), Err(Error::Domain(_))));
    }

    #[test]
    fn trial_division_primality_oracle() {
        // 999999999989 is the largest prime below 10^12.
        let n = 999_999_999_989u64;
        let root = (n as f64).sqrt() as u64 + 1;
        assert!((2..=root).all(|d| !n.is_multiple_of(d)));
        assert!(is_prime(n));
        assert!(!is_prime(999_999_999_991));
    }

    #[test]
    fn factored_integer_validation() {
        assert!(FactoredInteger::new(vec![(2, 1), (3, 2)]).is_ok());
        assert!(FactoredInteger::new(vec![(4, 1)]).is_err());
        assert!(FactoredInteger::new(vec![(3, 1), (2, 1)]).is_err());
        assert!(FactoredInteger::new(vec![(2, 1), (2, 1)]).is_err());
        assert!(FactoredInteger::new(vec![(2, 0)]).is_err());
        assert!(FactoredInteger::new(vec![(1, 1)]).is_err());
        let f = FactoredInteger::new(vec![(2, 3), (5, 2)]).unwrap();
        assert_eq!(f.to_u64(), Some(200));
        assert_eq!(f.to_string(), "2^3 * 5^2");
        assert_eq!(FactoredInteger::one().to_string(), "1");
        assert_eq!(FactoredInteger::new(vec![(2, 64)]).unwrap().to_u64(), None);
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(-2.0, 2).unwrap(), 1.25);
        assert_eq!(sigma(0.0, 12).unwrap(), 6.0);
        assert_eq!(sigma(1.0, 12).unwrap(), 28.0);
        assert!(rel_close(
            sigma(-1.5, 360).unwrap(),
            naive_sigma(-1.5, 360),
            1e-12
        ));
        assert_eq!(
            sigma_factored(-2.0, &FactoredInteger::new(vec![(2, 1)]).unwrap()),
            1.25
        );
        assert_eq!(sigma_factored(3.7, &FactoredInteger::one()), 1.0);
        let six = FactoredInteger::new(vec![(2, 1), (3, 1)]).unwrap();
        assert!(rel_close(sigma_factored(-2.0, &six), 25.0 / 18.0, 1e-15));
        assert!(matches!(sigma(1.0, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn log_sigma_examples() {
        assert_eq!(log_sigma(-2.0, &FactoredInteger::one()), 0.0);
        let two = FactoredInteger::new(vec![(2, 1)]).unwrap();
        assert!((log_sigma(-2.0, &two) - 1.25f64.ln()).abs() < 1e-16);
        let f = FactoredInteger::new(vec![(2, 3), (5, 2)]).unwrap();
        assert!((log_sigma(-1.5, &f) - sigma_factored(-1.5, &f).ln()).abs() < 1e-12);
    }

    #[test]
    fn huge_witness_does_not_overflow() {
        let f = FactoredInteger::new(vec![(2, 10_000), (3, 5_000), (104_729, 10_000)]).unwrap();
        assert_eq!(f.to_u64(), None);
        let s = sigma_factored(-2.0, &f);
        let expected = (4.0 / 3.0) * (9.0 / 8.0) / (1.0 - 104_729f64.powi(-2));
        assert!(rel_close(s, expected, 1e-14));
        assert!((log_sigma(-2.0, &f) - expected.ln()).abs() < 1e-14);
    }

    #[test]
    fn tiny_negative_exponent_keeps_all_terms() {
        // p^t within 1e-7 of 1: truncation must not kick in early.
        let t = -1e-7;
        let s = sigma(t, 1 << 20).unwrap();
        assert!(rel_close(s, naive_sigma(t, 1 << 20), 1e-12));
    }

    #[test]
    fn naive_oracle_equivalence_small_range() {
        for t in [-2.0, -1.5, -1.0, 0.0, 1.0] {
            for n in 1..=2_000u64 {
                let a = sigma(t, n).unwrap();
                let b = naive_sigma(t, n);
                assert!(rel_close(a, b, 1e-12), "t={t} n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn reflection_identity() {
        for n in 1..=10_000u64 {
            for r in [1.5, 2.0, 3.0] {
                let lhs = sigma(-r, n).unwrap();
                let rhs = sigma(r, n).unwrap() / (n as f64).powf(r);
                assert!(rel_close(lhs, rhs, 1e-11), "n={n} r={r}");
            }
        }
    }

    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }

    proptest! {
        #[test]
        fn multiplicative_on_coprime_pairs(a in 1u64..=1_000_000, b in 1u64..=1_000_000, t in -3.0f64..2.0) {
            prop_assume!(gcd(a, b) == 1);
            let lhs = sigma(t, a * b).unwrap();
            let rhs = sigma(t, a).unwrap() * sigma(t, b).unwrap();
            prop_assert!(rel_close(lhs, rhs, 1e-11));
        }

        #[test]
        fn factorization_reconstructs(n in 1u64..=10_000_000_000) {
            let f = factorize(n).unwrap();
            prop_assert_eq!(f.to_u64(), Some(n));
            prop_assert!(FactoredInteger::new(f.factors().to_vec()).is_ok());
        }

        #[test]
        fn negative_exponent_range_bound(n in 1u64..=1_000_000, r in 1.01f64..8.0) {
            let s = sigma(-r, n).unwrap();
            prop_assert!(s >= 1.0);
            prop_assert!(s < crate::analytic::zeta(r).unwrap());
        }
    }
}
