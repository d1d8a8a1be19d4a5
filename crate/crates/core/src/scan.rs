//! Brute-force tables of `σ_{-r}(n)` for `n <= max_n`.
//!
//! Used as an oracle for the analytic gap results. A finite table can refute
//! a claimed gap but never certify one, so [`empirical_gaps`] only reports
//! candidates.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{check_zeta_domain, zeta};
use crate::density::GapInterval;
use crate::divisor::prime_power_excess;
use crate::error::{Error, Result};
use crate::format::sig17;

/// Largest accepted `max_n`.
pub const MAX_SCAN: u64 = 100_000_000;

/// Values within this distance of a gap endpoint are ignored by
/// [`RangeSample::gap_is_empty`]; the upper endpoint is attained exactly.
pub const GAP_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct RangeSample {
    pub r: f64,
    pub max_n: u64,
    /// `(σ_{-r}(n), n)` for every `n` in `1..=max_n`, sorted by value then `n`.
    pub entries: Vec<(f64, u64)>,
}

/// An interval between consecutive sampled values. Advisory only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateGap {
    pub lo: f64,
    pub hi: f64,
}

/// Smallest prime factor of every `n <= max_n` (linear sieve); entry 0 and 1 are 0.
fn smallest_prime_factors(max_n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; max_n + 1];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=max_n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            if p > si {
                break;
            }
            let Some(k) = i.checked_mul(p as usize).filter(|&k| k <= max_n) else {
                break;
            };
            spf[k] = p;
        }
    }
    spf
}

/// `σ_{-r}(n)` from the smallest-prime-factor table, primes in increasing
/// order so the product matches [`crate::divisor::sigma_factored`] exactly.
fn sigma_from_spf(spf: &[u32], mut n: usize, r: f64) -> f64 {
    let mut value = 1.0;
    while n > 1 {
        let p = spf[n] as usize;
        let mut a = 0;
        while n.is_multiple_of(p) {
            n /= p;
            a += 1;
        }
        value *= 1.0 + prime_power_excess(p as u64, a, -r);
    }
    value
}

/// Tabulates `σ_{-r}(n)` for `n <= max_n`, sorted by value.
///
/// Values are computed in parallel; the output does not depend on thread count.
pub fn range_scan(r: f64, max_n: u64) -> Result<RangeSample> {
    check_zeta_domain(r)?;
    if max_n == 0 || max_n > MAX_SCAN {
        return Err(Error::domain(format!(
            "max_n must lie in [1, {MAX_SCAN}], got {max_n}"
        )));
    }
    let spf = smallest_prime_factors(max_n as usize);
    let mut entries: Vec<(f64, u64)> = (1..=max_n as usize)
        .into_par_iter()
        .map(|n| (sigma_from_spf(&spf, n, r), n as u64))
        .collect();
    entries.par_sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(RangeSample { r, max_n, entries })
}

impl RangeSample {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn min(&self) -> Option<(f64, u64)> {
        self.entries.first().copied()
    }

    pub fn max(&self) -> Option<(f64, u64)> {
        self.entries.last().copied()
    }

    /// Sampled values in the closed interval `[lo, hi]`.
    pub fn values_in(&self, lo: f64, hi: f64) -> &[(f64, u64)] {
        let start = self.entries.partition_point(|e| e.0 < lo);
        let end = self.entries.partition_point(|e| e.0 <= hi);
        &self.entries[start..end.max(start)]
    }

    /// True iff no sampled value lies in `[gap.lo + 1e-9, gap.hi - 1e-9]`.
    pub fn gap_is_empty(&self, gap: &GapInterval) -> bool {
        self.values_in(gap.lo + GAP_GUARD, gap.hi - GAP_GUARD)
            .is_empty()
    }

    /// Spacings of at least `min_width` between consecutive values, plus the
    /// stretch from the largest value up to `ζ(r)`.
    pub fn candidate_gaps(&self, min_width: f64) -> Result<Vec<CandidateGap>> {
        if min_width.is_nan() || min_width <= 0.0 {
            return Err(Error::domain(format!(
                "min_width must be positive, got {min_width}"
            )));
        }
        let top = zeta(self.r)?;
        let mut out: Vec<CandidateGap> = self
            .entries
            .windows(2)
            .filter(|w| w[1].0 - w[0].0 >= min_width)
            .map(|w| CandidateGap {
                lo: w[0].0,
                hi: w[1].0,
            })
            .collect();
        if let Some((last, _)) = self.max() {
            if top - last >= min_width {
                out.push(CandidateGap { lo: last, hi: top });
            }
        }
        Ok(out)
    }

    /// CSV with header `n,value`, one row per entry in sample order, values
    /// with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,value")?;
        for &(value, n) in &self.entries {
            writeln!(w, "{n},{}", sig17(value))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Scans `σ_{-r}` up to `max_n` and checks the guard-banded interior of `gap`.
pub fn verify_gap_empty(gap: &GapInterval, r: f64, max_n: u64) -> Result<bool> {
    Ok(range_scan(r, max_n)?.gap_is_empty(gap))
}

/// Candidate gaps of width `>= min_width` in a scan up to `max_n`.
pub fn empirical_gaps(r: f64, max_n: u64, min_width: f64) -> Result<Vec<CandidateGap>> {
    range_scan(r, max_n)?.candidate_gaps(min_width)
}
