//! When is the range of `σ_{-r}` dense in `[1, ζ(r))`?
//!
//! With `F(m, r) = (1 + p_m^{-r}) ∏_{i<=m} 1/(1 - p_i^{-r})`, the range is
//! dense exactly when `F(m, r) <= ζ(r)` for every `m`. Each index that
//! violates the inequality yields an explicit empty interval
//! `[∏_{i>m} 1/(1 - p_i^{-r}), 1 + p_m^{-r})`.
//!
//! Only finitely many indices need checking. If `p_{m+1}/p_m < 2^{1/r}` then
//! `F(m+1, r) > F(m, r)`, so once consecutive prime ratios stay below
//! `2^{1/r}` the sequence `F(m, r)` climbs monotonically to `ζ(r)`. For
//! `r <= 2` the ratio exceptions below `√2` are `{1, 2, 4}`, and `F(3) < F(4)`
//! leaves `{1, 2, 4}` as the indices to test.
//!
//! The critical exponent `η ≈ 1.8877909` is the root of `F(2, r) = ζ(r)`;
//! the range is dense iff `r <= η`.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{check_zeta_domain, log_euler_factor, zeta, zeta_minus_one};
use crate::error::{Error, Result};
use crate::primes::PrimeTable;

/// Relative width of the indeterminate zone around `F(m, r) = ζ(r)`,
/// measured against `ζ(r) - 1`.
pub const GUARD_BAND: f64 = 1e-10;

/// Default bisection tolerance for [`eta`].
pub const DEFAULT_ETA_TOL: f64 = 1e-9;

/// Tolerances accepted by the root finders.
pub const MIN_ROOT_TOL: f64 = 1e-14;
pub const MAX_ROOT_TOL: f64 = 1e-3;

/// Search grid: `r = k / 100` for `k` in the given inclusive ranges.
const ETA_GRID: (u32, u32) = (101, 200);
const CRITICAL_GRID: (u32, u32) = (101, 800);

/// Label attached to every gap census. The census only sees one family of
/// gaps, so its count is a lower bound.
pub const CENSUS_LABEL: &str = "lower bound: gaps from the tail-product family only";

/// A half-open interval `[lo, hi)` containing no value of `σ_{-r}`.
///
/// `m` is the generating index, or 0 for an interval obtained by merging.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapInterval {
    pub lo: f64,
    pub hi: f64,
    pub m: usize,
}

impl GapInterval {
    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v < self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Outcome of comparing `F(m, r)` with `ζ(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// `F(m, r) < ζ(r)` outside the guard band.
    Holds,
    /// `F(m, r) > ζ(r)` outside the guard band; a gap exists.
    Fails,
    /// Too close to call in binary64.
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexCheck {
    pub m: usize,
    pub f: f64,
    pub zeta: f64,
    pub criterion: Criterion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub r: f64,
    pub dense: bool,
    pub checked_m: Vec<usize>,
    pub failing_m: Vec<usize>,
    /// Indices whose classification fell inside [`GUARD_BAND`].
    pub marginal_m: Vec<usize>,
    pub gaps: Vec<GapInterval>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapCensus {
    pub r: f64,
    /// Merged, sorted by `lo`.
    pub gaps: Vec<GapInterval>,
    /// Number of merged gaps; a lower bound on the true number of gaps.
    pub lower_bound: usize,
    pub marginal_m: Vec<usize>,
}

fn check_index(m: usize, table: &PrimeTable) -> Result<u64> {
    if m == 0 {
        return Err(Error::domain("index m must be positive"));
    }
    table.prime(m)
}

/// `ln F(m, r)` for the first `m` primes given in `primes`.
fn log_f(primes: &[u64], r: f64) -> f64 {
    let pm = *primes.last().expect("m >= 1");
    let head: f64 = primes.iter().map(|&p| log_euler_factor(p, r)).sum();
    head + (pm as f64).powf(-r).ln_1p()
}

/// `F(m, r) - ζ(r)`, evaluated in excess-over-one form.
fn g_from_primes(primes: &[u64], r: f64) -> Result<f64> {
    Ok(log_f(primes, r).exp_m1() - zeta_minus_one(r)?)
}

fn classify(f_minus_one: f64, zeta_minus_one: f64) -> Criterion {
    let rel = (f_minus_one - zeta_minus_one) / zeta_minus_one;
    if rel > GUARD_BAND {
        Criterion::Fails
    } else if rel < -GUARD_BAND {
        Criterion::Holds
    } else {
        Criterion::Marginal
    }
}

/// `F(m, r) = (1 + p_m^{-r}) ∏_{i<=m} 1/(1 - p_i^{-r})`.
pub fn f_value(m: usize, r: f64, table: &PrimeTable) -> Result<f64> {
    crate::analytic::check_exponent(r)?;
    check_index(m, table)?;
    Ok(1.0 + log_f(table.first(m)?, r).exp_m1())
}

/// `g_m(r) = F(m, r) - ζ(r)`.
pub fn g(m: usize, r: f64, table: &PrimeTable) -> Result<f64> {
    check_index(m, table)?;
    g_from_primes(table.first(m)?, r)
}

/// Classifies index `m` at exponent `r`.
pub fn check_criterion(m: usize, r: f64, table: &PrimeTable) -> Result<IndexCheck> {
    check_index(m, table)?;
    let fm1 = log_f(table.first(m)?, r).exp_m1();
    let zm1 = zeta_minus_one(r)?;
    Ok(IndexCheck {
        m,
        f: 1.0 + fm1,
        zeta: 1.0 + zm1,
        criterion: classify(fm1, zm1),
    })
}

/// The gap generated by index `m`, if `F(m, r) > ζ(r)`.
///
/// Marginal comparisons return `None`; use [`check_criterion`] to see them.
pub fn gap_at(m: usize, r: f64, table: &PrimeTable) -> Result<Option<GapInterval>> {
    let check = check_criterion(m, r, table)?;
    if check.criterion != Criterion::Fails {
        return Ok(None);
    }
    let lo = crate::analytic::tail_product(m, r, table)?;
    let hi = 1.0 + (table.prime(m)? as f64).powf(-r);
    Ok(Some(GapInterval { lo, hi, m }))
}

/// Indices that decide density at `r`, in increasing order.
fn indices_to_check(r: f64, table: &PrimeTable) -> Result<Vec<usize>> {
    if r <= 2.0 {
        table.first(4)?;
        Ok(vec![1, 2, 4])
    } else {
        let m_max = table.ratio_bound_index(2f64.powf(1.0 / r))?;
        table.first(m_max)?;
        Ok((1..m_max).collect())
    }
}

struct Evaluation {
    failing: Vec<usize>,
    marginal: Vec<usize>,
    gaps: Vec<GapInterval>,
}

/// Walks the primes once, classifying each index in `indices` (sorted).
fn evaluate(r: f64, indices: &[usize], table: &PrimeTable) -> Result<Evaluation> {
    let z = zeta(r)?;
    let zm1 = zeta_minus_one(r)?;
    let mut out = Evaluation {
        failing: vec![],
        marginal: vec![],
        gaps: vec![],
    };
    let Some(&last) = indices.last() else {
        return Ok(out);
    };
    let mut wanted = indices.iter().peekable();
    let mut log_head = 0.0;
    // Same multiplication order as `tail_product`, so `lo` matches it bit for bit.
    let mut tail_head = 1.0;
    for (k, &p) in table.first(last)?.iter().enumerate() {
        let m = k + 1;
        let q = (p as f64).powf(-r);
        log_head += log_euler_factor(p, r);
        tail_head *= 1.0 - q;
        if wanted.peek() != Some(&&m) {
            continue;
        }
        wanted.next();
        match classify((log_head + q.ln_1p()).exp_m1(), zm1) {
            Criterion::Holds => {}
            Criterion::Marginal => out.marginal.push(m),
            Criterion::Fails => {
                out.failing.push(m);
                out.gaps.push(GapInterval {
                    lo: z * tail_head,
                    hi: 1.0 + q,
                    m,
                });
            }
        }
    }
    Ok(out)
}

/// Decides whether the range of `σ_{-r}` is dense in `[1, ζ(r))`.
pub fn is_dense(r: f64, table: &PrimeTable) -> Result<DensityReport> {
    check_zeta_domain(r)?;
    let checked_m = indices_to_check(r, table)?;
    let eval = evaluate(r, &checked_m, table)?;
    Ok(DensityReport {
        r,
        dense: eval.failing.is_empty(),
        checked_m,
        failing_m: eval.failing,
        marginal_m: eval.marginal,
        gaps: eval.gaps,
    })
}

/// All gaps of the tail-product family at `r`, merged.
///
/// Finite sampling of the true range may reveal more gaps than this; the
/// count is a lower bound.
pub fn gap_census(r: f64, table: &PrimeTable) -> Result<GapCensus> {
    check_zeta_domain(r)?;
    let indices: Vec<usize> = if r <= 2.0 {
        table.first(4)?;
        (1..=4).collect()
    } else {
        indices_to_check(r, table)?
    };
    let eval = evaluate(r, &indices, table)?;
    let gaps = merge_gaps(eval.gaps);
    Ok(GapCensus {
        r,
        lower_bound: gaps.len(),
        gaps,
        marginal_m: eval.marginal,
    })
}

/// Sorts by `lo` and merges overlapping or touching half-open intervals.
pub fn merge_gaps(mut gaps: Vec<GapInterval>) -> Vec<GapInterval> {
    gaps.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
    let mut merged: Vec<GapInterval> = Vec::with_capacity(gaps.len());
    for gap in gaps {
        match merged.last_mut() {
            Some(cur) if gap.lo <= cur.hi => {
                cur.hi = cur.hi.max(gap.hi);
                cur.m = 0;
            }
            _ => merged.push(gap),
        }
    }
    merged
}

fn check_tol(tol: f64) -> Result<()> {
    if (MIN_ROOT_TOL..=MAX_ROOT_TOL).contains(&tol) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "tolerance must lie in [{MIN_ROOT_TOL}, {MAX_ROOT_TOL}], got {tol}"
        )))
    }
}

fn grid(range: (u32, u32)) -> Vec<f64> {
    (range.0..=range.1).map(|k| k as f64 / 100.0).collect()
}

/// Evaluates `f` on the grid; the evaluation order does not affect the result.
fn sample<F>(points: &[f64], f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    points.par_iter().map(|&r| f(r)).collect()
}

/// Indices `i` where the samples change sign between `i` and `i + 1`.
fn sign_changes(values: &[f64]) -> Vec<usize> {
    values
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[0] < 0.0) != (w[1] < 0.0))
        .map(|(i, _)| i)
        .collect()
}

fn bisect<F>(f: F, mut lo: f64, mut hi: f64, f_lo: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let lo_negative = f_lo < 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The critical exponent: the unique root of `F(2, r) = ζ(r)` in `(1, 2]`,
/// i.e. `(2^r / (2^r - 1)) ((3^r + 1) / (3^r - 1)) = ζ(r)`.
///
/// Located by a sign scan on a 0.01 grid over `[1.01, 2]` followed by
/// bisection to a bracket of width `<= tol`. Exactly one sign change, from
/// negative to positive, must appear on the grid.
pub fn eta(tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let g2 = |r: f64| g_from_primes(&[2, 3], r);
    let points = grid(ETA_GRID);
    let values = sample(&points, g2)?;
    let changes = sign_changes(&values);
    let &[i] = changes.as_slice() else {
        return Err(Error::Consistency(format!(
            "expected one sign change of g_2 on (1, 2], found {}",
            changes.len()
        )));
    };
    if values[i] >= 0.0 {
        return Err(Error::Consistency("g_2 crosses zero downwards".into()));
    }
    bisect(g2, points[i], points[i + 1], values[i], tol)
}

/// [`eta`] at [`DEFAULT_ETA_TOL`], computed once per process.
pub fn eta_cached() -> f64 {
    static ETA: OnceLock<f64> = OnceLock::new();
    *ETA.get_or_init(|| eta(DEFAULT_ETA_TOL).expect("g_2 has a root on the fixed grid"))
}

/// The smallest root of `g_m(r) = F(m, r) - ζ(r)` in `(1, 8]` visible as a
/// sign change on a 0.01 grid, refined by bisection. `None` if `g_m` keeps
/// one sign on the grid.
pub fn critical_exponent(m: usize, tol: f64, table: &PrimeTable) -> Result<Option<f64>> {
    check_tol(tol)?;
    check_index(m, table)?;
    let primes = table.first(m)?;
    let gm = |r: f64| g_from_primes(primes, r);
    let points = grid(CRITICAL_GRID);
    let values = sample(&points, gm)?;
    if let Some(i) = values.iter().position(|&v| v == 0.0) {
        return Ok(Some(points[i]));
    }
    match sign_changes(&values).first() {
        Some(&i) => bisect(gm, points[i], points[i + 1], values[i], tol).map(Some),
        None => Ok(None),
    }
}
