//! Prime tables and the consecutive-prime ratio facts used by the density
//! criterion.
//!
//! Primes are 1-indexed throughout: `p_1 = 2`, `p_2 = 3`, and so on.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Sieve bound used when none is given.
pub const DEFAULT_LIMIT: u64 = 400_000;

/// Smallest `x` for which every interval `[x, x + x / (25 ln² x)]` is known to
/// contain a prime (Dusart, 2010).
pub const DUSART_THRESHOLD: u64 = 396_738;

/// Above this bound the table is built with a segmented sieve.
const SEGMENTED_ABOVE: u64 = 10_000_000;
const SEGMENT_LEN: usize = 1 << 18;

const CACHE_MAGIC: &[u8; 4] = b"DDPT";
const CACHE_VERSION: u32 = 1;

/// All primes up to a fixed bound, immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    /// Sieves every prime `<= limit`.
    pub fn new(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::domain(format!(
                "sieve limit must be at least 2, got {limit}"
            )));
        }
        let primes = if limit > SEGMENTED_ABOVE {
            segmented_sieve(limit)
        } else {
            simple_sieve(limit)
        };
        Ok(PrimeTable { limit, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Number of primes in the table.
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// The `i`-th prime, 1-indexed.
    pub fn get(&self, i: usize) -> Option<u64> {
        i.checked_sub(1).and_then(|k| self.primes.get(k).copied())
    }

    /// The `i`-th prime, or [`Error::TableExhausted`].
    pub fn prime(&self, i: usize) -> Result<u64> {
        self.get(i).ok_or(Error::TableExhausted {
            needed: i,
            available: self.len(),
        })
    }

    /// The first `m` primes.
    pub fn first(&self, m: usize) -> Result<&[u64]> {
        self.primes.get(..m).ok_or(Error::TableExhausted {
            needed: m,
            available: self.len(),
        })
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }

    pub fn largest(&self) -> u64 {
        *self
            .primes
            .last()
            .expect("table holds at least the prime 2")
    }

    /// Indices `j` with `p_{j+1} <= limit` where `p_{j+1} / p_j >= √2`.
    ///
    /// The comparison is `p_{j+1}² >= 2 p_j²` in exact integer arithmetic.
    pub fn verify_ratio_lemma(&self) -> Vec<usize> {
        self.primes
            .windows(2)
            .enumerate()
            .filter(|(_, w)| ratio_at_least_sqrt2(w[1], w[0]))
            .map(|(k, _)| k + 1)
            .collect()
    }

    /// Smallest `m0` such that `p_{j+1} / p_j < theta` for every `j >= m0`.
    ///
    /// Pairs inside the table are checked directly. Beyond the table the
    /// Dusart interval bound is used, which requires the table to reach the
    /// point where that bound alone drops below `theta`.
    pub fn ratio_bound_index(&self, theta: f64) -> Result<usize> {
        if !(theta > 1.0 && theta.is_finite()) {
            return Err(Error::domain(format!(
                "ratio bound must be a finite number > 1, got {theta}"
            )));
        }
        let start = analytic_start(theta).ok_or(Error::InsufficientTable {
            limit: self.limit,
            required: u64::MAX,
        })?;
        if self.largest() < start {
            return Err(Error::InsufficientTable {
                limit: self.limit,
                required: dusart_next_prime_bound(start),
            });
        }
        let exact = theta == std::f64::consts::SQRT_2;
        let last_failure = self
            .primes
            .windows(2)
            .enumerate()
            .filter(|(_, w)| {
                if exact {
                    ratio_at_least_sqrt2(w[1], w[0])
                } else {
                    w[1] as f64 >= theta * w[0] as f64
                }
            })
            .map(|(k, _)| k + 1)
            .next_back();
        Ok(last_failure.map_or(1, |j| j + 1))
    }

    /// Writes the table in the versioned binary cache format.
    pub fn write_cache<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&self.limit.to_le_bytes())?;
        w.write_all(&(self.primes.len() as u64).to_le_bytes())?;
        for p in &self.primes {
            w.write_all(&p.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_cache<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::Cache("bad magic".into()));
        }
        let version = u32::from_le_bytes(read_array(&mut r)?);
        if version != CACHE_VERSION {
            return Err(Error::Cache(format!("unsupported version {version}")));
        }
        let limit = u64::from_le_bytes(read_array(&mut r)?);
        let count = u64::from_le_bytes(read_array(&mut r)?);
        if limit < 2 || count > limit {
            return Err(Error::Cache("inconsistent header".into()));
        }
        let mut primes = Vec::with_capacity(count as usize);
        for _ in 0..count {
            primes.push(u64::from_le_bytes(read_array(&mut r)?));
        }
        let ordered = primes.windows(2).all(|w| w[0] < w[1]);
        if primes.first() != Some(&2) || !ordered || primes.last().is_some_and(|&p| p > limit) {
            return Err(Error::Cache("prime list is not a valid table".into()));
        }
        Ok(PrimeTable { limit, primes })
    }

    /// Loads the table from `path` if a valid cache for `limit` exists there,
    /// otherwise sieves it and (re)writes the cache.
    pub fn load_or_build(path: &Path, limit: u64) -> Result<Self> {
        if let Ok(file) = File::open(path) {
            if let Ok(table) = Self::read_cache(BufReader::new(file)) {
                if table.limit == limit {
                    return Ok(table);
                }
            }
        }
        let table = Self::new(limit)?;
        table.write_cache(BufWriter::new(File::create(path)?))?;
        Ok(table)
    }
}

fn read_array<R: Read, const N: usize>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn ratio_at_least_sqrt2(next: u64, prev: u64) -> bool {
    let (a, b) = (next as u128, prev as u128);
    a * a >= 2 * b * b
}

/// Upper bound on `p_{j+1} / p_j` for `p_j >= DUSART_THRESHOLD - 1`, taking
/// `x = p + 1` in the Dusart interval. Decreasing in `p`.
fn dusart_ratio_bound(p: u64) -> f64 {
    let x = p as f64 + 1.0;
    let ln = x.ln();
    (x / p as f64) * (1.0 + 1.0 / (25.0 * ln * ln))
}

/// Smallest prime size from which the Dusart bound alone forces
/// `p_{j+1} / p_j < theta`, or `None` if that happens only beyond `u64` range.
fn analytic_start(theta: f64) -> Option<u64> {
    let mut lo = DUSART_THRESHOLD - 1;
    if dusart_ratio_bound(lo) < theta {
        return Some(lo);
    }
    let mut hi = lo;
    loop {
        hi = hi.checked_mul(2)?;
        if hi > 1 << 62 {
            return None;
        }
        if dusart_ratio_bound(hi) < theta {
            break;
        }
        lo = hi;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if dusart_ratio_bound(mid) < theta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// A limit guaranteed to contain a prime `>= x` (for `x >= DUSART_THRESHOLD`).
fn dusart_next_prime_bound(x: u64) -> u64 {
    let xf = x as f64;
    let ln = xf.ln();
    (xf + xf / (25.0 * ln * ln)).ceil() as u64 + 1
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        if let Some(sq) = i.checked_mul(i) {
            for k in (sq..=n).step_by(i) {
                composite[k] = true;
            }
        }
    }
    primes
}

fn segmented_sieve(limit: u64) -> Vec<u64> {
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = simple_sieve(root);
    let mut primes: Vec<u64> = base.iter().copied().filter(|&p| p <= limit).collect();
    let mut low = root + 1;
    let mut segment = vec![false; SEGMENT_LEN];
    while low <= limit {
        let high = (low + SEGMENT_LEN as u64 - 1).min(limit);
        let len = (high - low + 1) as usize;
        segment[..len].fill(false);
        for &p in &base {
            if p * p > high {
                break;
            }
            let first = (low.div_ceil(p) * p).max(p * p);
            for k in (first..=high).step_by(p as usize) {
                segment[(k - low) as usize] = true;
            }
        }
        primes.extend((0..len).filter(|&i| !segment[i]).map(|i| low + i as u64));
        low = high + 1;
    }
    primes
}
