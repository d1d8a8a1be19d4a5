//! Greedy construction of integers whose `σ_{-r}` value approaches a target.
//!
//! Work in log space with target `x = ln v`. Walking the primes in order,
//! step `n` either takes the whole Euler factor of `p_n` (if the running sum
//! `X` stays `<= x`) or the longest partial geometric sum
//! `1 + p_n^{-r} + … + p_n^{-ar}` that still fits. The first case is a
//! *saturated* step, the second is *capped* at exponent `a`. The shortfall
//! of a capped step against the full factor is its deficit `D_n`, and
//! `E_n = D_1 + … + D_n`.
//!
//! A saturated step cannot be realised by a finite exponent, so the witness
//! after `n` steps uses exponent `n` for those primes. Its `ln σ_{-r}` is
//! `C_n`, which tends to `x` whenever `X_n` does. Convergence is guaranteed
//! for `r <= η`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::analytic::{check_exponent, check_zeta_domain, log_euler_factor, zeta_minus_one};
use crate::density::eta_cached;
use crate::divisor::{sigma_factored, FactoredInteger};
use crate::error::{Error, Result};
use crate::format::sig17;
use crate::primes::PrimeTable;

/// Most primes [`approximate_target`] will consume.
pub const MAX_STEPS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alpha {
    /// The partial sum up to exponent `a` fits, exponent `a + 1` would not.
    Capped(u32),
    /// The whole Euler factor fits under the target.
    Saturated,
}

impl Alpha {
    /// Integer code used in trace exports: the exponent, or -1 when saturated.
    pub fn code(self) -> i64 {
        match self {
            Alpha::Capped(a) => a as i64,
            Alpha::Saturated => -1,
        }
    }

    fn from_code(code: i64) -> Option<Self> {
        match code {
            -1 => Some(Alpha::Saturated),
            a if a >= 0 => u32::try_from(a).ok().map(Alpha::Capped),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreedyStep {
    /// 1-based step index; the step handles the `n`-th prime.
    pub n: usize,
    pub prime: u64,
    pub alpha: Alpha,
    /// Running log sum `X_n`.
    pub x_sum: f64,
    /// Deficit `D_n` against the full Euler factor (0 when saturated).
    pub deficit: f64,
    /// Cumulative deficit `E_n`.
    pub cum_deficit: f64,
    /// Amount added to the running sum at this step.
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyTrace {
    pub r: f64,
    /// Log-space target.
    pub target: f64,
    pub steps: Vec<GreedyStep>,
}

struct Greedy<'a> {
    r: f64,
    target: f64,
    table: &'a PrimeTable,
    x_sum: f64,
    cum_deficit: f64,
    n: usize,
}

impl<'a> Greedy<'a> {
    fn new(r: f64, target: f64, table: &'a PrimeTable) -> Self {
        Greedy {
            r,
            target,
            table,
            x_sum: 0.0,
            cum_deficit: 0.0,
            n: 0,
        }
    }

    fn step(&mut self) -> Result<GreedyStep> {
        let n = self.n + 1;
        let p = self.table.prime(n)?;
        let full = log_euler_factor(p, self.r);
        let (alpha, gain) = if self.x_sum + full <= self.target {
            (Alpha::Saturated, full)
        } else {
            let q = (p as f64).powf(-self.r);
            let (mut a, mut excess, mut term) = (0u32, 0.0f64, 1.0f64);
            loop {
                term *= q;
                let next = excess + term;
                // Partial sums stopped moving: every larger exponent fits too.
                if next == excess || self.x_sum + next.ln_1p() > self.target {
                    break;
                }
                a += 1;
                excess = next;
            }
            (Alpha::Capped(a), excess.ln_1p())
        };
        let deficit = full - gain;
        self.x_sum += gain;
        self.cum_deficit += deficit;
        self.n = n;
        Ok(GreedyStep {
            n,
            prime: p,
            alpha,
            x_sum: self.x_sum,
            deficit,
            cum_deficit: self.cum_deficit,
            gain,
        })
    }
}

/// `ln(1 + p^{-r} + … + p^{-kr})` by forward summation.
fn truncated_log_factor(p: u64, r: f64, k: usize) -> f64 {
    let q = (p as f64).powf(-r);
    let (mut excess, mut term) = (0.0f64, 1.0f64);
    for _ in 0..k {
        term *= q;
        let next = excess + term;
        if next == excess {
            break;
        }
        excess = next;
    }
    excess.ln_1p()
}

fn log_zeta(r: f64) -> Result<f64> {
    Ok(zeta_minus_one(r)?.ln_1p())
}

/// Runs `n_steps` steps of the greedy construction for log-space target `x`.
pub fn greedy_trace(r: f64, x: f64, n_steps: usize, table: &PrimeTable) -> Result<GreedyTrace> {
    check_exponent(r)?;
    check_zeta_domain(r)?;
    let upper = log_zeta(r)?;
    if !(0.0..upper).contains(&x) {
        return Err(Error::domain(format!(
            "target must lie in [0, ln ζ(r)) = [0, {upper}), got {x}"
        )));
    }
    if n_steps == 0 {
        return Err(Error::domain("step count must be positive"));
    }
    table.first(n_steps)?;
    let mut greedy = Greedy::new(r, x, table);
    let steps = (0..n_steps).map(|_| greedy.step()).collect::<Result<_>>()?;
    Ok(GreedyTrace {
        r,
        target: x,
        steps,
    })
}

fn witness_from(steps: &[GreedyStep], n: usize) -> FactoredInteger {
    let exponent = u32::try_from(n).expect("step counts fit in u32");
    let factors = steps[..n]
        .iter()
        .filter_map(|s| match s.alpha {
            Alpha::Capped(0) => None,
            Alpha::Capped(a) => Some((s.prime, a)),
            Alpha::Saturated => Some((s.prime, exponent)),
        })
        .collect();
    FactoredInteger::from_sorted_prime_powers(factors)
}

impl GreedyTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    fn check_prefix(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.steps.len() {
            return Err(Error::domain(format!(
                "prefix length must lie in [1, {}], got {n}",
                self.steps.len()
            )));
        }
        Ok(())
    }

    /// The integer after `n` steps: `p_k^{α_k}` for capped steps with
    /// `α_k > 0`, `p_k^n` for saturated steps.
    pub fn witness(&self, n: usize) -> Result<FactoredInteger> {
        self.check_prefix(n)?;
        Ok(witness_from(&self.steps, n))
    }

    /// `C_n`: the log of the witness value, accumulated step by step.
    pub fn c_value(&self, n: usize) -> Result<f64> {
        self.check_prefix(n)?;
        Ok(self.steps[..n]
            .iter()
            .map(|s| match s.alpha {
                Alpha::Capped(_) => s.gain,
                Alpha::Saturated => truncated_log_factor(s.prime, self.r, n),
            })
            .sum())
    }

    /// One header line, then `n p_n alpha X D E` per step with `alpha = -1`
    /// for saturated steps.
    pub fn to_text(&self) -> String {
        let mut out = format!("# r={} x={}\n", sig17(self.r), sig17(self.target));
        for s in &self.steps {
            let _ = writeln!(
                out,
                "{} {} {} {} {} {}",
                s.n,
                s.prime,
                s.alpha.code(),
                sig17(s.x_sum),
                sig17(s.deficit),
                sig17(s.cum_deficit)
            );
        }
        out
    }

    /// Parses [`to_text`](Self::to_text) output. Step gains are recovered
    /// from consecutive `X` values.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let err = |line: usize, msg: &str| Error::Parse {
            line: line + 1,
            msg: msg.into(),
        };
        let (i, header) = lines.next().ok_or_else(|| err(0, "empty input"))?;
        let (r, target) = parse_header(header).ok_or_else(|| err(i, "expected '# r=<r> x=<x>'"))?;
        let mut steps: Vec<GreedyStep> = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [n, p, a, x, d, e] = fields.as_slice() else {
                return Err(err(i, "expected six fields"));
            };
            let n: usize = n.parse().map_err(|_| err(i, "bad step index"))?;
            let prime: u64 = p.parse().map_err(|_| err(i, "bad prime"))?;
            let alpha = a
                .parse::<i64>()
                .ok()
                .and_then(Alpha::from_code)
                .ok_or_else(|| err(i, "bad alpha"))?;
            let num = |s: &str| s.parse::<f64>().map_err(|_| err(i, "bad number"));
            let (x_sum, deficit, cum_deficit) = (num(x)?, num(d)?, num(e)?);
            if n != steps.len() + 1 {
                return Err(err(i, "step indices must run 1, 2, 3, ..."));
            }
            let prev = steps.last().map_or(0.0, |s| s.x_sum);
            steps.push(GreedyStep {
                n,
                prime,
                alpha,
                x_sum,
                deficit,
                cum_deficit,
                gain: x_sum - prev,
            });
        }
        Ok(GreedyTrace { r, target, steps })
    }
}

fn parse_header(line: &str) -> Option<(f64, f64)> {
    let rest = line.strip_prefix('#')?.trim();
    let mut r = None;
    let mut x = None;
    for kv in rest.split_whitespace() {
        match kv.split_once('=')? {
            ("r", v) => r = v.parse().ok(),
            ("x", v) => x = v.parse().ok(),
            _ => {}
        }
    }
    Some((r?, x?))
}

/// Witness integer after `n` steps of `trace`.
pub fn witness(trace: &GreedyTrace, n: usize) -> Result<FactoredInteger> {
    trace.witness(n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Approximation {
    pub r: f64,
    pub target: f64,
    pub witness: FactoredInteger,
    pub achieved: f64,
    pub error: f64,
    /// Number of primes consumed when the result was taken.
    pub steps: usize,
    pub converged: bool,
    /// False when `r > η`; the target may then sit in a gap.
    pub guaranteed: bool,
}

/// Finds an integer `N` with `|σ_{-r}(N) - v| <= tol`, extending the greedy
/// trace by doubling up to [`MAX_STEPS`] primes.
///
/// If the cap is reached first, the closest witness seen is returned with
/// `converged = false`.
pub fn approximate_target(r: f64, v: f64, tol: f64, table: &PrimeTable) -> Result<Approximation> {
    approximate_target_traced(r, v, tol, table).map(|(a, _)| a)
}

/// [`approximate_target`], also returning the trace it built.
pub fn approximate_target_traced(
    r: f64,
    v: f64,
    tol: f64,
    table: &PrimeTable,
) -> Result<(Approximation, GreedyTrace)> {
    check_exponent(r)?;
    check_zeta_domain(r)?;
    let zeta = 1.0 + zeta_minus_one(r)?;
    if !(1.0..zeta).contains(&v) {
        return Err(Error::domain(format!(
            "target must lie in [1, ζ(r)) = [1, {zeta}), got {v}"
        )));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    // ln_1p keeps the target bit-identical to partial sums such as 1 + 2^-2.
    let target = (v - 1.0).ln_1p();
    let cap = MAX_STEPS.min(table.len());
    let guaranteed = r <= eta_cached();

    let mut greedy = Greedy::new(r, target, table);
    let mut steps = Vec::new();
    let mut best: Option<Approximation> = None;
    let mut checkpoint = 1;
    loop {
        while steps.len() < checkpoint {
            steps.push(greedy.step()?);
        }
        let witness = witness_from(&steps, checkpoint);
        let achieved = sigma_factored(-r, &witness);
        let error = (achieved - v).abs();
        let converged = error <= tol;
        if best.as_ref().is_none_or(|b| error < b.error) {
            best = Some(Approximation {
                r,
                target: v,
                witness,
                achieved,
                error,
                steps: checkpoint,
                converged,
                guaranteed,
            });
        }
        if converged || checkpoint == cap {
            break;
        }
        checkpoint = (checkpoint * 2).min(cap);
    }
    let trace = GreedyTrace { r, target, steps };
    Ok((best.expect("at least one checkpoint"), trace))
}
