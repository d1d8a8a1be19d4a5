//! End-to-end acceptance checks, one line of output per criterion.
//!
//! Runs without the libtest harness so each check reports PASS/FAIL with its
//! runtime; the process exits non-zero if any check fails.

use std::f64::consts::PI;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use divdense::density::f_value;
use divdense::greedy::MAX_STEPS;
use divdense::primes::{DEFAULT_LIMIT, DUSART_THRESHOLD};
use divdense::{
    approximate_target, gap_at, gap_census, greedy_trace, is_dense, log_sigma,
    partial_euler_product, range_scan, sigma, verify_gap_empty, zeta, GapInterval, PrimeTable,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Shared default table, built before any check is timed.
fn table() -> &'static PrimeTable {
    static TABLE: OnceLock<PrimeTable> = OnceLock::new();
    TABLE.get_or_init(|| PrimeTable::new(DEFAULT_LIMIT).expect("default table"))
}

fn eta_via_cli() -> Check {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = divdense_cli::run(["divdense", "eta", "--tol", "1e-9"], &mut out, &mut err);
    ensure(code == 0, || {
        format!("exit code {code}: {}", String::from_utf8_lossy(&err))
    })?;
    let text = String::from_utf8(out).map_err(|e| e.to_string())?;
    let eta: f64 = text.trim().parse().map_err(|e| format!("{text:?}: {e}"))?;
    ensure((eta - 1.8877909).abs() <= 1e-6, || format!("eta = {eta}"))
}

fn sigma2_gap() -> Check {
    let table = table();
    let start = Instant::now();
    let gap = gap_at(1, 2.0, table).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let gap = gap.ok_or("no gap at m = 1")?;
    ensure((gap.lo - PI * PI / 8.0).abs() <= 1e-12, || {
        format!("lo = {}", gap.lo)
    })?;
    let hi = divdense::format::sig17(gap.hi);
    ensure(hi == "1.2500000000000000", || format!("hi printed as {hi}"))?;
    ensure(elapsed < Duration::from_millis(10), || {
        format!("gap_at took {elapsed:?}")
    })
}

fn gap_emptiness_oracle() -> Check {
    let s = range_scan(2.0, 1_000_000).map_err(|e| e.to_string())?;
    let inside = s.values_in(PI * PI / 8.0 + 1e-9, 1.25 - 1e-9);
    ensure(inside.is_empty(), || {
        format!("{} values inside, first {:?}", inside.len(), inside[0])
    })
}

fn phase_transition() -> Check {
    let table = table();
    let below = is_dense(1.8877, table).map_err(|e| e.to_string())?;
    ensure(below.dense, || {
        format!("r = 1.8877 reported not dense: {below:?}")
    })?;
    let above = is_dense(1.8879, table).map_err(|e| e.to_string())?;
    ensure(!above.dense && above.failing_m.contains(&2), || {
        format!("r = 1.8879: {above:?}")
    })
}

fn supercritical() -> Check {
    let table = table();
    for r in [3.01, 4.0, 8.0, 16.0] {
        let f1 = f_value(1, r, table).map_err(|e| e.to_string())?;
        let z = zeta(r).map_err(|e| e.to_string())?;
        ensure(f1 > z, || format!("r = {r}: F(1, r) = {f1} <= ζ(r) = {z}"))?;
        let rep = is_dense(r, table).map_err(|e| e.to_string())?;
        ensure(!rep.dense, || format!("r = {r} reported dense"))?;
    }
    Ok(())
}

fn ratio_lemma() -> Check {
    let table = PrimeTable::new(DUSART_THRESHOLD).map_err(|e| e.to_string())?;
    let exceptions = table.verify_ratio_lemma();
    ensure(exceptions == [1, 2, 4], || {
        format!("exceptions {exceptions:?}")
    })
}

fn greedy_convergence() -> Check {
    let table = table();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = Vec::new();
    for r in [1.2, 1.5, 1.8] {
        let z = zeta(r).map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let v = rng.random_range(1.0..z);
            let approx = approximate_target(r, v, 1e-3, table).map_err(|e| e.to_string())?;
            if approx.error > 1e-3 {
                let sup = partial_euler_product(MAX_STEPS, r, table).map_err(|e| e.to_string())?;
                failures.push(format!(
                    "r = {r}, v = {v}: error {} after {} primes (sup over the first {MAX_STEPS} primes is {sup})",
                    approx.error, approx.steps
                ));
            }
            let trace = greedy_trace(r, (v - 1.0).ln_1p(), approx.steps, table)
                .map_err(|e| e.to_string())?;
            if let Some(s) = trace.steps.iter().find(|s| s.x_sum > v.ln()) {
                failures.push(format!("r = {r}, v = {v}: X_{} = {} > ln v", s.n, s.x_sum));
            }
        }
    }
    ensure(failures.is_empty(), || failures.join("; "))
}

fn witness_identity() -> Check {
    let table = table();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let r = rng.random_range(1.05..4.0);
        let z = zeta(r).map_err(|e| e.to_string())?;
        let x = rng.random_range(0.0..z.ln());
        let steps = rng.random_range(1..=500);
        let trace = greedy_trace(r, x, steps, table).map_err(|e| e.to_string())?;
        let n = rng.random_range(1..=steps);
        let w = trace.witness(n).map_err(|e| e.to_string())?;
        let c = trace.c_value(n).map_err(|e| e.to_string())?;
        let ls = log_sigma(-r, &w);
        ensure((ls - c).abs() <= 1e-11, || {
            format!("r = {r}, x = {x}, n = {n}: log σ = {ls}, C_n = {c}")
        })?;
    }
    Ok(())
}

fn naive_sigma(t: f64, n: u64) -> f64 {
    let mut sum = 0.0;
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            sum += (d as f64).powf(t);
            if d * d != n {
                sum += ((n / d) as f64).powf(t);
            }
        }
        d += 1;
    }
    sum
}

fn oracle_equivalence() -> Check {
    for t in [-2.0, -1.5, -1.0, 0.0, 1.0] {
        for n in 1..=10_000u64 {
            let fast = sigma(t, n).map_err(|e| e.to_string())?;
            let slow = naive_sigma(t, n);
            ensure((fast - slow).abs() <= 1e-12 * slow, || {
                format!("t = {t}, n = {n}: {fast} vs {slow}")
            })?;
        }
    }
    Ok(())
}

fn f_monotonicity() -> Check {
    let table = table();
    for r in [1.2, 1.5, 1.8, 2.0] {
        for m in std::iter::once(3).chain(5..=50) {
            let a = f_value(m, r, table).map_err(|e| e.to_string())?;
            let b = f_value(m + 1, r, table).map_err(|e| e.to_string())?;
            ensure(b > a, || {
                format!("r = {r}, m = {m}: F(m+1) = {b} <= F(m) = {a}")
            })?;
        }
    }
    Ok(())
}

fn census_cross_check() -> Check {
    let table = table();
    let census = gap_census(2.0, table).map_err(|e| e.to_string())?;
    ensure(census.gaps.len() == 2, || {
        format!("{} gaps: {:?}", census.gaps.len(), census.gaps)
    })?;
    // Independent evaluation: ζ(2) = π²/6, gap from the m = 2 family.
    let expected = [
        GapInterval {
            lo: PI * PI / 6.0 * 0.75 * (8.0 / 9.0),
            hi: 10.0 / 9.0,
            m: 2,
        },
        GapInterval {
            lo: PI * PI / 8.0,
            hi: 1.25,
            m: 1,
        },
    ];
    for want in &expected {
        let found = census
            .gaps
            .iter()
            .any(|g| (g.lo - want.lo).abs() <= 1e-12 && (g.hi - want.hi).abs() <= 1e-15);
        ensure(found, || {
            format!("no gap matching {want:?} in {:?}", census.gaps)
        })?;
    }
    for gap in &census.gaps {
        let empty = verify_gap_empty(gap, 2.0, 1_000_000).map_err(|e| e.to_string())?;
        ensure(empty, || format!("gap {gap:?} contains sampled values"))?;
    }
    Ok(())
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    check: fn() -> Check,
}

fn main() {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion {
            id: 1,
            name: "eta reproduction",
            budget: secs(1),
            check: eta_via_cli,
        },
        Criterion {
            id: 2,
            name: "sigma_-2 gap",
            budget: Duration::from_millis(10),
            check: sigma2_gap,
        },
        Criterion {
            id: 3,
            name: "gap emptiness oracle",
            budget: secs(30),
            check: gap_emptiness_oracle,
        },
        Criterion {
            id: 4,
            name: "phase transition",
            budget: secs(1),
            check: phase_transition,
        },
        Criterion {
            id: 5,
            name: "supercritical regime",
            budget: secs(1),
            check: supercritical,
        },
        Criterion {
            id: 6,
            name: "ratio lemma",
            budget: secs(5),
            check: ratio_lemma,
        },
        Criterion {
            id: 7,
            name: "greedy convergence",
            budget: secs(60),
            check: greedy_convergence,
        },
        Criterion {
            id: 8,
            name: "witness identity",
            budget: secs(10),
            check: witness_identity,
        },
        Criterion {
            id: 9,
            name: "oracle equivalence",
            budget: secs(30),
            check: oracle_equivalence,
        },
        Criterion {
            id: 10,
            name: "F monotonicity",
            budget: secs(1),
            check: f_monotonicity,
        },
        Criterion {
            id: 11,
            name: "gap census cross-check",
            budget: secs(30),
            check: census_cross_check,
        },
    ];
    table();
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.check)();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|()| {
            ensure(elapsed <= c.budget, || {
                format!("took {elapsed:?}, budget {:?}", c.budget)
            })
        });
        match outcome {
            Ok(()) => println!("PASS {:>2} {} ({elapsed:.2?})", c.id, c.name),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {} ({elapsed:.2?}): {msg}", c.id, c.name);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
