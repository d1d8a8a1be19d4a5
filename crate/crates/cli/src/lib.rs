//! Command-line front end for `divdense`.
//!
//! Exit codes: 0 success, 1 internal failure, 2 domain error, 3 the
//! approximation did not converge, 64 usage error.

pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use divdense::density::{self, CENSUS_LABEL, DEFAULT_ETA_TOL};
use divdense::greedy::approximate_target_traced;
use divdense::primes::DEFAULT_LIMIT;
use divdense::{analytic, scan, Error, GapInterval, PrimeTable};
use serde::Serialize;
use serde_json::json;

use crate::output::{to_json, to_value, Envelope};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "divdense",
    version,
    about = "Generalized divisor functions and the density of their ranges"
)]
struct Cli {
    /// Print a JSON envelope instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Prime sieve bound.
    #[arg(long, global = true, default_value_t = DEFAULT_LIMIT, value_name = "N")]
    table_limit: u64,

    /// Load the prime table from this cache file, creating it if needed.
    #[arg(long, global = true, value_name = "PATH")]
    prime_cache: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate σ_t(n).
    #[command(allow_negative_numbers = true)]
    Sigma { t: f64, n: u64 },
    /// Evaluate ζ(r).
    Zeta { r: f64 },
    /// Decide whether the range of σ_{-r} is dense in [1, ζ(r)).
    Dense { r: f64 },
    /// List the merged gap intervals found at r (a lower bound on the gap count).
    Gaps { r: f64 },
    /// Locate the critical exponent η.
    Eta {
        #[arg(long, default_value_t = DEFAULT_ETA_TOL)]
        tol: f64,
    },
    /// Locate the smallest root of F(m, r) = ζ(r) in (1, 8].
    Critical {
        m: usize,
        #[arg(long, default_value_t = DEFAULT_ETA_TOL)]
        tol: f64,
    },
    /// Build an integer whose σ_{-r} value is within tol of v.
    Approx {
        r: f64,
        v: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Write the greedy trace as text to this file.
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
    },
    /// Tabulate σ_{-r}(n) for n <= max-n.
    Scan {
        r: f64,
        #[arg(long)]
        max_n: u64,
        /// Write the sorted table as CSV.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        /// Also report candidate gaps of at least this width.
        #[arg(long, value_name = "W")]
        min_width: Option<f64>,
    },
    /// Check that no σ_{-r}(n), n <= max-n, lies strictly inside [lo, hi).
    VerifyGap {
        r: f64,
        lo: f64,
        hi: f64,
        #[arg(long)]
        max_n: u64,
    },
    /// List indices j with p_{j+1} / p_j >= √2 among primes up to the limit.
    VerifyLemma {
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: u64,
    },
}

enum Failure {
    Core(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

/// What a command produced: the envelope plus its plain-text rendering.
struct Report {
    envelope: Envelope,
    text: String,
    exit: i32,
}

impl Report {
    fn new(envelope: Envelope, result: impl Serialize, text: String) -> Self {
        let mut envelope = envelope;
        envelope.result = to_value(&result);
        Report {
            envelope,
            text,
            exit: EXIT_OK,
        }
    }
}

fn load_table(cli: &Cli, limit: u64) -> Result<PrimeTable, Error> {
    match &cli.prime_cache {
        Some(path) => PrimeTable::load_or_build(path, limit),
        None => PrimeTable::new(limit),
    }
}

fn fmt_gap(g: &GapInterval) -> String {
    let source = if g.m == 0 {
        "merged".to_string()
    } else {
        format!("m={}", g.m)
    };
    format!("[{}, {})  {source}", g.lo, g.hi)
}

fn list(items: &[usize]) -> String {
    if items.is_empty() {
        "none".into()
    } else {
        items
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

fn marginal_warnings(r: f64, marginal: &[usize]) -> Vec<String> {
    marginal
        .iter()
        .map(|m| format!("marginal inequality: F({m}, {r}) is within the guard band of ζ({r})"))
        .collect()
}

fn execute(cli: &Cli) -> Result<Report, Failure> {
    let report = match &cli.command {
        &Command::Sigma { t, n } => {
            let value = divdense::sigma(t, n)?;
            let env = Envelope::new("sigma").param("t", t).param("n", n);
            Report::new(env, json!({ "value": value }), format!("{value}\n"))
        }
        &Command::Zeta { r } => {
            let value = analytic::zeta(r)?;
            Report::new(
                Envelope::new("zeta").param("r", r),
                json!({ "value": value }),
                format!("{value}\n"),
            )
        }
        &Command::Dense { r } => {
            let table = load_table(cli, cli.table_limit)?;
            let rep = density::is_dense(r, &table)?;
            let mut text = format!(
                "r = {r}: {}\nchecked m: {}\nfailing m: {}\n",
                if rep.dense { "dense" } else { "not dense" },
                list(&rep.checked_m),
                list(&rep.failing_m)
            );
            for g in &rep.gaps {
                text.push_str(&format!("gap {}\n", fmt_gap(g)));
            }
            let mut env = Envelope::new("dense")
                .param("r", r)
                .param("table_limit", cli.table_limit);
            env.warnings = marginal_warnings(r, &rep.marginal_m);
            Report::new(env, &rep, text)
        }
        &Command::Gaps { r } => {
            let table = load_table(cli, cli.table_limit)?;
            let census = density::gap_census(r, &table)?;
            let mut text = format!("{CENSUS_LABEL}\ngaps: {}\n", census.lower_bound);
            for g in &census.gaps {
                text.push_str(&format!("{}\n", fmt_gap(g)));
            }
            let mut env = Envelope::new("gaps")
                .param("r", r)
                .param("table_limit", cli.table_limit);
            env.warnings = marginal_warnings(r, &census.marginal_m);
            let mut result = to_value(&census);
            result["label"] = json!(CENSUS_LABEL);
            Report::new(env, result, text)
        }
        &Command::Eta { tol } => {
            let value = density::eta(tol)?;
            Report::new(
                Envelope::new("eta").param("tol", tol),
                json!({ "eta": value }),
                format!("{value}\n"),
            )
        }
        &Command::Critical { m, tol } => {
            let table = load_table(cli, cli.table_limit)?;
            let root = density::critical_exponent(m, tol, &table)?;
            let text = root.map_or("none\n".to_string(), |r| format!("{r}\n"));
            let env = Envelope::new("critical").param("m", m).param("tol", tol);
            Report::new(env, json!({ "root": root }), text)
        }
        Command::Approx { r, v, tol, trace } => {
            let (r, v, tol) = (*r, *v, *tol);
            let table = load_table(cli, cli.table_limit)?;
            let (approx, full_trace) = approximate_target_traced(r, v, tol, &table)?;
            if let Some(path) = trace {
                let mut w = BufWriter::new(File::create(path)?);
                w.write_all(full_trace.to_text().as_bytes())?;
                w.flush()?;
            }
            let mut env = Envelope::new("approx")
                .param("r", r)
                .param("v", v)
                .param("tol", tol);
            if !approx.guaranteed {
                env.warnings.push(format!(
                    "no-guarantee: r = {r} exceeds η; the target may lie in a gap"
                ));
            }
            if !approx.converged {
                env.warnings.push(format!(
                    "not converged: best error {} after {} primes",
                    approx.error, approx.steps
                ));
            }
            let text = format!(
                "witness: {}\nachieved: {}\nerror: {}\nprimes used: {}\nconverged: {}\nguaranteed: {}\n",
                approx.witness, approx.achieved, approx.error, approx.steps, approx.converged, approx.guaranteed
            );
            let mut report = Report::new(env, &approx, text);
            if !approx.converged {
                report.exit = EXIT_NOT_CONVERGED;
            }
            report
        }
        Command::Scan {
            r,
            max_n,
            csv,
            min_width,
        } => {
            let (r, max_n) = (*r, *max_n);
            let sample = scan::range_scan(r, max_n)?;
            if let Some(path) = csv {
                sample.write_csv(BufWriter::new(File::create(path)?))?;
            }
            let (min_v, min_n) = sample.min().expect("max_n >= 1");
            let (max_v, max_n_at) = sample.max().expect("max_n >= 1");
            let candidates = match min_width {
                Some(w) => Some(sample.candidate_gaps(*w)?),
                None => None,
            };
            let mut text = format!(
                "values: {}\nmin: {min_v} (n = {min_n})\nmax: {max_v} (n = {max_n_at})\n",
                sample.len()
            );
            if let Some(c) = &candidates {
                text.push_str(&format!("candidate gaps (advisory): {}\n", c.len()));
                for g in c {
                    text.push_str(&format!("candidate [{}, {})\n", g.lo, g.hi));
                }
            }
            let mut env = Envelope::new("scan").param("r", r).param("max_n", max_n);
            if let Some(w) = min_width {
                env = env.param("min_width", w);
            }
            if let Some(path) = csv {
                env = env.param("csv", path.display().to_string());
            }
            let result = json!({
                "count": sample.len(),
                "min": { "value": min_v, "n": min_n },
                "max": { "value": max_v, "n": max_n_at },
                "candidate_gaps": candidates,
            });
            Report::new(env, result, text)
        }
        &Command::VerifyGap { r, lo, hi, max_n } => {
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(Error::Domain(format!("need lo < hi, got [{lo}, {hi})")).into());
            }
            let sample = scan::range_scan(r, max_n)?;
            let gap = GapInterval { lo, hi, m: 0 };
            let inside = sample.values_in(lo + scan::GAP_GUARD, hi - scan::GAP_GUARD);
            let empty = inside.is_empty();
            let mut text = format!("{}\n", if empty { "empty" } else { "not empty" });
            if let Some(&(v, n)) = inside.first() {
                text.push_str(&format!(
                    "first value inside: {v} (n = {n}); {} values inside\n",
                    inside.len()
                ));
            }
            debug_assert_eq!(empty, sample.gap_is_empty(&gap));
            let env = Envelope::new("verify-gap")
                .param("r", r)
                .param("lo", lo)
                .param("hi", hi)
                .param("max_n", max_n);
            let result = json!({
                "empty": empty,
                "inside_count": inside.len(),
                "first_inside": inside.first().map(|&(value, n)| json!({ "value": value, "n": n })),
            });
            Report::new(env, result, text)
        }
        &Command::VerifyLemma { limit } => {
            let table = load_table(cli, limit)?;
            let exceptions = table.verify_ratio_lemma();
            let text = format!(
                "primes up to {limit}: {}\nindices j with p(j+1)/p(j) >= sqrt(2): {}\n",
                table.len(),
                list(&exceptions)
            );
            let env = Envelope::new("verify-lemma").param("limit", limit);
            let result = json!({
                "prime_count": table.len(),
                "largest_prime": table.largest(),
                "exceptions": exceptions,
            });
            Report::new(env, result, text)
        }
    };
    Ok(report)
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let written = if cli.json {
                writeln!(out, "{}", to_json(&report.envelope))
            } else {
                let warnings: String = report
                    .envelope
                    .warnings
                    .iter()
                    .map(|w| format!("warning: {w}\n"))
                    .collect();
                write!(out, "{}{warnings}", report.text)
            };
            match written {
                Ok(()) => report.exit,
                Err(_) => EXIT_INTERNAL,
            }
        }
        Err(Failure::Core(e)) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_domain() {
                EXIT_DOMAIN
            } else {
                EXIT_INTERNAL
            }
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INTERNAL
        }
    }
}
