use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use tourney_core::bounds::{bounds_report, DEFAULT_EPSILON};
use tourney_core::exact::{expand_with, extend_with, r_exact, ExpandOptions, DEFAULT_LIMIT};
use tourney_core::sim::{estimate_r_with, tie_stats, SimConfig, TieWindow};
use tourney_core::table::{read_table, write_table, Provenance};
use tourney_core::{oracle, verify, Error, FrequencyTable};

#[derive(Parser)]
#[command(name = "tourney", version, about = "Unique maximum scores in random round-robin tournaments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact frequency table and r_n by dynamic programming.
    Exact {
        #[arg(long)]
        n: usize,
        /// Write the frequency table here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Largest n accepted.
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: usize,
        #[arg(long)]
        workers: Option<usize>,
        /// Fractional digits of the truncated decimal.
        #[arg(long, default_value_t = 10)]
        digits: usize,
    },
    /// Table for n+1 players from a table for n players.
    Extend {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// r_n from a table file.
    Rn {
        #[arg(long = "in")]
        input: PathBuf,
        /// Check every table invariant while reading.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 10)]
        digits: usize,
    },
    /// Monte-Carlo estimate of r_n.
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        reps: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        /// Also report tie and maximum-score statistics.
        #[arg(long)]
        ties: bool,
        /// Count ties only strictly above the threshold.
        #[arg(long, requires = "ties")]
        strict_ties: bool,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Thresholds, tails and bounds for one n.
    Bounds {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
    /// Brute-force frequency table (n <= 7).
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suite up to n players.
    Verify {
        #[arg(long)]
        n: usize,
    },
}

/// Failed verification: exit status 1.
#[derive(Debug)]
struct VerificationFailed(String);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for VerificationFailed {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli.command, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            let usage = e.chain().any(|c| {
                matches!(
                    c.downcast_ref::<Error>(),
                    Some(Error::Argument(_) | Error::Domain(_) | Error::LimitExceeded { .. })
                )
            });
            eprintln!("error: {}", one_line(&e));
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}

fn one_line(e: &anyhow::Error) -> String {
    e.chain().map(|c| c.to_string()).collect::<Vec<_>>().join(": ")
}

fn kv(out: &mut impl Write, key: &str, value: impl std::fmt::Display) -> io::Result<()> {
    writeln!(out, "#kv {key}={value}")
}

fn save(table: &FrequencyTable, provenance: Provenance, path: &Path) -> anyhow::Result<()> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_table(table, provenance, BufWriter::new(f))?;
    Ok(())
}

fn load(path: &Path, verify: bool) -> anyhow::Result<FrequencyTable> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let file = read_table(BufReader::new(f), verify).with_context(|| format!("reading {}", path.display()))?;
    Ok(file.table)
}

fn report_exact(out: &mut impl Write, table: &FrequencyTable, digits: usize) -> io::Result<()> {
    let r = r_exact(table);
    let ratio = r.ratio();
    writeln!(
        out,
        "r_{} = {}/{} = {}/2^{} = {}/{} = {}",
        r.n,
        r.unique_max_count,
        r.total,
        r.unique_max_count,
        tourney_core::tournament::game_count(r.n),
        ratio.numer(),
        ratio.denom(),
        r.decimal(digits)
    )?;
    kv(out, "n", r.n)?;
    kv(out, "score_sequences", table.len())?;
    kv(out, "unique_max_count", &r.unique_max_count)?;
    kv(out, "total", &r.total)?;
    kv(out, "r_numerator", ratio.numer())?;
    kv(out, "r_denominator", ratio.denom())?;
    kv(out, "r_decimal", r.decimal(digits))
}

fn run(command: Command, out: &mut impl Write) -> anyhow::Result<()> {
    match command {
        Command::Exact { n, out: path, limit, workers, digits } => {
            let table = expand_with(n, &ExpandOptions { limit, workers })?;
            report_exact(out, &table, digits)?;
            if let Some(p) = path {
                save(&table, Provenance::Expand, &p)?;
            }
        }
        Command::Extend { input, out: path, workers } => {
            let table = load(&input, true)?;
            let next = extend_with(&table, workers)?;
            report_exact(out, &next, 10)?;
            if let Some(p) = path {
                save(&next, Provenance::Extend, &p)?;
            }
        }
        Command::Rn { input, verify, digits } => {
            let table = load(&input, verify)?;
            report_exact(out, &table, digits)?;
        }
        Command::Simulate { n, reps, seed, epsilon, ties, strict_ties, workers } => {
            let config = SimConfig::new(n, reps, seed)?.with_epsilon(epsilon);
            let e = estimate_r_with(&config, workers);
            writeln!(out, "n = {n}, M = {reps}, seed = {seed}: r_hat = {:.6} (se {:.6})", e.r_hat, e.se)?;
            kv(out, "n", n)?;
            kv(out, "reps", reps)?;
            kv(out, "seed", seed)?;
            kv(out, "successes", e.successes)?;
            kv(out, "r_hat", format!("{:.12}", e.r_hat))?;
            kv(out, "se", format!("{:.12}", e.se))?;
            if ties {
                let window = if strict_ties { TieWindow::Above } else { TieWindow::AtOrAbove };
                let s = tie_stats(&config.with_epsilon(epsilon), window, workers)?;
                writeln!(
                    out,
                    "t = {}: P(W_n > 0) ~ {:.6}, P(s* > t) ~ {:.6}, center = {:.4}",
                    s.t, s.frac_w_positive, s.frac_smax_above_t, s.center
                )?;
                kv(out, "epsilon", epsilon)?;
                kv(out, "t", s.t)?;
                kv(out, "tie_window", if strict_ties { "above" } else { "at_or_above" })?;
                kv(out, "frac_w_positive", format!("{:.12}", s.frac_w_positive))?;
                kv(out, "frac_smax_above_t", format!("{:.12}", s.frac_smax_above_t))?;
                kv(out, "frac_unique_max", format!("{:.12}", s.frac_unique_max))?;
                kv(out, "center", format!("{:.12}", s.center))?;
                for (q, v) in &s.centered_smax_quantiles {
                    kv(out, &format!("centered_smax_q{q}"), format!("{v:.6}"))?;
                }
                if s.inconsistent != 0 {
                    return Err(VerificationFailed(format!(
                        "{} replications reached t without a tie yet shared the maximum",
                        s.inconsistent
                    ))
                    .into());
                }
            }
        }
        Command::Bounds { n, epsilon } => {
            let r = bounds_report(n, epsilon)?;
            write!(out, "{r}")?;
            for (k, v) in r.fields() {
                kv(out, k, v)?;
            }
        }
        Command::Oracle { n, out: path } => {
            let table = oracle::enumerate_all(n)?;
            report_exact(out, &table, 10)?;
            if let Some(p) = path {
                save(&table, Provenance::Oracle, &p)?;
            }
        }
        Command::Verify { n } => {
            let report = verify::verify(n)?;
            write!(out, "{report}")?;
            if let Some(f) = report.first_failure() {
                return Err(VerificationFailed(format!("{}: {}", f.name, f.detail)).into());
            }
            kv(out, "verified", n)?;
        }
    }
    Ok(())
}
