// SPDX-License-Identifier: Apache-2.0

//! Command-line front end for `classprime`: per-discriminant reports, range
//! scans with deterministic CSV/JSON output, and the acceptance suite.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod scan;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use classprime::stats::WeightKind;

use crate::commands::{LeastPrimeParams, Output, DEFAULT_EPSILON, DEFAULT_N_MAX, DEFAULT_SCAN_RULES, DEFAULT_T, DEFAULT_X_CAP};
use crate::config::{default_threads, ConfigFile, Format, RunConfig, Scale};
use crate::error::CliError;
use crate::report::Report;
use crate::scan::ScanParams;

pub const THREADS_ENV: &str = "CLASSPRIME_THREADS";

#[derive(Debug, Parser)]
#[command(name = "classprime", version, about = "Class groups of imaginary quadratic fields and the primes in their classes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// File of `key=value` lines using the long flag names; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for scans.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,
    /// Largest prime the sieve may be asked for.
    #[arg(long, global = true)]
    pub sieve_cap: Option<u64>,
    /// Refuse class groups larger than this.
    #[arg(long, global = true)]
    pub max_class_number: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DiscArg {
    /// Negative discriminant.
    #[arg(long, allow_negative_numbers = true)]
    pub disc: Option<i64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reduced forms, class number and group structure.
    Forms {
        #[command(flatten)]
        disc: DiscArg,
    },
    /// Least prime in every class and exceptional counts R(D, X).
    LeastPrimes {
        #[command(flatten)]
        disc: DiscArg,
        /// Search bound for least primes, absolute or a scale like `100*h2*log2`.
        #[arg(long)]
        x_cap: Option<Scale>,
        /// Extra thresholds X for R(D, X), comma separated.
        #[arg(long, value_delimiter = ',')]
        x: Vec<Scale>,
        /// Exponent slack in the `h log^(2+eps)|D|` threshold.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Prime sums by class and by character, and their variance.
    Variance {
        #[command(flatten)]
        disc: DiscArg,
        /// Scale T, absolute or like `h2*log2`.
        #[arg(long)]
        t: Option<Scale>,
        /// Test function.
        #[arg(long)]
        weight: Option<WeightKind>,
    },
    /// One CSV row per fundamental discriminant in a range, in decreasing order.
    Scan {
        /// Lower end of the range (inclusive).
        #[arg(long, allow_negative_numbers = true)]
        d_min: Option<i64>,
        /// Upper end of the range (inclusive).
        #[arg(long, allow_negative_numbers = true)]
        d_max: Option<i64>,
        /// Thresholds X for R(D, X), comma separated.
        #[arg(long, value_delimiter = ',')]
        x_rule: Vec<Scale>,
        /// Search bound for least primes.
        #[arg(long)]
        x_cap: Option<Scale>,
        /// Scale T for the variance column.
        #[arg(long)]
        t: Option<Scale>,
        /// Test function for the variance column.
        #[arg(long)]
        weight: Option<WeightKind>,
        /// Leave out the variance column.
        #[arg(long)]
        no_variance: bool,
    },
    /// Compare lattice-point counts against the divisor-sum formula.
    DirichletCheck {
        #[command(flatten)]
        disc: DiscArg,
        /// Check every n <= N.
        #[arg(long)]
        n_max: Option<u64>,
    },
    /// Heegner points, coefficient sizes and least primes by class.
    Heegner {
        #[command(flatten)]
        disc: DiscArg,
        /// Growth parameter in the coefficient bound sqrt|D| * psi.
        #[arg(long)]
        psi_value: Option<f64>,
        /// Search bound for least primes.
        #[arg(long)]
        x_cap: Option<Scale>,
    },
    /// Run the acceptance suite and print one line per criterion.
    Selftest {
        /// Criteria to run, comma separated; all by default.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
    },
}

fn run_config(g: &GlobalArgs, file: &ConfigFile) -> Result<RunConfig, CliError> {
    let d = RunConfig::default();
    let threads = file.pick(g.threads, "threads")?.unwrap_or_else(default_threads);
    if threads == 0 {
        return Err(CliError::BadInput("thread count must be >= 1".into()));
    }
    Ok(RunConfig {
        format: file.format(g.format)?,
        out: file.pick(g.out.clone(), "out")?,
        threads,
        sieve_cap: file.pick(g.sieve_cap, "sieve-cap")?.unwrap_or(d.sieve_cap),
        max_class_number: file.pick(g.max_class_number, "max-class-number")?.unwrap_or(d.max_class_number),
    })
}

fn require_disc(arg: &DiscArg, file: &ConfigFile) -> Result<i64, CliError> {
    file.pick(arg.disc, "disc")?
        .ok_or_else(|| CliError::BadInput("--disc is required".into()))
}

fn scale_or(file: &ConfigFile, flag: Option<Scale>, key: &str, default: &str) -> Result<Scale, CliError> {
    Ok(file.pick(flag, key)?.unwrap_or_else(|| default.parse().expect("valid default")))
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    }
}

/// Writes the table to `--out` or stdout; in CSV mode the summary goes to
/// stderr as `key=value` lines so the table stays machine-readable.
fn emit(report: &Report, cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let text = render(report, cfg.format);
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    if cfg.format == Format::Csv && !report.summary.is_empty() {
        stderr.write_all(report.summary_text().as_bytes())?;
    }
    Ok(())
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Option<CliError>, CliError> {
    let file = match &cli.global.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let cfg = run_config(&cli.global, &file)?;
    let output: Output = match &cli.command {
        Command::Forms { disc } => commands::forms(require_disc(disc, &file)?, &cfg)?,
        Command::LeastPrimes { disc, x_cap, x, epsilon } => {
            let params = LeastPrimeParams {
                x_cap: scale_or(&file, x_cap.clone(), "x-cap", DEFAULT_X_CAP)?,
                epsilon: file.pick(*epsilon, "epsilon")?.unwrap_or(DEFAULT_EPSILON),
                thresholds: file.pick_list(x.clone(), "x")?.unwrap_or_default(),
            };
            commands::least_primes(require_disc(disc, &file)?, &params, &cfg)?
        }
        Command::Variance { disc, t, weight } => {
            let t = file
                .pick(t.clone(), "t")?
                .ok_or_else(|| CliError::BadInput("--t is required".into()))?;
            let weight = file.pick(*weight, "weight")?.unwrap_or(WeightKind::Bump);
            commands::variance(require_disc(disc, &file)?, &t, weight, &cfg)?
        }
        Command::Scan {
            d_min,
            d_max,
            x_rule,
            x_cap,
            t,
            weight,
            no_variance,
        } => {
            let d_min = file
                .pick(*d_min, "d-min")?
                .ok_or_else(|| CliError::BadInput("--d-min is required".into()))?;
            let d_max = file.pick(*d_max, "d-max")?.unwrap_or(-3);
            let params = ScanParams {
                d_min,
                d_max,
                x_rules: file.pick_list(x_rule.clone(), "x-rule")?.unwrap_or_else(|| {
                    DEFAULT_SCAN_RULES.iter().map(|s| s.parse().expect("valid default")).collect()
                }),
                x_cap: scale_or(&file, x_cap.clone(), "x-cap", DEFAULT_X_CAP)?,
                t: if *no_variance {
                    None
                } else {
                    Some(scale_or(&file, t.clone(), "t", DEFAULT_T)?)
                },
                weight: file.pick(*weight, "weight")?.unwrap_or(WeightKind::Bump),
            };
            let outcome = scan::scan(&params, &cfg)?;
            let mut failure = None;
            for (d, e) in outcome.failures {
                writeln!(stderr, "D={d}: {e}")?;
                // identity violations outrank oracle mismatches; bad input is only logged
                match (&failure, &e) {
                    (_, CliError::Identity(_)) => failure = Some(e),
                    (None, CliError::Mismatch(_)) => failure = Some(e),
                    _ => {}
                }
            }
            Output {
                report: outcome.report,
                failure,
            }
        }
        Command::DirichletCheck { disc, n_max } => {
            let n_max = file.pick(*n_max, "n-max")?.unwrap_or(DEFAULT_N_MAX);
            commands::dirichlet_check(require_disc(disc, &file)?, n_max, &cfg)?
        }
        Command::Heegner { disc, psi_value, x_cap } => {
            let psi = file.pick(*psi_value, "psi-value")?.unwrap_or(1.0);
            let cap = scale_or(&file, x_cap.clone(), "x-cap", DEFAULT_X_CAP)?;
            commands::heegner(require_disc(disc, &file)?, psi, &cap, &cfg)?
        }
        Command::Selftest { criteria } => {
            let ids: Vec<u8> = if criteria.is_empty() {
                acceptance::CRITERIA.to_vec()
            } else {
                criteria.clone()
            };
            let outcomes = acceptance::run_all(&ids, |o| {
                let _ = writeln!(stdout, "{o}");
                let _ = stdout.flush();
            });
            let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.to_string()).collect();
            writeln!(stdout, "{} of {} criteria passed", outcomes.len() - failed.len(), outcomes.len())?;
            return Ok((!failed.is_empty()).then(|| CliError::Mismatch(format!("criteria failed: {}", failed.join(",")))));
        }
    };
    emit(&output.report, &cfg, stdout, stderr)?;
    Ok(output.failure)
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match dispatch(cli, stdout, stderr) {
        Ok(None) => 0,
        Ok(Some(e)) | Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
