//! `qbat`: command-line front end for charge-retrieval simulations.
//!
//! Three subcommands: `compute` runs one configured instance, `sweep` runs
//! one record per swept parameter value, and `verify` runs the seeded check
//! suite. Records go to `--out` or stdout; provenance and diagnostics go to
//! stderr. Exit codes: 0 success, 1 verification failure, 2 usage or
//! configuration error, 3 capability error.

mod config;
mod error;
mod record;
mod run;
mod verify_cmd;

use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{OutputFormat, RunConfig};
use error::{CliError, CliResult};
use record::Record;
use run::{Diagnostics, SweepSpec};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "qbat",
    version,
    about = "Quantum-battery charge retrieval simulator"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one configured instance and emit a single record.
    Compute(ComputeArgs),
    /// Vary one parameter and emit a record per value.
    Sweep(SweepArgs),
    /// Run the verification suite and report per-check results.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format, overriding the configuration file.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Worker thread count (default: QBAT_WORKERS, then available cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Measurement-search seed, overriding the configuration file.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ComputeArgs {
    /// Configuration file (JSON).
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Configuration file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Parameter to vary (beta, alpha, theta, or p) and its
    /// comma-separated values.
    #[arg(long, num_args = 2, value_names = ["PARAM", "VALUES"])]
    sweep: Vec<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Check to run (prop1, thm1, thm2, thm3, cor1, case1) or all.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Instances per check, overriding the per-check defaults.
    #[arg(long)]
    instances: Option<usize>,
    /// Suite seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Worker thread count (default: QBAT_WORKERS, then available cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn dispatch(cli: Cli) -> CliResult<i32> {
    match cli.cmd {
        Cmd::Compute(args) => {
            init_workers(args.output.workers)?;
            let mut cfg = RunConfig::load(&args.config)?;
            apply_seed(&mut cfg, args.output.seed);
            let results = run::run_all(std::slice::from_ref(&cfg))?;
            emit_results(&cfg, &args.output, &results)?;
            Ok(0)
        }
        Cmd::Sweep(args) => {
            init_workers(args.output.workers)?;
            let mut cfg = RunConfig::load(&args.config)?;
            apply_seed(&mut cfg, args.output.seed);
            if args.sweep.len() != 2 {
                return Err(CliError::Config(
                    "--sweep takes a parameter name and a comma-separated \
                     values list"
                        .into(),
                ));
            }
            let spec = SweepSpec::parse(&args.sweep[0], &args.sweep[1])?;
            let configs = spec.expand(&cfg)?;
            let results = run::run_all(&configs)?;
            emit_results(&cfg, &args.output, &results)?;
            Ok(0)
        }
        Cmd::Verify(args) => {
            init_workers(args.workers)?;
            let names = verify_cmd::select_checks(&args.suite)?;
            eprintln!(
                "qbat {}: verifying {} check(s), seed {}",
                env!("CARGO_PKG_VERSION"),
                names.len(),
                args.seed
            );
            let reports = verify_cmd::run_checks(&names, args.instances, args.seed)?;
            let stderr = io::stderr();
            verify_cmd::write_summary(&mut stderr.lock(), &reports)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            verify_cmd::write_failures(&mut stderr.lock(), &reports)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            write_out(args.out.as_deref(), |w| {
                verify_cmd::write_report(w, &reports, args.format.into())
            })?;
            Ok(if reports.iter().all(|r| r.passed()) {
                0
            } else {
                1
            })
        }
    }
}

/// Overrides the configured measurement-search seed from the flag.
fn apply_seed(cfg: &mut RunConfig, seed: Option<u64>) {
    if let Some(seed) = seed {
        cfg.optimizer.seed = seed;
    }
}

/// Builds the global worker pool. The flag wins; otherwise QBAT_WORKERS is
/// consulted (ignored when unparseable); otherwise the default pool stands.
fn init_workers(flag: Option<usize>) -> CliResult<()> {
    let requested = match flag {
        Some(0) => {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        Some(n) => Some(n),
        None => std::env::var("QBAT_WORKERS")
            .ok()
            .and_then(|v| v.parse().ok())
            .filter(|&n: &usize| n >= 1),
    };
    if let Some(n) = requested {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Internal(format!("worker pool: {e}")))?;
    }
    Ok(())
}

/// Writes records to the resolved destination and diagnostics to stderr.
fn emit_results(
    cfg: &RunConfig,
    output: &OutputArgs,
    results: &[(Record, Diagnostics)],
) -> CliResult<()> {
    let format: OutputFormat = output.format.map(Into::into).unwrap_or(cfg.output.format);
    let path = output.out.as_deref().or(cfg.output.path.as_deref());

    eprintln!(
        "qbat {}: {} record(s), config {:016x}",
        env!("CARGO_PKG_VERSION"),
        results.len(),
        cfg.content_hash()
    );
    for (i, (rec, diag)) in results.iter().enumerate() {
        let closed = diag
            .weak_closed_form
            .map_or_else(|| "n/a".to_string(), |v| format!("{v:.9e}"));
        eprintln!(
            "record {i}: weak {:.9e} (closed form {closed}), strong {:.9e}, \
             restarts {}+{}",
            rec.w_weak_raw, rec.w_strong_raw, diag.restarts.0, diag.restarts.1
        );
    }

    let records: Vec<Record> = results.iter().map(|(r, _)| r.clone()).collect();
    write_out(path, |w| match format {
        OutputFormat::Csv => record::write_csv(w, &records),
        OutputFormat::Json => record::write_json(w, &records),
    })
}

/// Runs a writer against the output file, or stdout when no path is given.
fn write_out<F>(path: Option<&Path>, write: F) -> CliResult<()>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match path {
        Some(p) => {
            let file =
                File::create(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            let mut w = BufWriter::new(file);
            write(&mut w)
                .and_then(|()| w.flush())
                .map_err(|e| CliError::Internal(format!("{}: {e}", p.display())))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w).map_err(|e| CliError::Internal(format!("stdout: {e}")))
        }
    }
}
