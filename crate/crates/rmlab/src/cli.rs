//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 a verdict failed, 3 I/O failure,
//! 4 numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rmlab_core::MatrixParams;

use crate::bench::run_bench;
use crate::error::{Error, Result};
use crate::experiments::{self, ExperimentConfig, Tolerances, TOLERANCE_KEYS};
use crate::io::{self, Format};

#[derive(Parser, Debug)]
#[command(name = "rmlab", version, about = "Monte Carlo checks for the top eigenvalues of noncentral sample covariance matrices")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Run replications and write the per-replication samples.
    Simulate(RunArgs),
    /// Compare the law of lambda1 with its normal limit.
    #[command(after_help = tolerance_help())]
    VerifyClt(RunArgs),
    /// Fit the decay of both estimator errors over a size grid.
    #[command(after_help = tolerance_help())]
    ErrorScaling(ScalingArgs),
    /// Compare pooled spectra with the limiting bulk law.
    #[command(after_help = tolerance_help())]
    BulkCheck(BulkArgs),
    /// Check exact identities, the row-sum moment and the second eigenvalue edge.
    #[command(after_help = tolerance_help())]
    IdentityCheck(RunArgs),
    /// Compare the top eigenvalue of the centered covariance with the bulk edge.
    #[command(after_help = tolerance_help())]
    EdgeCheck(RunArgs),
    /// Time the row-sum estimators against a full eigensolution.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct MatrixArgs {
    /// Rows of X.
    #[arg(long, default_value_t = 256)]
    p: usize,
    /// Columns of X.
    #[arg(long, default_value_t = 512)]
    n: usize,
    /// Entry mean.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Entry standard deviation.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Master seed; replication i uses stream (seed, i).
    #[arg(long, env = "RMLAB_SEED", default_value_t = 42)]
    seed: u64,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    /// Number of replications.
    #[arg(long, default_value_t = 200)]
    reps: u64,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    parallelism: usize,
    /// Output file (samples, or the report for aggregate-only commands).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sample file format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct ScalingArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Sizes as p1:n1,p2:n2,... at one fixed ratio.
    #[arg(long, value_parser = parse_grid, default_value = "64:128,128:256,256:512,512:1024")]
    grid: Grid,
}

#[derive(Args, Debug)]
struct BulkArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Histogram bins.
    #[arg(long, default_value_t = 40)]
    bins: usize,
    /// Histogram range lo:hi (default: bulk edges widened by 0.1).
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    range: Option<(f64, f64)>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    /// Timed samples per path (at least 3).
    #[arg(long, default_value_t = 5)]
    repeat: usize,
    /// Also write the result to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
struct Grid(Vec<(usize, usize)>);

fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    s.split(',')
        .map(|pair| {
            let (p, n) = pair.split_once(':').ok_or_else(|| format!("expected p:n, got {pair:?}"))?;
            let p = p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}"))?;
            let n = n.trim().parse::<usize>().map_err(|e| format!("{n:?}: {e}"))?;
            Ok((p, n))
        })
        .collect::<std::result::Result<Vec<_>, String>>()
        .map(Grid)
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let lo = lo.trim().parse::<f64>().map_err(|e| format!("{lo:?}: {e}"))?;
    let hi = hi.trim().parse::<f64>().map_err(|e| format!("{hi:?}: {e}"))?;
    Ok((lo, hi))
}

fn tolerance_help() -> String {
    let mut s = String::from("Tolerance overrides (--tol-KEY VALUE):\n");
    for (key, default, meaning) in TOLERANCE_KEYS {
        s.push_str(&format!("  --tol-{key:<14} {meaning} [default: {default}]\n"));
    }
    s
}

/// A fully validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Simulate { config: ExperimentConfig, format: Format },
    VerifyClt { config: ExperimentConfig, format: Format },
    ErrorScaling { config: ExperimentConfig },
    BulkCheck { config: ExperimentConfig },
    IdentityCheck { config: ExperimentConfig, format: Format },
    EdgeCheck { config: ExperimentConfig },
    Bench { params: MatrixParams, repeat: usize, out: Option<PathBuf> },
}

/// Outcome of argument parsing.
#[derive(Debug, Clone, PartialEq)]
pub enum Parsed {
    Run(Command),
    /// `--help` or `--version` text, to print and exit 0.
    Info(String),
}

/// Pulls `--tol-KEY VALUE` and `--tol-KEY=VALUE` out of `args`.
fn split_tolerances(args: Vec<OsString>) -> Result<(Vec<OsString>, Tolerances)> {
    let mut rest = Vec::with_capacity(args.len());
    let mut tol = Tolerances::default();
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        let Some(flag) = arg.to_str().and_then(|s| s.strip_prefix("--tol-")).map(str::to_owned) else {
            rest.push(arg);
            continue;
        };
        let (key, raw) = match flag.split_once('=') {
            Some((k, v)) => (k.to_owned(), v.to_owned()),
            None => {
                let v = it.next().ok_or_else(|| Error::Usage(format!("--tol-{flag} needs a value")))?;
                let v = v.into_string().map_err(|_| Error::Usage(format!("--tol-{flag}: value is not UTF-8")))?;
                (flag.clone(), v)
            }
        };
        let value = raw
            .parse::<f64>()
            .map_err(|e| Error::Usage(format!("--tol-{key}: invalid value {raw:?}: {e}")))?;
        tol.set(&key, value)?;
    }
    Ok((rest, tol))
}

fn params_of(m: &MatrixArgs) -> Result<MatrixParams> {
    MatrixParams::new(m.p, m.n, m.mu, m.sigma, m.seed).map_err(|e| {
        let flag = match e {
            rmlab_core::Error::InvalidParams(msg) => msg.split_whitespace().next().unwrap_or("").to_owned(),
            _ => String::new(),
        };
        Error::Usage(format!("invalid --{flag}: {e}"))
    })
}

fn config_of(run: &RunArgs, tol: &Tolerances) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::new(params_of(&run.matrix)?, run.reps);
    config.parallelism = run.parallelism;
    config.output_path = run.out.clone();
    config.tolerances = tol.clone();
    Ok(config)
}

pub fn parse<I, T>(args: I) -> Result<Parsed>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let (args, tol) = split_tolerances(args.into_iter().map(Into::into).collect())?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(Parsed::Info(e.render().to_string())),
                _ => Err(Error::Usage(e.render().to_string().trim_end().to_owned())),
            };
        }
    };
    let command = match cli.command {
        Sub::Simulate(run) => Command::Simulate { config: config_of(&run, &tol)?, format: run.format },
        Sub::VerifyClt(run) => Command::VerifyClt { config: config_of(&run, &tol)?, format: run.format },
        Sub::IdentityCheck(run) => Command::IdentityCheck { config: config_of(&run, &tol)?, format: run.format },
        Sub::EdgeCheck(run) => Command::EdgeCheck { config: config_of(&run, &tol)? },
        Sub::ErrorScaling(args) => {
            let mut config = config_of(&args.run, &tol)?;
            config.size_grid = Some(args.grid.0);
            Command::ErrorScaling { config }
        }
        Sub::BulkCheck(args) => {
            let mut config = config_of(&args.run, &tol)?;
            config.bins = args.bins;
            config.range = args.range;
            Command::BulkCheck { config }
        }
        Sub::Bench(args) => {
            if args.repeat < 3 {
                return Err(Error::Usage(format!("--repeat must be at least 3, got {}", args.repeat)));
            }
            Command::Bench { params: params_of(&args.matrix)?, repeat: args.repeat, out: args.out }
        }
    };
    if let Command::Simulate { config, .. }
    | Command::VerifyClt { config, .. }
    | Command::IdentityCheck { config, .. }
    | Command::EdgeCheck { config }
    | Command::ErrorScaling { config }
    | Command::BulkCheck { config } = &command
    {
        config.validate()?;
    }
    Ok(Parsed::Run(command))
}

fn stdout_error(e: std::io::Error) -> Error {
    Error::Io { path: PathBuf::from("<stdout>"), source: e }
}

fn emit_report<W: Write, T: serde::Serialize>(out: &mut W, report: &T, file: Option<&Path>) -> Result<()> {
    io::write_report(&mut *out, report)?;
    out.flush().map_err(stdout_error)?;
    if let Some(path) = file {
        let mut buf = Vec::new();
        io::write_report(&mut buf, report)?;
        std::fs::write(path, buf).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    }
    Ok(())
}

fn verdict_code(passed: bool) -> i32 {
    if passed {
        0
    } else {
        2
    }
}

/// Runs `command`, writing reports to `out`; returns the exit code.
pub fn execute<W: Write>(command: &Command, out: &mut W) -> Result<i32> {
    match command {
        Command::Simulate { config, format } => {
            let samples = experiments::simulate(config)?;
            match &config.output_path {
                Some(path) => io::write_samples_to_path(path, &config.params, &samples, *format)?,
                None => io::write_samples(&mut *out, &config.params, &samples, *format)?,
            }
            out.flush().map_err(stdout_error)?;
            Ok(0)
        }
        Command::VerifyClt { config, format } => {
            let (report, samples) = experiments::verify_clt(config)?;
            if let Some(path) = &config.output_path {
                io::write_samples_to_path(path, &config.params, &samples, *format)?;
            }
            emit_report(out, &report, None)?;
            Ok(verdict_code(report.passed()))
        }
        Command::IdentityCheck { config, format } => {
            let (report, records) = experiments::identity_checks(config)?;
            if let Some(path) = &config.output_path {
                let samples: Vec<_> = records.iter().map(|r| r.sample).collect();
                io::write_samples_to_path(path, &config.params, &samples, *format)?;
            }
            emit_report(out, &report, None)?;
            Ok(verdict_code(report.passed()))
        }
        Command::ErrorScaling { config } => {
            let report = experiments::error_scaling(config)?;
            emit_report(out, &report, config.output_path.as_deref())?;
            Ok(verdict_code(report.passed()))
        }
        Command::BulkCheck { config } => {
            let report = experiments::bulk_check(config)?;
            emit_report(out, &report, config.output_path.as_deref())?;
            Ok(verdict_code(report.passed()))
        }
        Command::EdgeCheck { config } => {
            let report = experiments::centered_edge_check(config)?;
            emit_report(out, &report, config.output_path.as_deref())?;
            Ok(verdict_code(report.passed()))
        }
        Command::Bench { params, repeat, out: file } => {
            let result = run_bench(params, *repeat)?;
            emit_report(out, &result, file.as_deref())?;
            Ok(0)
        }
    }
}

/// Parses `args`, runs the command against stdout and maps failures to exit
/// codes, reporting them on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let outcome = parse(args).and_then(|parsed| match parsed {
        Parsed::Info(text) => {
            print!("{text}");
            Ok(0)
        }
        Parsed::Run(command) => execute(&command, &mut std::io::stdout().lock()),
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("rmlab: {e}");
            e.exit_code()
        }
    }
}
