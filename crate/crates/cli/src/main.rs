//! `swindle`: build, verify, inspect and sample four-commutator certificates.
//!
//! Exit codes: 0 pass, 1 mathematical failure, 2 operational error.

mod inspect;
mod sample;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use swindle_core::decomp::{build_certificate, verify_certificate, BuildConfig, Certificate, SeedChoice};
use swindle_core::group::{PlanConfig, Strategy};
use swindle_core::plcore::Rat;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] swindle_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

pub type CliResult<T> = Result<T, CliError>;

/// Whether a check held.
#[derive(Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

#[derive(Parser)]
#[command(name = "swindle", version, about = "Exact four-commutator certificates for compactly supported fiber elements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a certificate and write it as JSON.
    Build(BuildArgs),
    /// Multiply out a certificate's factors and compare with its target.
    Verify(VerifyArgs),
    /// List construction data: intervals, window maps, slopes, chains.
    Inspect(inspect::InspectArgs),
    /// Evaluate a construction function on a grid and print CSV.
    Sample(sample::SampleArgs),
}

#[derive(Args, Clone, Debug)]
struct PlanArgs {
    /// Number of sample points.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Plan strategy: stratified or uniform.
    #[arg(long, default_value = "stratified", value_parser = parse_strategy)]
    strategy: Strategy,
    /// Seed for every random choice in the plan.
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    /// Deepest ball level sampled by the stratified part.
    #[arg(long, default_value_t = 10)]
    max_level: u64,
    /// Largest denominator of random rational coordinates.
    #[arg(long, default_value_t = 64)]
    denom_bound: u64,
}

impl PlanArgs {
    fn config(&self) -> PlanConfig {
        PlanConfig {
            strategy: self.strategy,
            samples: self.samples,
            rng_seed: self.rng_seed,
            max_level: self.max_level,
            denom_bound: self.denom_bound,
        }
    }
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    q: usize,
    /// Target function: default, offset or wide.
    #[arg(long, default_value = "default", value_parser = parse_seed)]
    seed: SeedChoice,
    /// Damping margin, a rational in (0, 1/2).
    #[arg(long, default_value = "1/8", value_parser = parse_rat)]
    delta: Rat,
    /// Fragment the target over a grid of this cell size.
    #[arg(long, value_parser = parse_rat)]
    fragment_cell: Option<Rat>,
    #[arg(long)]
    out: PathBuf,
    /// Plan parameters recorded in the certificate for later verification.
    #[command(flatten)]
    plan: PlanArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Certificate file.
    #[arg(value_name = "CERT")]
    cert_path: Option<PathBuf>,
    #[arg(long = "cert", value_name = "CERT")]
    cert_flag: Option<PathBuf>,
    /// Report file; defaults to `<CERT>.report.json`.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    plan: PlanArgs,
}

pub fn parse_rat(s: &str) -> Result<Rat, String> {
    s.parse::<Rat>().map_err(|e| e.to_string())
}

fn parse_seed(s: &str) -> Result<SeedChoice, String> {
    s.parse().map_err(|e: swindle_core::Error| e.to_string())
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: swindle_core::Error| e.to_string())
}

pub fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn cmd_build(args: &BuildArgs) -> CliResult<Outcome> {
    let config = BuildConfig {
        m: args.m,
        q: args.q,
        delta: args.delta.clone(),
        seed: args.seed,
        fragment_cell: args.fragment_cell.clone(),
        plan: args.plan.config(),
    };
    let cert = build_certificate(&config)?;
    write_file(&args.out, &cert.to_json())?;
    println!(
        "wrote {}: {} fragment(s), {} factor(s)",
        args.out.display(),
        cert.fragments.len(),
        cert.factors.len()
    );
    Ok(Outcome::Pass)
}

fn cmd_verify(args: &VerifyArgs) -> CliResult<Outcome> {
    let path = match (&args.cert_path, &args.cert_flag) {
        (Some(p), None) | (None, Some(p)) => p.clone(),
        (Some(_), Some(_)) => return Err(CliError::Usage("give the certificate once".into())),
        (None, None) => return Err(CliError::Usage("no certificate given".into())),
    };
    let text = fs::read_to_string(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    let cert = Certificate::from_json(&text)?;
    let plan = cert.plan(&args.plan.config())?;
    let report = verify_certificate(&cert, &plan)?;
    let report_path = args.report.clone().unwrap_or_else(|| {
        let mut name = path.file_name().unwrap_or_default().to_os_string();
        name.push(".report.json");
        path.with_file_name(name)
    });
    write_file(&report_path, &report.to_json())?;
    let witness = report.product.witness.as_ref().or(report.abelian_collapse.witness.as_ref());
    match witness {
        None => {
            println!("PASS: {} factors, {} points, exact", cert.factors.len(), report.product.points_checked);
            Ok(Outcome::Pass)
        }
        Some(w) => {
            let fmt = |v: &[Rat]| v.iter().map(Rat::to_string).collect::<Vec<_>>().join(", ");
            println!(
                "FAIL: at ({}) the {:?} part differs: [{}] vs [{}]; report in {}",
                fmt(&w.point),
                w.part,
                fmt(&w.left),
                fmt(&w.right),
                report_path.display()
            );
            Ok(Outcome::Fail)
        }
    }
}

fn run(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::Build(args) => cmd_build(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Inspect(args) => inspect::run(args),
        Command::Sample(args) => sample::run(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
