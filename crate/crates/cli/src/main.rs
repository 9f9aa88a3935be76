mod checks;
mod config;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use mob_rkhs::decompose::{decompose, polydisc_decompose, Decomposition, DecompositionReport, Parity, PolydiscReport};
use mob_rkhs::homogeneous::HomogeneousReport;
use mob_rkhs::Strategy;
use serde::Serialize;

use checks::{all_pass, report_failures, to_csv, write_output, CheckRow, REPORT_SCHEMA_VERSION};
use config::{Command, RawConfig, RunConfig};

const EXIT_VIOLATION: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(
    name = "mob-rkhs",
    version,
    about = "Decompose Möbius multiplier representations on truncated polydisc spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Split the space into summands and print the parameter ladder.
    Decompose(Flags),
    /// Run the cocycle, kernel, block-structure, shift and intertwining suites.
    Verify(Flags),
}

#[derive(Clone, Copy, ValueEnum)]
enum ParityArg {
    Symmetric,
    Antisymmetric,
}

#[derive(Args)]
struct Flags {
    /// Weights λ₁,λ₂[,λ₃].
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    lambdas: Option<Vec<f64>>,
    /// Three weights for the polydisc decomposition.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    polydisc: Option<Vec<f64>>,
    /// Total-degree truncation (default 12 for two factors, 8 for three).
    #[arg(long)]
    degree: Option<usize>,
    /// Restrict to the symmetric or antisymmetric part (equal weights only).
    #[arg(long, value_enum)]
    parity: Option<ParityArg>,
    /// Report file: `.json` for JSON, anything else for CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Tolerance override, repeatable.
    #[arg(long, value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Scale Gram weights by 1 + EPS·U(−1, 1) as a negative control.
    #[arg(long, value_name = "EPS")]
    inject_noise: Option<f64>,
    /// Seed for sampled checks and noise.
    #[arg(long)]
    seed: Option<u64>,
}

impl From<Flags> for RawConfig {
    fn from(f: Flags) -> Self {
        RawConfig {
            lambdas: f.lambdas,
            polydisc: f.polydisc,
            degree: f.degree,
            parity: f.parity.map(|p| match p {
                ParityArg::Symmetric => Parity::Symmetric,
                ParityArg::Antisymmetric => Parity::Antisymmetric,
            }),
            out: f.out,
            tol: f.tol,
            noise: f.inject_noise,
            seed: f.seed,
        }
    }
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    schema_version: u32,
    lambdas: &'a [f64],
    degree: usize,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    noise: Option<f64>,
    checks: &'a [CheckRow],
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    homogeneous: Option<&'a HomogeneousReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    polydisc: Option<&'a PolydiscReport>,
}

fn print_ladder(report: &DecompositionReport) {
    println!(
        "lambda_hat = {:.8} (reference summand {})",
        report.lambda_hat, report.reference_m
    );
    println!(
        "{:>3} {:>5} {:>14} {:>10} {:>12}",
        "m", "dim", "parameter", "nominal", "rel.resid"
    );
    for s in &report.summands {
        let nominal = report.lambda_hat + 2.0 * s.m as f64;
        let parameter = s.parameter.map_or("-".to_string(), |p| format!("{p:.8}"));
        let resid = s.relative_residual.map_or("-".to_string(), |r| format!("{r:.2e}"));
        if s.dim == 0 {
            println!("{:>3} {:>5} {:>14} {:>10} {:>12}", s.m, 0, "empty", "-", "-");
        } else {
            println!(
                "{:>3} {:>5} {:>14} {:>10.4} {:>12}",
                s.m, s.dim, parameter, nominal, resid
            );
        }
    }
}

fn print_multiplicities(report: &PolydiscReport) {
    let total: f64 = report.lambdas.iter().sum();
    println!("{:>3} {:>14} {:>12}", "K", "parameter", "multiplicity");
    for m in &report.multiplicities {
        let k = ((m.parameter - total) / 2.0).round();
        println!("{k:>3} {:>14.8} {:>12}", m.parameter, m.multiplicity);
    }
}

fn print_rows(rows: &[CheckRow]) {
    print!("{}", to_csv(rows));
}

fn finish(cfg: &RunConfig, rows: &[CheckRow], json: &impl Serialize) -> Result<bool> {
    if let Some((path, format)) = &cfg.out {
        write_output(path, *format, json, rows)?;
        log::info!("wrote {}", path.display());
    }
    report_failures(rows);
    Ok(all_pass(rows))
}

fn cmd_decompose(cfg: &RunConfig) -> Result<bool> {
    if cfg.is_polydisc() {
        let report = polydisc_decompose(&cfg.lambdas, cfg.degree)?;
        print_multiplicities(&report);
        let rows = suites::polydisc_rows(cfg, &report);
        print_rows(&rows);
        return finish(cfg, &rows, &report);
    }
    let space = suites::space(cfg)?;
    let report = decompose(&space, cfg.parity, Strategy::default())?;
    print_ladder(&report);
    let rows = suites::decomposition_rows(cfg, &report);
    print_rows(&rows);
    finish(cfg, &rows, &report)
}

fn cmd_verify(cfg: &RunConfig) -> Result<bool> {
    let mut rows = vec![
        CheckRow::new(
            "cocycle_identity",
            suites::cocycle_identity(cfg)?,
            cfg.tol("cocycle_identity"),
        ),
        CheckRow::new(
            "kernel_transform",
            suites::kernel_transform(cfg)?,
            cfg.tol("kernel_transform"),
        ),
    ];
    let space = suites::space(cfg)?;
    let decomp = Decomposition::new(&space, cfg.parity)?;
    let mut homogeneous = None;
    let mut lambda_hat = None;
    let mut polydisc = None;
    if cfg.is_polydisc() {
        rows.extend(suites::polydisc_homogeneous_rows(cfg, &decomp)?);
        let report = polydisc_decompose(&cfg.lambdas, cfg.degree)?;
        print_multiplicities(&report);
        rows.extend(suites::polydisc_rows(cfg, &report));
        polydisc = Some(report);
    } else {
        let (report, l) = suites::homogeneous(cfg, &decomp)?;
        rows.extend(suites::homogeneous_rows(cfg, &report));
        homogeneous = Some(report);
        lambda_hat = Some(l);
    }
    print_rows(&rows);
    let json = VerifyReport {
        schema_version: REPORT_SCHEMA_VERSION,
        lambdas: &cfg.lambdas,
        degree: cfg.degree,
        seed: cfg.seed,
        noise: cfg.noise,
        checks: &rows,
        lambda_hat,
        homogeneous: homogeneous.as_ref(),
        polydisc: polydisc.as_ref(),
    };
    finish(cfg, &rows, &json)
}

/// Library errors that stem from the request rather than the mathematics.
fn is_config_error(err: &anyhow::Error) -> bool {
    use mob_rkhs::Error as E;
    match err.downcast_ref::<E>() {
        Some(e) => matches!(
            e,
            E::InvalidParameter(_) | E::ShapeMismatch { .. } | E::Unsupported(_) | E::OutsideDisc { .. }
        ),
        None => true,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MOB_RKHS_LOG", "warn")).init();
    let cli = Cli::parse();
    let (command, flags) = match cli.command {
        Cmd::Decompose(f) => (Command::Decompose, f),
        Cmd::Verify(f) => (Command::Verify, f),
    };
    let cfg = match RunConfig::validate(command, flags.into()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    log::debug!("{cfg:?}");
    let outcome = match cfg.command {
        Command::Decompose => cmd_decompose(&cfg),
        Command::Verify => cmd_verify(&cfg),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VIOLATION),
        Err(e) if is_config_error(&e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("contract violated: {e:#}");
            ExitCode::from(EXIT_VIOLATION)
        }
    }
}
