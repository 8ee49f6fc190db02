// `!(x > 0.0)` is deliberate: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod locate;
mod report;
mod run;

use clap::{Parser, Subcommand};
use sanovlab_core::Error;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_FAILED_CHECKS: u8 = 1;
const EXIT_BAD_CONFIG: u8 = 2;
const EXIT_CAP: u8 = 3;

/// Sanov-type hypothesis testing experiments.
#[derive(Parser)]
#[command(name = "sanovlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write report.json and rates.csv.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        /// Largest Hilbert-space dimension built densely; overrides SANOVLAB_CAP.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Check a config against the schema and state invariants.
    Validate { config: PathBuf },
}

fn load(path: &Path) -> Result<config::Validated, ExitCode> {
    let src = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: cannot read config: {e}", path.display());
        ExitCode::from(EXIT_BAD_CONFIG)
    })?;
    config::load(&src).map_err(|errors| {
        for e in errors {
            eprintln!("{}: {e}", path.display());
        }
        ExitCode::from(EXIT_BAD_CONFIG)
    })
}

fn resolve_cap(flag: Option<usize>, configured: usize) -> Result<usize, String> {
    if let Some(c) = flag {
        return if c == 0 { Err("--cap must be positive".into()) } else { Ok(c) };
    }
    match std::env::var("SANOVLAB_CAP") {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(c) if c > 0 => Ok(c),
            _ => Err(format!("SANOVLAB_CAP must be a positive integer, got `{s}`")),
        },
        Err(_) => Ok(configured),
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Validate { config } => match load(&config) {
            Ok(v) => {
                println!("{}: valid {} config", config.display(), v.config.kind.name());
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
        Command::Run { config, out, threads, cap } => {
            let mut v = match load(&config) {
                Ok(v) => v,
                Err(code) => return code,
            };
            v.cap = match resolve_cap(cap, v.cap) {
                Ok(c) => c,
                Err(msg) => {
                    eprintln!("{msg}");
                    return ExitCode::from(EXIT_BAD_CONFIG);
                }
            };
            if let Some(t) = threads {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
                    eprintln!("cannot configure {t} threads: {e}");
                    return ExitCode::from(EXIT_BAD_CONFIG);
                }
            }
            let report = match run::run(&v) {
                Ok(r) => r,
                Err(Error::CapExceeded { required, cap }) => {
                    eprintln!(
                        "required dimension {required} exceeds the cap {cap}; rerun with --cap {required} or SANOVLAB_CAP={required}"
                    );
                    return ExitCode::from(EXIT_CAP);
                }
                Err(e) => {
                    eprintln!("{}: {e}", config.display());
                    return ExitCode::from(EXIT_BAD_CONFIG);
                }
            };
            if let Err(e) = report::write(&report, &out) {
                eprintln!("{}: cannot write reports: {e}", out.display());
                return ExitCode::from(EXIT_BAD_CONFIG);
            }
            let failed = report.rows.iter().filter(|r| !r.pass).count();
            println!(
                "{}: {} rows, {} failed; wrote {}",
                report.kind,
                report.rows.len(),
                failed,
                out.display()
            );
            if report.all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILED_CHECKS)
            }
        }
    }
}
