use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use phq_cli::orders::{check_orders, render};
use phq_cli::spec::MAX_ELL;
use phq_cli::{load_spec, run, to_json, write_csv_bundle, write_json, RunOptions};
use phq_core::Tolerance;

#[derive(Parser)]
#[command(
    name = "phq",
    version,
    about = "Metric operators for pseudo-Hermitian Hamiltonians"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task of a spec and write the report.
    Run {
        spec: PathBuf,
        /// Output directory; without it a JSON report goes to stdout.
        #[arg(long, env = "PHQ_OUT_DIR")]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Overrides the seed stored in the model file.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the absolute tolerance stored in the model file.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Check a spec against the schema without running it.
    Validate { spec: PathBuf },
    /// Verify the order equations up to `ell` on a built-in random instance.
    Orders {
        ell: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(pass)` when the command ran to completion.
fn dispatch(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Run {
            spec,
            out,
            format,
            seed,
            tol,
        } => {
            let source = std::fs::read_to_string(&spec)
                .with_context(|| format!("cannot read {}", spec.display()))?;
            let model = load_spec(&spec)?;
            let report = run(&model, &source, RunOptions { seed, abs_tol: tol });
            match (format, out) {
                (Format::Json, None) => print!("{}", to_json(&report)?),
                (Format::Json, Some(dir)) => {
                    let path = write_json(&report, &dir)?;
                    eprintln!("wrote {}", path.display());
                }
                (Format::Csv, Some(dir)) => {
                    for path in write_csv_bundle(&report, &dir)? {
                        eprintln!("wrote {}", path.display());
                    }
                }
                (Format::Csv, None) => bail!("--format csv needs --out or PHQ_OUT_DIR"),
            }
            for task in &report.tasks {
                let status = if task.passed() { "pass" } else { "FAIL" };
                eprintln!("{status} {}", task.task);
            }
            if let Some(e) = &report.model_error {
                eprintln!("FAIL model: {e}");
            }
            Ok(report.pass)
        }
        Command::Validate { spec } => {
            let model = load_spec(&spec)?;
            println!(
                "ok: {} ({}, {} tasks)",
                model.name,
                model.model.kind(),
                model.tasks.len()
            );
            Ok(true)
        }
        Command::Orders { ell, seed } => {
            if !(1..=MAX_ELL).contains(&ell) {
                bail!("ell {ell} outside 1..={MAX_ELL}");
            }
            let rows = check_orders(ell, seed, &Tolerance::default())?;
            print!("{}", render(&rows));
            Ok(rows.iter().flat_map(|r| &r.verdicts).all(|v| v.pass))
        }
    }
}
