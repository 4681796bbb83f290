use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sgap::harness::{self, ExperimentConfig, Norm};
use sgap::{Error, Result};

/// Stochastic-Galerkin AP solvers for kinetic transport and radiative heat transfer.
#[derive(Parser)]
#[command(name = "sgap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configuration file or a built-in preset and write CSV output.
    Run {
        /// Path to a `key = value` config, or a preset name (test1..test4).
        target: String,
        /// Output directory (default: the config's `output`, else `out/<name>`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the gPC coefficients of every cell.
        #[arg(long)]
        modes: bool,
        /// Print nothing but errors.
        #[arg(long)]
        quiet: bool,
    },
    /// Compare two output directories written by `run`.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = "linf")]
        norm: String,
    },
    /// List the built-in presets.
    Presets,
    /// Check a configuration file without running it.
    Validate { config: PathBuf },
}

fn load(target: &str) -> Result<(String, ExperimentConfig)> {
    let path = Path::new(target);
    if !path.exists() {
        if let Some(cfg) = harness::preset(target) {
            return Ok((target.to_string(), cfg));
        }
    }
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    let name = path.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned());
    Ok((name, harness::parse_config(&text)?))
}

fn run(target: &str, out: Option<PathBuf>, modes: bool, quiet: bool) -> Result<()> {
    let (name, cfg) = load(target)?;
    let dir = out
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| Path::new("out").join(&name));
    let report = harness::run_experiment(&cfg)?;
    harness::emit_csv(&report, &dir, modes)?;
    if !quiet {
        println!("{name}: {}", report.scheme);
        println!("{:>10} {:>6} {:>12} {:>12}", "time", "NT", "wall [s]", "max mean");
        for s in &report.snapshots {
            let peak = s.mean.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
            println!("{:>10} {:>6} {:>12.4} {:>12.6}", s.time, s.nt, s.wall_seconds, peak);
        }
        println!("wrote {}", dir.display());
    }
    Ok(())
}

fn compare(a: &Path, b: &Path, norm: &str) -> Result<()> {
    let norm: Norm = norm.parse()?;
    let rows = harness::compare(&harness::load_report(a)?, &harness::load_report(b)?, norm)?;
    println!("{:>10} {:>14} {:>14}", "time", "mean", "std");
    for r in rows {
        println!("{:>10} {:>14.6e} {:>14.6e}", r.time, r.mean, r.std);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let quiet = matches!(cli.command, Command::Run { quiet: true, .. });
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if quiet { "error" } else { "warn" }))
        .init();

    let result = match cli.command {
        Command::Run { target, out, modes, quiet } => run(&target, out, modes, quiet),
        Command::Compare { a, b, norm } => compare(&a, &b, &norm),
        Command::Presets => {
            for (name, about) in harness::preset_names() {
                println!("{name:<8} {about}");
            }
            Ok(())
        }
        Command::Validate { config } => load(&config.to_string_lossy()).map(|(name, cfg)| {
            println!("{name}: ok");
            print!("{}", cfg.to_text());
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
