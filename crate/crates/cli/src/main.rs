//! Command-line runner for cost-subsidy bandit experiments.
//!
//! Subcommands: `run <config>`, `sweep <config>`, `reproduce <target>`, and
//! `verify`. All randomness flows from the config's `base_seed` (or the
//! `--seed` override); output is byte-identical regardless of `--jobs`.
//!
//! Exit codes: 0 on success, 2 for configuration/usage errors, 1 for
//! runtime failures or failed verification checks.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use subsidy_bandits::config::ExperimentConfig;
use subsidy_bandits::error::Error;
use subsidy_bandits::export::{write_summary_file, write_trajectory_file};
use subsidy_bandits::presets::ReproduceTarget;
use subsidy_bandits::runner::{run_replications, sweep, RunOutput, Summary};
use subsidy_bandits::verify;

#[derive(Parser)]
#[command(
    name = "subsidy-bandits",
    about = "Simulate cost-subsidy bandit policies and verify their numeric contracts",
    version
)]
struct Cli {
    /// Worker threads for replications (default: all processors).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output directory for CSV artifacts.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Override the config's base seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every policy in a config against its instance.
    Run { config: PathBuf },
    /// Run the config's parameter sweep.
    Sweep { config: PathBuf },
    /// Run a built-in experiment: fig1, fig2, ts-linear, or scaling.
    Reproduce { target: String },
    /// Run the full numeric verification suite.
    Verify,
}

/// Errors that indicate a bad invocation or config rather than a runtime
/// failure.
fn is_usage_error(err: &Error) -> bool {
    matches!(
        err,
        Error::InvalidConfiguration(_)
            | Error::InvalidParameters(_)
            | Error::ConfigParse(_)
            | Error::Io(_)
    )
}

fn exit_for(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    let mut source = std::error::Error::source(err);
    while let Some(cause) = source {
        eprintln!("  caused by: {cause}");
        source = cause.source();
    }
    if is_usage_error(err) {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn load_config(path: &Path, seed_override: Option<u64>) -> Result<ExperimentConfig, Error> {
    let mut config = ExperimentConfig::from_path(path)?;
    if let Some(seed) = seed_override {
        config.base_seed = seed;
    }
    Ok(config)
}

fn write_outputs(
    out_dir: &Path,
    config: &ExperimentConfig,
    output: &RunOutput,
    default_summary: &str,
) -> Result<Vec<PathBuf>, Error> {
    let mut written = Vec::new();
    let summary_name = config
        .output
        .summary
        .clone()
        .unwrap_or_else(|| default_summary.to_string());
    let summary_path = out_dir.join(summary_name);
    write_summary_file(&summary_path, &output.summary)?;
    written.push(summary_path);
    if let Some(name) = &config.output.trajectories {
        let path = out_dir.join(name);
        write_trajectory_file(&path, &output.trajectories)?;
        written.push(path);
    }
    Ok(written)
}

fn cmd_run(path: &Path, out_dir: &Path, seed: Option<u64>) -> Result<(), Error> {
    let config = load_config(path, seed)?;
    let output = run_replications(&config)?;
    for path in write_outputs(out_dir, &config, &output, "summary.csv")? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_sweep(path: &Path, out_dir: &Path, seed: Option<u64>) -> Result<(), Error> {
    let config = load_config(path, seed)?;
    let output = sweep(&config)?;
    for path in write_outputs(out_dir, &config, &output, "sweep_summary.csv")? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_reproduce(target: &str, out_dir: &Path, seed: Option<u64>) -> Result<(), Error> {
    let target: ReproduceTarget = target.parse()?;
    // Targets with several horizons append into one summary file.
    let mut merged = Summary::default();
    let mut summary_name = String::new();
    for mut config in target.configs() {
        if let Some(seed) = seed {
            config.base_seed = seed;
        }
        summary_name = config
            .output
            .summary
            .clone()
            .unwrap_or_else(|| format!("{}_summary.csv", target.id()));
        let output = if config.sweep.is_some() {
            sweep(&config)?
        } else {
            run_replications(&config)?
        };
        merged.entries.extend(output.summary.entries);
    }
    let path = out_dir.join(summary_name);
    write_summary_file(&path, &merged)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_verify(out_dir: &Path, seed: Option<u64>) -> Result<bool, Error> {
    let rows = verify::run_suite(seed.unwrap_or(0))?;
    let path = out_dir.join("verify_report.csv");
    std::fs::create_dir_all(out_dir)?;
    verify::write_report_csv(std::fs::File::create(&path)?, &rows)?;
    let failed: Vec<&verify::CheckRow> = rows.iter().filter(|r| !r.pass).collect();
    for row in &failed {
        eprintln!(
            "FAIL {} [{}] value={} bound={}",
            row.check, row.params, row.value, row.bound
        );
    }
    println!(
        "{} checks, {} failed; report at {}",
        rows.len(),
        failed.len(),
        path.display()
    );
    Ok(failed.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be >= 1");
            return ExitCode::from(2);
        }
        // Ignore the error if a global pool already exists (e.g. repeated
        // invocation in tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }

    let result = match &cli.command {
        Command::Run { config } => cmd_run(config, &cli.out, cli.seed).map(|()| true),
        Command::Sweep { config } => cmd_sweep(config, &cli.out, cli.seed).map(|()| true),
        Command::Reproduce { target } => {
            cmd_reproduce(target, &cli.out, cli.seed).map(|()| true)
        }
        Command::Verify => cmd_verify(&cli.out, cli.seed),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => exit_for(&err),
    }
}
