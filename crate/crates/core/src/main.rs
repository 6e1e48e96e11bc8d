//! Batch front-end: load a model and config, run a named verification
//! suite, print the human table, and write the report file. Exit status: 0
//! when every check passes, 1 on a check failure, 2 on usage or config
//! errors, 3 on internal errors. Configuration comes from files and flags
//! only; the environment is never read.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;

use gibbslab::config::{ExperimentConfig, SuiteName};
use gibbslab::suite::run_suite;
use gibbslab::Error;

#[derive(Parser, Debug)]
#[command(
    name = "gibbslab",
    about = "Residual checks for Gibbs measures on subshifts of finite type"
)]
struct Args {
    /// Experiment configuration file (TOML).
    #[arg(long)]
    config: PathBuf,

    /// Override the suite named in the config
    /// (spec-check | dlr-check | kms-check | conformal-check |
    /// capocaccia-check | sample | transfer-1d | all).
    #[arg(long)]
    suite: Option<String>,

    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Report file path.
    #[arg(long, default_value = "gibbslab-report.txt")]
    out: PathBuf,

    /// Multiply every pass tolerance by this factor.
    #[arg(long)]
    tolerance_scale: Option<f64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e @ (Error::Config(_) | Error::Model(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Error::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("internal error: {e}");
            ExitCode::from(3)
        }
    }
}

fn run(args: &Args) -> gibbslab::Result<bool> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(scale) = args.tolerance_scale {
        if scale <= 0.0 {
            return Err(Error::Config("tolerance-scale must be positive".into()));
        }
        cfg.tolerance_scale = scale;
    }
    let suite = match &args.suite {
        Some(name) => Some(SuiteName::parse(name)?),
        None => None,
    };
    let mut outcome = run_suite(&cfg, &args.config, suite)?;
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    outcome.report.header.push(format!("generated-unix: {stamp}"));
    std::fs::write(&args.out, outcome.report.render())?;
    print!("{}", outcome.report.human_table());
    println!(
        "{} checks, {}",
        outcome.report.rows.len(),
        if outcome.all_pass { "all passed" } else { "FAILURES present" }
    );
    Ok(outcome.all_pass)
}
