use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use wordseries_core::Mode;
use wordseries_harness::config::{BetaChoice, Command, ConfigFile, Mutation};
use wordseries_harness::{run, HarnessError};

/// Normal forms, commuting decompositions, formal invariants and numerical
/// checks for word series models.
#[derive(Debug, Parser)]
#[command(name = "wordseries", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Experiment configuration file (TOML); flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model file (TOML).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Truncation order N.
    #[arg(long)]
    order: Option<usize>,
    /// Comma-separated, strictly descending list of eps values.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// exact or float.
    #[arg(long)]
    mode: Option<Mode>,
    /// Final time of the numerical experiments.
    #[arg(long)]
    t_end: Option<f64>,
    /// Comma-separated observation times of flow-compare.
    #[arg(long, value_delimiter = ',')]
    times: Option<Vec<f64>>,
    /// Fixed integrator step; defaults to min(0.01, eps^((N+1)/4)).
    #[arg(long)]
    step: Option<f64>,
    #[arg(long, value_enum)]
    beta: Option<BetaChoice>,
    /// Deliberately corrupt the model or the normal form.
    #[arg(long, value_enum)]
    mutate: Option<Mutation>,
    /// Output directory of a previous normal-form run to re-validate.
    #[arg(long)]
    input: Option<PathBuf>,
}

fn configure(cli: Cli) -> Result<wordseries_harness::ExperimentConfig, HarnessError> {
    let mut file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    macro_rules! set {
        ($($f:ident),*) => { $(if cli.$f.is_some() { file.$f = cli.$f; })* };
    }
    set!(model, order, eps, out, seed, mode, t_end, times, step, beta, mutate, input);
    file.into_config(cli.command)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure(cli).and_then(|cfg| run(&cfg));
    match result {
        Ok(report) => {
            print!("{}", report.summary);
            if report.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("property failure; see summary.json");
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
