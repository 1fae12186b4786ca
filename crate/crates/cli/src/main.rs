//! `bosim` command-line driver.
//!
//! Exit codes: 0 success, 1 internal error, 2 config or parse error,
//! 3 size guard violation, 4 I/O error.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bosim::experiments::{run_filter_experiment, run_scaling_experiment};
use bosim::report::{
    complex_pair, distribution_csv, filter_csv, matrix_from_json, samples_csv, scaling_csv,
    unitary_to_json, RunMetadata,
};
use bosim::sampling::ideal_branch_fraction;
use bosim::{
    ideal_component_probability, output_distribution, permanent_ryser, postselect, sample_noisy,
    Limits, RandomSeed,
};
use clap::{Parser, Subcommand};
use serde_json::json;

use config::RunConfig;
use output::{write_atomic, write_json};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Guard(String),
    Io(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Config(_) => 2,
            CliError::Guard(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Guard(m) => write!(f, "size guard: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<bosim::Error> for CliError {
    fn from(e: bosim::Error) -> Self {
        use bosim::Error as E;
        match e {
            e if e.is_guard() => CliError::Guard(e.to_string()),
            e @ (E::Normalization { .. } | E::CrossCheck { .. }) => {
                CliError::Internal(e.to_string())
            }
            e => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "bosim",
    version,
    about = "Exact and noisy boson-sampling simulation"
)]
struct Cli {
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the seed in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; also fixes the partition count, so results depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prints the permanent of a JSON matrix as [re, im].
    Permanent { matrix: PathBuf },
    /// Writes the ideal output distribution to distribution.csv.
    Distribution,
    /// Samples the noisy device; writes samples.csv and sample_summary.json.
    Sample,
    /// Runs the error-scaling experiment; writes scaling.csv and scaling_summary.json.
    Scaling,
    /// Runs the filtering experiment; writes filter.csv and filter_summary.json.
    Filter,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bosim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    if let Command::Permanent { matrix } = &cli.command {
        return cmd_permanent(matrix);
    }

    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None if matches!(cli.command, Command::Scaling) => RunConfig::default(),
        None => return Err(CliError::Config("--config is required".into())),
    };
    let mut limits = config.limits;
    if let Some(threads) = cli.threads {
        limits = limits.with_partitions(threads);
    }
    let seed = cli.seed.unwrap_or(config.seed());
    match cli.command {
        Command::Permanent { .. } => unreachable!(),
        Command::Distribution => cmd_distribution(&config, &limits, &cli.out),
        Command::Sample => cmd_sample(&config, seed, &limits, &cli.out),
        Command::Scaling => cmd_scaling(&config, cli.seed, &limits, &cli.out),
        Command::Filter => cmd_filter(&config, cli.seed, &limits, &cli.out),
    }
}

fn cmd_permanent(path: &Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let matrix = matrix_from_json(&text).map_err(|e| match CliError::from(e) {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })?;
    let value = permanent_ryser(&matrix)?;
    // adding zero turns a negative zero into a plain 0
    let [re, im] = complex_pair(value).map(|x| x + 0.0);
    println!("[{re}, {im}]");
    Ok(())
}

fn cmd_distribution(config: &RunConfig, limits: &Limits, out: &Path) -> Result<(), CliError> {
    let problem = config.problem()?;
    let dist = output_distribution(&problem.unitary, &problem.input, limits)?;
    let path = write_atomic(out, "distribution.csv", distribution_csv(&dist).as_bytes())?;
    eprintln!("wrote {} ({} configurations)", path.display(), dist.len());
    Ok(())
}

fn cmd_sample(config: &RunConfig, seed: u64, limits: &Limits, out: &Path) -> Result<(), CliError> {
    let problem = config.sampling_problem()?;
    let shape = problem.shape;
    let trials = config.trials();
    let records = sample_noisy(
        &problem.unitary,
        &shape,
        &config.noise,
        RandomSeed::new(seed),
        trials,
        limits,
    )?;
    let kept = postselect(&records, shape.n as u32);
    let mut metadata = RunMetadata::new(seed, *limits);
    metadata.noise = Some(config.noise.clone());
    let summary = json!({
        "metadata": metadata,
        "n": shape.n,
        "m": shape.m,
        "trials": trials,
        "ideal_probability": ideal_component_probability(&config.noise, shape.n),
        "empirical_ideal_fraction": ideal_branch_fraction(&records),
        "postselection_success": kept.success_rate,
        "unitary": unitary_to_json(&problem.unitary),
    });
    let path = write_atomic(out, "samples.csv", samples_csv(&records).as_bytes())?;
    write_json(out, "sample_summary.json", &summary)?;
    eprintln!("wrote {} ({trials} trials)", path.display());
    Ok(())
}

fn cmd_scaling(
    config: &RunConfig,
    seed: Option<u64>,
    limits: &Limits,
    out: &Path,
) -> Result<(), CliError> {
    let scaling = config.scaling(seed)?;
    let rows = run_scaling_experiment(&scaling, limits)?;
    let mut metadata = RunMetadata::new(scaling.seed, *limits);
    metadata.mode_rule = Some(scaling.mode_rule.to_string());
    metadata.noise = Some(scaling.noise.clone());
    let summary = json!({ "metadata": metadata, "config": scaling, "rows": rows });
    let path = write_atomic(out, "scaling.csv", scaling_csv(&rows).as_bytes())?;
    write_json(out, "scaling_summary.json", &summary)?;
    eprintln!("wrote {} ({} rows)", path.display(), rows.len());
    Ok(())
}

fn cmd_filter(
    config: &RunConfig,
    seed: Option<u64>,
    limits: &Limits,
    out: &Path,
) -> Result<(), CliError> {
    let filter = config.filter(seed)?;
    let rows = run_filter_experiment(&filter, limits)?;
    let mut metadata = RunMetadata::new(filter.seed, *limits);
    metadata.mode_rule = Some(filter.mode_rule.to_string());
    let summary = json!({ "metadata": metadata, "config": filter, "rows": rows });
    let path = write_atomic(out, "filter.csv", filter_csv(&rows).as_bytes())?;
    write_json(out, "filter_summary.json", &summary)?;
    eprintln!("wrote {} ({} rows)", path.display(), rows.len());
    Ok(())
}
