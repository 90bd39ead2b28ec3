use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mesowig_cli::config::{Experiment, ExperimentConfig};
use mesowig_cli::error::{CliError, Result};
use mesowig_cli::output::{self, PlotKind};

/// Wigner-matrix mesoscopic statistics: sample ensembles, run Monte Carlo
/// experiments, and verify the limiting Gaussian-process predictions.
#[derive(Parser)]
#[command(name = "mesowig", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration file; defaults apply for missing keys.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override one config key, e.g. --set ensemble.dimension=512
    /// (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (overrides output_dir).
    #[arg(long, value_name = "DIR")]
    output: Option<PathBuf>,
    /// Worker threads (overrides num_workers); results do not depend on it.
    #[arg(long, value_name = "K")]
    workers: Option<usize>,
    /// Master seed (overrides ensemble.master_seed).
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
}

#[derive(Args)]
struct PlotArgs {
    /// Plot kind: histogram_vs_gaussian, covariance_heatmap, rate_loglog.
    #[arg(long, value_name = "KIND")]
    kind: String,
    /// summary.json produced by a run.
    #[arg(long, value_name = "PATH")]
    summary: PathBuf,
    /// samples.jsonl (needed for histogram_vs_gaussian).
    #[arg(long, value_name = "PATH")]
    samples: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    output: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Resolvent-trace fluctuations against the -2/(b1-conj b2)^2 kernel.
    #[command(name = "resolvent_clt")]
    ResolventClt(RunArgs),
    /// Linear-statistic fluctuations against the H^{1/2} covariance.
    #[command(name = "linstat_clt")]
    LinstatClt(RunArgs),
    /// Violation fractions of the local semicircle law bounds.
    #[command(name = "local_law")]
    LocalLaw(RunArgs),
    /// Decay of the expectation bias |E Gbar - m| across dimensions.
    #[command(name = "bias_rate")]
    BiasRate(RunArgs),
    /// Sample the limiting Gaussian processes Y(b) and Z(f).
    #[command(name = "gp_sample")]
    GpSample(RunArgs),
    /// Helffer-Sjostrand functional-calculus cross-checks.
    #[command(name = "hs_check")]
    HsCheck(RunArgs),
    /// Mixed moments of centred resolvent traces vs predictions.
    #[command(name = "mixed_moments")]
    MixedMoments(RunArgs),
    /// Deterministic verification of the cumulant expansion.
    #[command(name = "cumulant_check")]
    CumulantCheck(RunArgs),
    /// Dump semicircle density and Stieltjes-transform grids as CSV.
    #[command(name = "theory_dump")]
    TheoryDump(RunArgs),
    /// Extract plot-ready CSV from a finished run.
    #[command(name = "plot")]
    Plot(PlotArgs),
}

fn build_config(experiment: Experiment, args: &RunArgs) -> Result<(ExperimentConfig, Option<Vec<u8>>)> {
    let (mut config, raw) = match &args.config {
        Some(path) => {
            let bytes = std::fs::read(path)
                .map_err(|e| CliError::Config(format!("config '{}': {e}", path.display())))?;
            let text = String::from_utf8(bytes.clone())
                .map_err(|e| CliError::Config(format!("config '{}': {e}", path.display())))?;
            (ExperimentConfig::from_toml_str(&text)?, Some(bytes))
        }
        None => (ExperimentConfig::default(), None),
    };
    config.experiment = experiment;
    for assignment in &args.set {
        config.apply_override(assignment)?;
    }
    if let Some(dir) = &args.output {
        config.output_dir = dir.to_string_lossy().into_owned();
    }
    if let Some(w) = args.workers {
        config.num_workers = Some(w);
    }
    if let Some(s) = args.seed {
        config.ensemble.master_seed = s;
    }
    Ok((config, raw))
}

fn run_experiment(experiment: Experiment, args: &RunArgs) -> Result<()> {
    let (config, raw) = build_config(experiment, args)?;
    let out = mesowig_cli::run(&config, raw.as_deref())?;
    println!("wrote {}", out.summary_path.display());
    Ok(())
}

fn run_plot(args: &PlotArgs) -> Result<()> {
    let kind = PlotKind::parse(&args.kind)?;
    let text = std::fs::read_to_string(&args.summary)
        .map_err(|e| CliError::Config(format!("summary '{}': {e}", args.summary.display())))?;
    let summary: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("summary parse error: {e}")))?;
    let samples = match &args.samples {
        Some(p) => Some(
            std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("samples '{}': {e}", p.display())))?,
        ),
        None => None,
    };
    std::fs::create_dir_all(&args.output)
        .map_err(|e| CliError::Config(format!("output '{}': {e}", args.output.display())))?;
    let path = output::emit_plot_data(&summary, samples.as_deref(), kind, &args.output)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::ResolventClt(a) => run_experiment(Experiment::ResolventClt, a),
        Command::LinstatClt(a) => run_experiment(Experiment::LinstatClt, a),
        Command::LocalLaw(a) => run_experiment(Experiment::LocalLaw, a),
        Command::BiasRate(a) => run_experiment(Experiment::BiasRate, a),
        Command::GpSample(a) => run_experiment(Experiment::GpSample, a),
        Command::HsCheck(a) => run_experiment(Experiment::HsCheck, a),
        Command::MixedMoments(a) => run_experiment(Experiment::MixedMoments, a),
        Command::CumulantCheck(a) => run_experiment(Experiment::CumulantCheck, a),
        Command::TheoryDump(a) => run_experiment(Experiment::TheoryDump, a),
        Command::Plot(a) => run_plot(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
