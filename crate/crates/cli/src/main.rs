//! `rfda`: run one reproduction scenario and write its tables.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rfda::experiments::{emit, run, ExperimentConfig, OutputFormat, Scenario};

#[derive(Parser)]
#[command(name = "rfda", version, about = "Random frequency diverse array campaign runner")]
struct Cli {
    #[command(subcommand)]
    scenario: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Beampattern of a single offset draw (or the linear array with `--set lfda=true`)
    Beampattern(Common),
    /// Monte Carlo beampattern moments against the closed forms
    Moments(Common),
    /// Kolmogorov-Smirnov normality of the sidelobes
    Ks(Common),
    /// Three-target matched filter and subspace pursuit scene
    DetectExample(Common),
    /// Detection rate against SNR for the four recovery algorithms
    DetectSweep(Common),
    /// Maximum-likelihood MSE against the Cramér-Rao bound
    CrbMse(Common),
    /// Mutual coherence distribution and recovery guarantees
    Coherence(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory (defaults to `output_path` from the config)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for one per core
    #[arg(long)]
    threads: Option<usize>,
    /// Override a config key, e.g. `--set array.n_elements=128`
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Command {
    fn split(self) -> (Scenario, Common) {
        match self {
            Command::Beampattern(c) => (Scenario::Beampattern, c),
            Command::Moments(c) => (Scenario::Moments, c),
            Command::Ks(c) => (Scenario::Ks, c),
            Command::DetectExample(c) => (Scenario::DetectExample, c),
            Command::DetectSweep(c) => (Scenario::DetectSweep, c),
            Command::CrbMse(c) => (Scenario::CrbMse, c),
            Command::Coherence(c) => (Scenario::Coherence, c),
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<serde_json::Value> {
    let (scenario, args) = cli.scenario.split();
    let mut overrides = vec![("scenario".to_string(), scenario.name().to_string())];
    for kv in &args.overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| anyhow!("override `{kv}` is not of the form key=value"))?;
        overrides.push((k.trim().to_string(), v.trim().to_string()));
    }
    let flags = [
        ("seed", args.seed.map(|v| v.to_string())),
        ("trials", args.trials.map(|v| v.to_string())),
        ("threads", args.threads.map(|v| v.to_string())),
    ];
    overrides.extend(flags.into_iter().filter_map(|(k, v)| Some((k.to_string(), v?))));

    let config = match &args.config {
        Some(path) => ExperimentConfig::load(path, &overrides)?,
        None => ExperimentConfig::from_toml_str("", &overrides)?,
    };
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(&config.output_path));
    let result = run(&config)?;
    let format = match args.format {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
    };
    let files = emit(&result, &out, format).with_context(|| format!("writing results to {}", out.display()))?;
    Ok(serde_json::json!({
        "status": "ok",
        "scenario": scenario.name(),
        "wall_time_s": result.wall_time_s,
        "files": files,
    }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(report) => {
            println!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let record = serde_json::json!({
                "status": "error",
                "error": format!("{e:#}"),
            });
            eprintln!("{record}");
            ExitCode::FAILURE
        }
    }
}
