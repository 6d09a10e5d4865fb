//! Experiment runner: reproducible, configured runs of the radial extremal
//! laboratory, with JSON summaries and plot-ready CSV tables.

mod config;
mod experiments;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use config::Config;
use experiments::RunOutput;

#[derive(Parser)]
#[command(
    name = "mtlab",
    about = "Radial variational laboratory for critical Adams (R^4) and Trudinger-Moser (R^2) extremals",
    version
)]
struct Cli {
    #[command(subcommand)]
    experiment: Experiment,

    /// Flat key = value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (default: out-<experiment>)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Run seed, echoed into the metadata
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Override the grid node count
    #[arg(long, global = true)]
    nodes: Option<usize>,

    /// Override the grid truncation radius
    #[arg(long, global = true)]
    rmax: Option<f64>,

    /// Extra key=value config overrides (repeatable)
    #[arg(long = "set", short = 'S', global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Subcommand, Clone, Copy, Debug)]
enum Experiment {
    /// Closed-form constant bounds, Young constants, trial-family sweep
    Constants,
    /// Gagliardo-Nirenberg ground state solve (R^4 by default)
    GroundState,
    /// Liouville bubble: mass and PDE residual
    Bubble,
    /// Fundamental solution of Delta^2 + 1, regular part, concentration levels
    Green,
    /// Matched test function and the surpass inequality
    TestFunction,
    /// Threshold sweep over the subtraction coefficient
    Sweep,
    /// Nonexistence series F(t) and the alpha** estimate
    Nonexistence,
    /// Two-dimensional Trudinger-Moser mirror
    Tm2d,
}

impl Experiment {
    fn name(self) -> &'static str {
        match self {
            Experiment::Constants => "constants",
            Experiment::GroundState => "ground-state",
            Experiment::Bubble => "bubble",
            Experiment::Green => "green",
            Experiment::TestFunction => "test-function",
            Experiment::Sweep => "sweep",
            Experiment::Nonexistence => "nonexistence",
            Experiment::Tm2d => "tm2d",
        }
    }
}

fn build_config(cli: &Cli) -> Result<Config> {
    let mut cfg = match &cli.config {
        Some(path) => Config::from_file(path)?,
        None => Config::default(),
    };
    if let Some(n) = cli.nodes {
        cfg.set("nodes", &n.to_string());
    }
    if let Some(r) = cli.rmax {
        cfg.set("rmax", &r.to_string());
    }
    for kv in &cli.sets {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| anyhow!("--set expects KEY=VALUE, got {kv:?}"))?;
        cfg.set(k.trim(), v.trim());
    }
    Ok(cfg)
}

fn run(cli: &Cli, cfg: &Config) -> Result<RunOutput> {
    match cli.experiment {
        Experiment::Constants => experiments::constants(cfg),
        Experiment::GroundState => experiments::ground_state(cfg),
        Experiment::Bubble => experiments::bubble(cfg),
        Experiment::Green => experiments::green(cfg),
        Experiment::TestFunction => experiments::test_function(cfg),
        Experiment::Sweep => experiments::sweep(cfg),
        Experiment::Nonexistence => experiments::nonexistence(cfg),
        Experiment::Tm2d => experiments::tm2d(cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_dir = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("out-{}", cli.experiment.name())));

    let outcome = build_config(&cli).and_then(|cfg| {
        let output = run(&cli, &cfg)?;
        Ok((cfg, output))
    });

    match outcome {
        Ok((cfg, output)) => {
            if let Err(e) = write_outputs(&cli, &out_dir, &cfg, &output) {
                eprintln!("{}", error_record(&cli, &e));
                return ExitCode::FAILURE;
            }
            println!(
                "{}: wrote summary.json, metadata.json and {} table(s) to {}",
                cli.experiment.name(),
                output.tables.len(),
                out_dir.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            let record = error_record(&cli, &e);
            // best-effort machine-readable error record; no partial outputs
            if std::fs::create_dir_all(&out_dir).is_ok() {
                let _ = std::fs::write(out_dir.join("error.json"), format!("{record}\n"));
            }
            eprintln!("{record}");
            ExitCode::FAILURE
        }
    }
}

fn error_record(cli: &Cli, e: &anyhow::Error) -> String {
    serde_json::to_string_pretty(&json!({
        "experiment": cli.experiment.name(),
        "error": format!("{e:#}"),
    }))
    .expect("error record serializes")
}

fn write_outputs(cli: &Cli, out_dir: &PathBuf, cfg: &Config, output: &RunOutput) -> Result<()> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let summary = serde_json::to_string_pretty(&output.summary)?;
    std::fs::write(out_dir.join("summary.json"), format!("{summary}\n"))?;
    for (name, table) in &output.tables {
        std::fs::write(out_dir.join(name), table)?;
    }
    let unused = cfg.unused_keys();
    let metadata = json!({
        "experiment": cli.experiment.name(),
        "seed": cli.seed,
        "config": cfg.used_entries(),
        "unused_config_keys": unused,
        "timestamp_unix": SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        "version": env!("CARGO_PKG_VERSION"),
    });
    std::fs::write(
        out_dir.join("metadata.json"),
        format!("{}\n", serde_json::to_string_pretty(&metadata)?),
    )?;
    Ok(())
}
