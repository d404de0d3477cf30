use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use hadamard_l1::experiment::{preset_catalog, run, Action, ExperimentConfig, PresetConfig, RunContext};
use hadamard_l1::{io, Error, Result};

/// Experiments on l1-regularized models and their Hadamard difference parametrization.
#[derive(Parser)]
#[command(name = "hdp", version)]
struct Cli {
    #[command(subcommand)]
    action: Command,
    /// TOML experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for report.json and CSV artifacts.
    #[arg(long, global = true, env = "HDP_OUT_DIR")]
    out: Option<PathBuf>,
    /// Override every seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Preset name, for the preset action.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Omit CSV header rows.
    #[arg(long, global = true)]
    no_header: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    Solve,
    Classify,
    KlFit,
    RateFit,
    SaddleMargin,
    CheckGrad,
    /// Run a named preset; without --preset, list the catalog.
    Preset,
}

impl From<Command> for Action {
    fn from(c: Command) -> Self {
        match c {
            Command::Solve => Action::Solve,
            Command::Classify => Action::Classify,
            Command::KlFit => Action::KlFit,
            Command::RateFit => Action::RateFit,
            Command::SaddleMargin => Action::SaddleMargin,
            Command::CheckGrad => Action::CheckGrad,
            Command::Preset => Action::Preset,
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let (mut cfg, base) = match &cli.config {
        Some(path) => (
            ExperimentConfig::load(path)?,
            path.parent().map(PathBuf::from).unwrap_or_default(),
        ),
        None => (ExperimentConfig::default(), PathBuf::new()),
    };
    cfg.action = Some(cli.action.into());
    if let Some(name) = cli.preset {
        let params = cfg.preset.take().map(|p| p.params).unwrap_or_default();
        cfg.preset = Some(PresetConfig { name, params });
    }
    if matches!(cli.action, Command::Preset) && cfg.preset.is_none() {
        println!(
            "{}",
            serde_json::to_string_pretty(preset_catalog()).expect("catalog serializes")
        );
        return Ok(());
    }
    if let Some(seed) = cli.seed {
        cfg.override_seed(seed);
    }
    if cli.no_header {
        cfg.output.header = false;
    }
    let out_dir = cli
        .out
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("hdp-out"));
    let started = Instant::now();
    let report = run(
        &cfg,
        &RunContext {
            base,
            out_dir: Some(out_dir.clone()),
        },
    )?;
    let json = report.to_json();
    write(&out_dir.join("report.json"), &json)?;
    let timing = serde_json::json!({ "wall_clock_seconds": started.elapsed().as_secs_f64() });
    write(&out_dir.join("timing.json"), &(timing.to_string() + "\n"))?;
    print!("{json}");
    Ok(())
}

fn write(path: &std::path::Path, text: &str) -> Result<()> {
    use std::io::Write;
    io::create(path)?
        .write_all(text.as_bytes())
        .map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = serde_json::json!({ "error": { "code": e.code(), "message": e.to_string() } });
            eprintln!("{msg}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
