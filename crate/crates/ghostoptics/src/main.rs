use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ghostoptics::config::ScenarioConfig;
use ghostoptics::{compare_profiles, presets, run_scenario, RunError};

/// Ghost imaging and two-photon correlation simulator
#[derive(Parser)]
#[command(version)]
struct Cli {
    /// Worker threads (0 = one per core)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a config file or a bundled preset
    Run {
        /// Scenario config (TOML)
        config: Option<PathBuf>,
        /// Bundled preset name instead of a config file
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        /// Output directory
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare two coordinate_m,value profiles
    Compare { a: PathBuf, b: PathBuf },
    /// List bundled presets
    Presets,
}

fn run(cli: Cli) -> Result<(), RunError> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| RunError::config("--threads", e.to_string()))?;
    }
    match cli.command {
        Command::Run { config, preset, out, seed } => {
            let mut cfg = match (config, preset) {
                (Some(path), None) => ScenarioConfig::from_path(&path)?,
                (None, Some(name)) => presets::preset(&name)?,
                _ => return Err(RunError::config("run", "give a config path or --preset")),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let out = out.or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("out"));
            let report = run_scenario(&cfg, &out)?;
            for (k, v) in &report.metrics {
                println!("{k} = {v}");
            }
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            println!("wrote {} files to {}", report.files.len() + 1, out.display());
        }
        Command::Compare { a, b } => {
            let c = compare_profiles(&a, &b)?;
            println!("rms = {}", c.rms);
            println!("max_abs = {}", c.max_abs);
            match c.first_zero_ratio {
                Some(r) => println!("first_zero_ratio = {r}"),
                None => println!("first_zero_ratio = none"),
            }
        }
        Command::Presets => {
            for (name, _) in presets::PRESETS {
                println!("{name}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
