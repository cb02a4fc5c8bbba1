use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pqw::config::{Mode, RunConfig};
use pqw::error::Result;
use pqw::graph::pattern_count;
use pqw::runner;

#[derive(Parser)]
#[command(name = "pqw", version, about = "Percolation quantum walk simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    /// Override the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's output directory.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Override the config's mode (ideal, realistic, errorbars).
    #[arg(long)]
    mode: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured experiment and write the result files.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print the pattern table (index, per-step edge strings, probability).
    ListPatterns {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Parse and validate a config, reporting what it would run.
    Validate { config: PathBuf },
}

fn load(path: &PathBuf, overrides: Option<&Overrides>) -> Result<RunConfig> {
    let mut config = RunConfig::load(path)?;
    if let Some(ov) = overrides {
        if let Some(seed) = ov.seed {
            config.seed = seed;
        }
        if let Some(dir) = &ov.output_dir {
            config.output.directory = dir.clone();
        }
        if let Some(mode) = &ov.mode {
            config.mode = mode.parse::<Mode>()?;
        }
        config.validate()?;
    }
    Ok(config)
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, overrides } => {
            let config = load(&config, Some(&overrides))?;
            let summary = runner::run(&config)?;
            println!(
                "ran {} steps over {} patterns ({} mode)",
                summary.steps, summary.patterns, config.mode
            );
            for file in summary.files {
                println!("wrote {}", file.display());
            }
            Ok(())
        }
        Command::ListPatterns { config, overrides } => {
            let config = load(&config, Some(&overrides))?;
            let stdout = std::io::stdout();
            runner::list_patterns(&config, &mut stdout.lock())
        }
        Command::Validate { config } => {
            let config = load(&config, None)?;
            let set = config.configuration_set()?;
            let patterns = pattern_count(&set, config.steps)
                .map_or_else(|| "overflow".to_string(), |n| n.to_string());
            println!(
                "configuration OK: {} vertices, {} steps, p = {}, {} set, {} mode, {} patterns",
                config.vertices,
                config.steps,
                config.link_probability,
                if config.restricted { "restricted" } else { "full" },
                config.mode,
                patterns,
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
