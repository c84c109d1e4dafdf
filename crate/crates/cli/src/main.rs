use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use riemflow_cli::config::{parse_config_text, parse_overrides};
use riemflow_cli::{experiments, Experiment, RunConfig};

#[derive(Parser)]
#[command(name = "riemflow", version, about = "Flow diagnostics on curved surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment; parameters are given as `--key value`.
    Run {
        experiment: String,
        /// File of `key = value` lines.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Full-resolution torus settings.
        #[arg(long)]
        full: bool,
        /// Output directory (default: $RIEMFLOW_OUTPUT_DIR or ./riemflow-out).
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--KEY VALUE")]
        params: Vec<String>,
    },
    /// List experiments with their default parameters.
    List,
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::List => {
            for e in Experiment::ALL {
                println!("{}", e.name());
                for (k, v) in e.defaults(false) {
                    println!("    {k} = {}", serde_json::to_string(&v)?);
                }
            }
            Ok(())
        }
        Command::Run { experiment, config, full, output_dir, params } => {
            let file = match &config {
                Some(p) => {
                    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                    parse_config_text(&text).with_context(|| format!("in {}", p.display()))?
                }
                None => Vec::new(),
            };
            let cfg = RunConfig::resolve(&experiment, full, &file, &parse_overrides(&params)?, output_dir)?;
            let m = experiments::run(&cfg, &mut |s| eprintln!("{s}"))?;
            eprintln!("wrote {} files to {}", m.files.len(), cfg.output_dir.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
