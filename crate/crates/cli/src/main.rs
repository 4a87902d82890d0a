use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use dbpareto_cli::commands::{self, VerifyOptions};
use dbpareto_core::{Engine, Format, RunConfig};

const DEFAULT_PORT: u16 = 8080;

#[derive(Parser)]
#[command(
    name = "dbpareto",
    version,
    about = "Nondominated distance-bounding protocol instances"
)]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the instance set with raw and scaled attributes.
    Generate {
        #[arg(long)]
        protocols: Option<String>,
        #[arg(long, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Nondominated instances under a mafia-fraud bound.
    Pareto {
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long)]
        protocols: Option<String>,
        #[arg(long, default_value = "text")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Representative table for a list of bounds.
    Report {
        #[arg(long, allow_hyphen_values = true)]
        y_list: String,
        #[arg(long, default_value = "table3")]
        style: String,
        #[arg(long, default_value = "text")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// SVG charts.
    Chart {
        #[command(subcommand)]
        kind: ChartKind,
    },
    /// Fraud resistance against the number of rounds.
    Curves {
        #[arg(long)]
        fraud: String,
        /// Comma-separated round counts; 32,64,...,256 by default.
        #[arg(long)]
        points: Option<String>,
        #[arg(long)]
        svg: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the oracle suite; exits nonzero on any failure.
    Verify {
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Serve the JSON API.
    Serve {
        #[arg(long)]
        port: Option<u16>,
    },
}

#[derive(Subcommand)]
enum ChartKind {
    Spider {
        /// Comma-separated instance ids, at most six.
        #[arg(long)]
        instances: String,
        /// Normalize against an ideal instance with this many rounds.
        #[arg(long)]
        normalize: Option<u32>,
        #[arg(long)]
        axes: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn write_out(cfg: &RunConfig, output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            let path = match &cfg.output_dir {
                Some(dir) if path.is_relative() => dir.join(path),
                _ => path.to_path_buf(),
            };
            std::fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let engine = Engine::from_config(&cfg)?;
    match cli.command {
        Command::Generate {
            protocols,
            format,
            output,
        } => {
            let text = commands::generate(&engine, protocols.as_deref(), format)?;
            write_out(&cfg, output.as_deref(), &text)?;
        }
        Command::Pareto {
            y,
            protocols,
            format,
            output,
        } => {
            let text = commands::pareto(&engine, &y, protocols.as_deref(), format)?;
            write_out(&cfg, output.as_deref(), &text)?;
        }
        Command::Report {
            y_list,
            style,
            format,
            output,
        } => {
            let text = commands::report(&engine, &y_list, &style, format)?;
            write_out(&cfg, output.as_deref(), &text)?;
        }
        Command::Chart {
            kind:
                ChartKind::Spider {
                    instances,
                    normalize,
                    axes,
                    output,
                },
        } => {
            let svg = commands::spider(&engine, &instances, normalize, axes.as_deref())?;
            write_out(&cfg, output.as_deref(), &svg)?;
        }
        Command::Curves {
            fraud,
            points,
            svg,
            output,
        } => {
            let text = commands::curves(&engine, &fraud, points.as_deref(), svg)?;
            write_out(&cfg, output.as_deref(), &text)?;
        }
        Command::Verify { trials, seed } => {
            let opts = VerifyOptions {
                trials,
                seed,
                ..VerifyOptions::default()
            };
            let (text, ok) = commands::verify(&engine, &opts)?;
            print!("{text}");
            if !ok {
                eprintln!("error: oracle suite failed");
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Serve { port } => {
            let port = port.or(cfg.port).unwrap_or(DEFAULT_PORT);
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(dbpareto_cli::serve(Arc::new(engine), port))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
