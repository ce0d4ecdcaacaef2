use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hosc_cli::{load_config, run, Command, OutputFormat};

#[derive(Parser)]
#[command(
    name = "hosc",
    version,
    about = "Harmonic-oscillator tables and self-verification"
)]
struct Cli {
    /// Config file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for the randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override a config key, e.g. `--set alpha=0,-1`. Repeat a key to build a list.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Eigenfunctions on a grid.
    Eigen,
    /// Generating function: closed form against truncated series.
    Genfunc,
    /// Fourier transforms of eigenfunctions and the fitted phase.
    Transform,
    /// Mollified delta and completeness-kernel tables.
    Delta,
    /// Propagator values by route.
    Propagator,
    /// Wavepacket evolution.
    Evolve,
    /// Run every invariant check; exit 1 if any fails.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut overrides = cli.set.clone();
    if let Some(p) = &cli.output {
        overrides.push(format!("output={}", p.display()));
    }
    if let Some(f) = cli.format {
        let f = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
        overrides.push(format!("format={}", f.name()));
    }
    if let Some(s) = cli.seed {
        overrides.push(format!("seed={s}"));
    }
    let command = match cli.command {
        Sub::Eigen => Command::Eigen,
        Sub::Genfunc => Command::Genfunc,
        Sub::Transform => Command::Transform,
        Sub::Delta => Command::Delta,
        Sub::Propagator => Command::Propagator,
        Sub::Evolve => Command::Evolve,
        Sub::Verify => Command::Verify,
    };
    let result = load_config(cli.config.as_ref(), &overrides)
        .and_then(|config| run(command, &config, &mut std::io::stdout().lock()));
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("hosc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
