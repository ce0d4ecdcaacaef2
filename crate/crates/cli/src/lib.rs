//! Command-line front end for the `hosc` oscillator toolkit: tables for
//! plotting and a self-verification suite.

pub mod commands;
pub mod config;
pub mod error;
pub mod table;
pub mod verify;

use std::io::Write;
use std::path::PathBuf;

pub use config::{OutputFormat, RunConfig};
pub use error::CliError;
pub use table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eigen,
    Genfunc,
    Transform,
    Delta,
    Propagator,
    Evolve,
    Verify,
}

/// Loads the config file (if any), then applies `key=value` overrides.
pub fn load_config(path: Option<&PathBuf>, overrides: &[String]) -> Result<RunConfig, CliError> {
    let mut config = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                CliError::config("config", format!("cannot read {}: {e}", p.display()))
            })?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    let pairs = config::collect_pairs(overrides.iter().map(String::as_str))?;
    config.apply_all(&pairs)?;
    config.validate()?;
    Ok(config)
}

/// Runs a command; the returned code follows the exit-status contract.
pub fn run(command: Command, config: &RunConfig, out: &mut impl Write) -> Result<i32, CliError> {
    let (table, code) = match command {
        Command::Eigen => (commands::cmd_eigen(config)?, error::EXIT_OK),
        Command::Genfunc => (commands::cmd_genfunc(config)?, error::EXIT_OK),
        Command::Transform => (commands::cmd_transform(config)?, error::EXIT_OK),
        Command::Delta => (commands::cmd_delta(config)?, error::EXIT_OK),
        Command::Propagator => (commands::cmd_propagator(config)?, error::EXIT_OK),
        Command::Evolve => (commands::cmd_evolve(config)?, error::EXIT_OK),
        Command::Verify => {
            let report = verify::run_verify(config);
            let code = if report.overall_pass() {
                error::EXIT_OK
            } else {
                error::EXIT_VERIFY_FAILED
            };
            (report.to_table(), code)
        }
    };
    match &config.output {
        Some(path) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
            table.write(config, &mut file)?;
            file.flush()?;
        }
        None => table.write(config, out)?,
    }
    Ok(code)
}
