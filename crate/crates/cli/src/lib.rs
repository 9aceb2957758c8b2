//! The `viewdir` command line: configuration merging, dataset loading and
//! the `select`, `split`, `coverage` and `simulate` commands.

pub mod args;
pub mod commands;
pub mod config;
pub mod dataset;
pub mod error;
pub mod plan;

use args::{Cli, Command};
use config::RunConfig;
pub use error::CliError;

/// Merges the config file (if any) with the flags and runs the command.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let cfg = file.overlay(&cli.command.flag_config());
    match &cli.command {
        Command::Select(_) => {
            for p in commands::select::run(cfg)? {
                println!("{}", p.display());
            }
        }
        Command::Split(_) => {
            for p in commands::split::run(cfg)? {
                println!("{}", p.display());
            }
        }
        Command::Coverage(_) => {
            println!("{}", commands::coverage::SUMMARY_HEADER);
            for r in commands::coverage::run(cfg)? {
                println!("{},{},{},{}", r.set, r.mean, r.variance, r.max);
            }
        }
        Command::Simulate(_) => {
            let rows = commands::simulate::run(cfg)?;
            println!("{} rows", rows.len());
        }
    }
    Ok(())
}
