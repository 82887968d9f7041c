//! Configuration-driven front end for `albert-core`: recipes in TOML,
//! reports in JSON, and a parallel polarization sweep.

pub mod config;
pub mod error;
pub mod recipe;
pub mod report;
pub mod run;
pub mod sweep;

pub use config::RunConfig;
pub use error::ForgeError;
pub use report::Report;
pub use run::{Command, Options, Runner};
pub use sweep::RayonSweep;

/// Parses and runs `text` as one subcommand.
pub fn run_text(text: &str, command: Command, options: &Options) -> Result<Report, ForgeError> {
    let config = RunConfig::parse(text).map_err(|e| ForgeError::Config(e.to_string()))?;
    Runner::new(&config, options, &RayonSweep).run(command)
}
