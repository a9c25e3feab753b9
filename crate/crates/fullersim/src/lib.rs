//! File formats, run configuration and pipelines around `fullersim-core`.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod error;
pub mod formats;

use artifacts::Outputs;
use config::Settings;
use error::Result;

/// Version of the core crate this build links.
pub const CORE_VERSION: &str = fullersim_core::VERSION;

pub const COMMANDS: [&str; 8] = ["graph", "gs", "perturb", "evolve", "measure", "floor", "calibrate", "pipeline"];

/// Runs one subcommand. Files written before a failure are removed again,
/// except manifold caches.
pub fn run(command: &str, settings: &Settings) -> Result<()> {
    let body = match command {
        "graph" => commands::cmd_graph,
        "gs" => commands::cmd_gs,
        "perturb" => commands::cmd_perturb,
        "evolve" => commands::cmd_evolve,
        "measure" => commands::cmd_measure,
        "floor" => commands::cmd_floor,
        "calibrate" => commands::cmd_calibrate,
        "pipeline" => commands::cmd_pipeline,
        other => return Err(error::AppError::Config(format!("unknown command `{other}`"))),
    };
    let mut entries = settings.entries().clone();
    entries.remove("threads");
    let mut out = Outputs::new(command, settings.digest(command), entries);
    match body(settings, &mut out) {
        Ok(()) => out.commit(),
        Err(e) => {
            out.abort();
            Err(e)
        }
    }
}
