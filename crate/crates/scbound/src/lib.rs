//! File formats, reports and the command implementations behind the
//! `scbound` binary.
//!
//! Every report embeds a [`RunManifest`] and is byte-stable for fixed
//! arguments: wall time is only recorded when asked for.

use std::time::Duration;

use serde::Serialize;

use scbound_core::bounds::OptConfig;

pub mod cli;
pub mod commands;
pub mod format;
pub mod report;
pub mod reproduce;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 1;
    pub const VERIFICATION: u8 = 2;
    pub const CAPACITY: u8 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] scbound_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(scbound_core::Error::Capacity(_)) => exit::CAPACITY,
            _ => exit::USAGE,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Optimizer settings as written into reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigJson {
    pub grid_resolution: f64,
    pub refine_iters: usize,
    pub simplex_floor: f64,
    pub tolerance: f64,
    pub max_grid_points: usize,
    pub random_starts: usize,
    pub refine_starts: usize,
    pub seed: u64,
}

impl From<&OptConfig> for ConfigJson {
    fn from(c: &OptConfig) -> Self {
        ConfigJson {
            grid_resolution: c.grid_resolution,
            refine_iters: c.refine_iters,
            simplex_floor: c.simplex_floor,
            tolerance: c.tolerance,
            max_grid_points: c.max_grid_points,
            random_starts: c.random_starts,
            refine_starts: c.refine_starts,
            seed: c.seed,
        }
    }
}

/// How a report was produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Arguments after the subcommand, as given.
    pub args: Vec<String>,
    /// Files read, in the order they were named.
    pub inputs: Vec<String>,
    pub config: ConfigJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunManifest {
    pub fn new(command: &str, args: Vec<String>, inputs: Vec<String>, cfg: &OptConfig) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            args,
            inputs,
            config: cfg.into(),
            wall_time_s: None,
        }
    }

    pub fn set_wall_time(&mut self, d: Duration) {
        self.wall_time_s = Some(d.as_secs_f64());
    }
}
