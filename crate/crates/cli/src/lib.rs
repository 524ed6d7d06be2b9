//! Parameter sweeps over the aqrm toolkit with CSV export.
//!
//! Every run writes CSV files whose `#` lines echo the configuration, plus a
//! `manifest.json` used to resume interrupted sweeps.

pub mod args;
pub mod config;
pub mod modes;
pub mod output;
pub mod reader;

pub use config::{ConfigError, Mode, SweepConfig};
pub use modes::{run, RunError};
pub use output::{Manifest, RunSummary};

pub const WORKERS_ENV: &str = "AQRM_WORKERS";

pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const PARTIAL: i32 = 3;
}

/// Flag, then environment, then config file, then available parallelism.
pub fn resolve_workers(flag: Option<usize>, env: Option<&str>, file: Option<usize>) -> Result<usize, ConfigError> {
    let env = match env {
        Some(s) => {
            Some(s.trim().parse::<usize>().map_err(|_| config::invalid(WORKERS_ENV, format!("not a count: {s:?}")))?)
        }
        None => None,
    };
    let n = flag.or(env).or(file).unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if n == 0 {
        return Err(config::invalid("workers", "must be at least 1"));
    }
    Ok(n)
}

pub fn exit_code(result: &Result<RunSummary, RunError>) -> i32 {
    match result {
        Ok(s) if s.failed_cells > 0 => exit::PARTIAL,
        Ok(_) => exit::OK,
        Err(RunError::Config(_)) => exit::CONFIG,
        Err(RunError::Output(_)) => exit::IO,
    }
}
