//! Batch runner for `synthlab-core`: parses experiment configs, runs one
//! command on a thread pool and writes a CSV table plus a JSON-lines
//! summary.
//!
//! Results never depend on the thread count; the same config and seed give
//! byte-identical files.

pub mod config;
pub mod pool;
pub mod report;
pub mod runner;

pub use config::{parse_config, Command, ConfigError, ExperimentConfig, DEFAULT_SEED};
pub use pool::Pool;
pub use report::Report;
pub use runner::{run_experiment, write_artifacts, RunError};
