//! Batch experiment runner for the radial heat-equation laboratory:
//! JSON configs in, deterministic CSV/JSON reports out.

pub mod config;
pub mod output;
pub mod scenario;

pub use config::{validate_config, ExperimentConfig, Scenario, Validated};
pub use output::{config_hash, format_float};
pub use scenario::{run_scenario, CheckResult, RunRecord};
