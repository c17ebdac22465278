//! Scenario runner and export formats for the dielectric-waveguide
//! characterization CLI: strict TOML configs, Touchstone and CSV artifacts,
//! and a deterministic run manifest.

pub mod config;
pub mod error;
pub mod field_csv;
pub mod manifest;
pub mod runner;
pub mod touchstone;
pub mod units;

pub use config::{parse_config, Scenario, ScenarioConfig};
pub use error::CliError;
pub use manifest::RunManifest;
pub use runner::run_scenario;
