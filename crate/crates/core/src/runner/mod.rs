//! Batch front end: configuration, scenario orchestration and artifacts.

pub mod config;
pub mod experiments;
pub mod output;
pub mod plot;
pub mod scenarios;

pub use config::{Scenario, ScenarioConfig};
pub use scenarios::{run_scenario, RunReport};
