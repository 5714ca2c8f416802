//! Scenario configuration, the simulation driver, metrics and CSV output.

pub mod config;
pub mod metrics;
pub mod output;
pub mod record;
pub mod sim;
pub mod sweep;

pub use config::{ConfigError, ScenarioConfig, ScenarioMode};
pub use metrics::{summarize, RunSummary};
pub use record::RunRecord;
pub use sim::run_scenario;
