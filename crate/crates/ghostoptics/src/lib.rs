//! Scenario runner, file formats and CLI plumbing around `ghostoptics-core`.

pub mod compare;
pub mod config;
pub mod csvio;
pub mod error;
pub mod pgm;
pub mod presets;
pub mod report;
pub mod run;

pub use compare::{compare_profiles, Comparison};
pub use config::ScenarioConfig;
pub use error::{Result, RunError};
pub use report::RunReport;
pub use run::run_scenario;
