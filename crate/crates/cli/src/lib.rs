//! Scenario runner for the `driftheat` verification lab: TOML scenarios in,
//! line-delimited JSON and CSV out.

pub mod checks;
pub mod config;
pub mod error;
pub mod report;
pub mod run;

pub use config::{CheckName, Scenario};
pub use error::CliError;
pub use report::RunReport;
