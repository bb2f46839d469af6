//! Configuration ingestion, example catalog, check orchestration, and report
//! emission for the verification CLI.

pub mod catalog;
pub mod config;
pub mod run;

pub use catalog::{listing, lookup, CATALOG};
pub use config::{parse_config, ConfigError, VerificationConfig};
pub use run::{render, run_config, Format, RunOptions, RunReport};
