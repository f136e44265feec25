//! Command-line front end for the covariate prioritization engine: CSV and
//! config ingestion, the subcommand pipelines, and table rendering.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod records;
pub mod report;

pub use cli::run;
pub use config::RunConfig;
pub use error::CliError;
pub use records::{CovariateRecord, EvidenceSource};
pub use report::{Format, Table};
