//! Command-line front end for `sharpconvex-core`: grid verifications,
//! best-constant extraction, hypercontractivity scans and figure data,
//! written as CSV or JSON reports.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod figures;
pub mod parallel;
pub mod report;

pub use commands::{run, RunError};
pub use config::{Cli, RunConfig};
pub use report::Report;
