//! Experiment harness for `bayesopt`: single runs, the full
//! acquisition × optimizer matrix, and first-iteration snapshots, written as
//! JSON reports and plot-ready CSV series.

pub mod cli;
mod error;
pub mod harness;
pub mod table;

pub use cli::run_cli;
pub use error::HarnessError;
