//! Experiment runner for the `ftpomdp-core` planners.
//!
//! Reads one JSON config, runs seeded episodes, and writes CSV and JSON
//! artifacts whose layouts are described in `docs/formats.md`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod concentration;
pub mod config;
pub mod env;
mod error;
pub mod output;
pub mod runner;

pub use config::ExperimentConfig;
pub use error::{BenchError, Result};
