//! Experiment harness for clustered cell-free rate estimation.
//!
//! Wraps `cfnet-core` with JSON configuration, parallel Monte Carlo and
//! fixed-point evaluation, the four figure-family sweeps, CSV and SVG
//! output, and a property-check suite for a single scenario.

pub mod config;
pub mod dump;
pub mod error;
pub mod estimate;
pub mod experiment;
pub mod report;
pub mod svg;
pub mod validate;

pub use config::RunConfig;
pub use error::HarnessError;
pub use experiment::{run_experiment, ExperimentKind, ExperimentSpec, ResultRow};
