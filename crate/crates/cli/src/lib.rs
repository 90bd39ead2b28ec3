//! Harness: configuration, experiment dispatch, parallel execution and
//! persistence for the mesowig toolkit.

// Validation uses `!(x > 0.0)` deliberately: unlike `x <= 0.0` it also
// rejects NaN inputs.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod manifest;
pub mod output;
pub mod runner;

pub use config::{Experiment, ExperimentConfig};
pub use error::CliError;
pub use manifest::RunManifest;
pub use output::{emit_plot_data, PlotKind};
pub use runner::{run, RunOutput};
