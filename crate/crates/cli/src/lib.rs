//! Command-line front end and batch experiment runner for `blowup-core`.

pub mod clusters;
pub mod experiment;
pub mod files;

pub use clusters::ClusterSpec;
pub use experiment::{run_experiment, ExperimentConfig, ExperimentResults};
pub use files::verify_file;
