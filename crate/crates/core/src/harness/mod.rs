//! Experiment engine: configuration, Monte-Carlo estimators, reports and the
//! command-line front end.

pub mod cli;
pub mod config;
pub mod estimate;
pub mod report;
pub mod stats;

pub use config::{CodeDescriptor, Coordinates, DecoderDescriptor, ExperimentConfig, Target};
pub use estimate::{
    estimate_bit_error, estimate_covariance, estimate_e_mean, trend, Engine, TrendPoint,
};
pub use report::{CoordLabel, Report, ReportRow};
