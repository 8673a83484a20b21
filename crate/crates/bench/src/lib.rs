//! Benchmark harness: run solver configurations over the test suite, store
//! one record per run, and summarise with performance profiles.

pub mod matrix;
pub mod profile;
pub mod record;
pub mod svg;

use thiserror::Error;

pub use matrix::{full_dims, plan_instances, run_matrix, run_one};
pub use profile::{
    emit_curves_csv, performance_profile, ratio_table, FailurePolicy, Metric, ProfileCurve,
    ProfileError, RatioTable,
};
pub use record::{emit_records_csv, load_records_csv, RunRecord, RunStatus, SafeguardKind};
pub use svg::{emit_profile_svg, render_profile_svg};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("invalid solver configuration: {0}")]
    Config(#[from] ssgm_core::solver::ConfigError),
    #[error("could not start worker pool: {0}")]
    ThreadPool(String),
}
