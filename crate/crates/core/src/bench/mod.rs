//! Benchmark harness: batch runs, run records, competition metrics and
//! version selection.
//!
//! Record files are JSON lines of [`RunRecord`]; metric summaries are
//! JSON arrays of [`DatasetMetrics`]. Both carry `"schema": 1`.

mod metrics;
mod records;
mod runner;
mod select;

use thiserror::Error;

pub use metrics::{compute_dataset_metrics, compute_instance_score, write_metrics_csv, DatasetMetrics, InstanceScore};
pub use records::{best_over_seeds, read_jsonl, write_jsonl, RunRecord, RunStatus, SCHEMA_VERSION};
pub use runner::{instance_id, run_batch, BatchConfig, SolverCommand};
pub use select::{select_best_version, VersionVerdict, INCUMBENT_ID};

/// Cutoff for candidate evaluation during improvement rounds.
pub const TRAINING_CUTOFF_MS: u64 = 60_000;
/// Cutoff for final evaluation.
pub const EVALUATION_CUTOFF_MS: u64 = 300_000;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("solver executable not found: {0}")]
    SolverMissing(String),
    #[error("data integrity: {0}")]
    DataIntegrity(String),
    #[error("duplicate record for solver {solver} on instance {instance}")]
    DuplicateRecord { solver: String, instance: String },
    #[error("solver {solver} has no record for instance {instance}")]
    MissingRecord { solver: String, instance: String },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
