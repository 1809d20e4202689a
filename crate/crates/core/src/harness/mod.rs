//! Scenario loading, batch runs, CSV logs and summary metrics.

mod log;
mod metrics;
mod runner;
mod scenario;
mod trajectory;

pub use log::{read_csv, LogError, RunLog, TickRecord, CSV_COLUMNS};
pub use metrics::{metrics, MetricsError, Summary};
pub use runner::{predicted_press_force, run, scenario_trajectory, RunError};
pub use scenario::{
    load_scenario, parse_scenario, validate, InitialCondition, Scenario, ScenarioError, ScenarioFile, Segment,
    SegmentFile, TargetSpec, DEFAULT_RATE_HZ,
};
pub use trajectory::Trajectory;

/// Environment variable naming the default output directory for `run`.
pub const OUT_DIR_ENV: &str = "TILTROTOR_OUT_DIR";

/// Parses a CSV log and computes its summary. Entry point for untrusted logs.
pub fn metrics_from_csv(bytes: &[u8], window: f64) -> Result<Summary, MetricsFromCsvError> {
    let records = read_csv(bytes)?;
    Ok(metrics(&records, window)?)
}

#[derive(Debug, thiserror::Error)]
pub enum MetricsFromCsvError {
    #[error(transparent)]
    Log(#[from] LogError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}
