use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DeviceError {
    #[error(transparent)]
    Core(#[from] nuqutrit_core::Error),
    #[error("invalid device: {0}")]
    Device(String),
    #[error("invalid schedule: {0}")]
    Schedule(String),
    /// Too many integration steps for one schedule.
    #[error("schedule needs {steps} integration steps, limit is {limit}")]
    StepOverflow { steps: u64, limit: u64 },
    /// A calibration fit failed; the measured curve is kept for inspection.
    #[error("{experiment} fit failed: {reason}")]
    Fit {
        experiment: &'static str,
        reason: String,
        xs: Vec<f64>,
        ys: Vec<f64>,
    },
    #[error("{0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = DeviceError> = std::result::Result<T, E>;
