//! Calibration experiments run against a [`MockTransmon`](crate::MockTransmon).
//!
//! Population measurements use `shots` multinomial draws; `shots = 0` returns exact expectations.

mod amplification;
mod rabi;
mod readout;
mod report;
mod spectroscopy;

pub use amplification::{amplification_model, error_amplification, AmplificationResult};
pub use rabi::{rabi_amplitude, RabiResult};
pub use readout::{
    readout_experiment, silhouette_optimize, silhouette_score, train_discriminator, Discriminator, IqDataset,
    SilhouetteMap,
};
pub use report::{calibrate, CalibrationPlan, CalibrationReport, Estimate};
pub use spectroscopy::{rabi_spectroscopy_12, SpectroscopyResult};

use nuqutrit_core::vm::sample_counts;

use crate::error::Result;

/// Estimated population of `level`: exact for `shots == 0`, sampled otherwise.
pub(crate) fn measure_population(probs: [f64; 3], level: usize, shots: u64, seed: u64) -> Result<f64> {
    if shots == 0 {
        return Ok(probs[level]);
    }
    let c = sample_counts(probs, shots, seed)?;
    Ok(c.counts[level] as f64 / shots as f64)
}
