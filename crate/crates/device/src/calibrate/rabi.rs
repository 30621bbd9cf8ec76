use std::f64::consts::PI;

use nuqutrit_core::decomp::{GivensGate, Subspace};
use nuqutrit_core::vm::derive_seed;
use serde::Serialize;

use super::measure_population;
use crate::error::{DeviceError, Result};
use crate::fit::{curve_fit, CurveFit, CurveModel};
use crate::pulse::pulse_probabilities;
use crate::schedule::{Play, PulseCalibration, PulseSchedule};
use crate::transmon::MockTransmon;

#[derive(Debug, Clone, Serialize)]
pub struct RabiResult {
    pub subspace: Subspace,
    /// Half the fitted oscillation period.
    pub a_pi: f64,
    pub amplitudes: Vec<f64>,
    pub signal: Vec<f64>,
    pub fit: CurveFit,
}

/// Sweeps the amplitude of a Gaussian at `frequency_ghz` and fits a cosine to the upper-level
/// population. `{12}` sweeps start from `|1⟩` prepared with the factory `{01}` π pulse.
pub fn rabi_amplitude(
    device: &MockTransmon,
    subspace: Subspace,
    frequency_ghz: f64,
    amplitudes: &[f64],
    shots: u64,
    seed: u64,
) -> Result<RabiResult> {
    let cal = PulseCalibration::nominal(device);
    let (_, upper) = subspace.levels();
    let mut signal = Vec::with_capacity(amplitudes.len());
    for (k, &a) in amplitudes.iter().enumerate() {
        let mut plays = Vec::new();
        if subspace == Subspace::S12 {
            plays.push(cal.play(&GivensGate::r01(0.0, PI)));
        }
        plays.push(Play {
            frequency_ghz,
            amplitude: a,
            ..cal.idle(subspace)
        });
        let p = pulse_probabilities(device, &PulseSchedule::new(plays))?;
        signal.push(measure_population(p, upper, shots, derive_seed(seed, &[k as u64]))?);
    }
    let fit = curve_fit(CurveModel::Cosine, amplitudes, &signal).map_err(|e| DeviceError::Fit {
        experiment: "rabi",
        reason: e.to_string(),
        xs: amplitudes.to_vec(),
        ys: signal.clone(),
    })?;
    let span = amplitudes.iter().cloned().fold(0.0, f64::max) - amplitudes.iter().cloned().fold(f64::INFINITY, f64::min);
    let period = fit.params[1];
    if !(period > 0.0) || period > span || fit.params[0] < 0.05 {
        return Err(DeviceError::Fit {
            experiment: "rabi",
            reason: format!("grid must cover a full oscillation (fitted period {period:.4}, span {span:.4})"),
            xs: amplitudes.to_vec(),
            ys: signal,
        });
    }
    Ok(RabiResult {
        subspace,
        a_pi: period / 2.0,
        amplitudes: amplitudes.to_vec(),
        signal,
        fit,
    })
}
