use nuqutrit_core::decomp::{GivensGate, Subspace};
use nuqutrit_core::vm::derive_seed;
use serde::Serialize;

use super::measure_population;
use crate::error::{DeviceError, Result};
use crate::fit::{curve_fit, CurveFit, CurveModel};
use crate::pulse::pulse_probabilities;
use crate::schedule::{Play, PulseCalibration, PulseSchedule};
use crate::transmon::MockTransmon;

// smallest peak height treated as a resonance
const MIN_CONTRAST: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct SpectroscopyResult {
    pub f12_ghz: f64,
    pub freqs_ghz: Vec<f64>,
    pub signal: Vec<f64>,
    pub fit: CurveFit,
}

/// Prepares `|1⟩`, sweeps the carrier of one Gaussian play and fits a Lorentzian to `P(|2⟩)`.
pub fn rabi_spectroscopy_12(
    device: &MockTransmon,
    freqs_ghz: &[f64],
    amplitude: f64,
    shots: u64,
    seed: u64,
) -> Result<SpectroscopyResult> {
    if freqs_ghz.len() < 5 {
        return Err(DeviceError::Data("spectroscopy needs at least 5 frequencies".into()));
    }
    let cal = PulseCalibration::nominal(device);
    let prep = cal.play(&GivensGate::r01(0.0, std::f64::consts::PI));
    let mut signal = Vec::with_capacity(freqs_ghz.len());
    for (k, &f) in freqs_ghz.iter().enumerate() {
        let probe = Play {
            frequency_ghz: f,
            amplitude,
            ..cal.idle(Subspace::S12)
        };
        let p = pulse_probabilities(device, &PulseSchedule::new(vec![prep, probe]))?;
        signal.push(measure_population(p, 2, shots, derive_seed(seed, &[k as u64]))?);
    }
    let fail = |reason: String, signal: &[f64]| DeviceError::Fit {
        experiment: "spectroscopy",
        reason,
        xs: freqs_ghz.to_vec(),
        ys: signal.to_vec(),
    };
    let (min, max) = signal
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    if max - min < MIN_CONTRAST {
        return Err(fail(format!("signal contrast {:.3} is below {MIN_CONTRAST}", max - min), &signal));
    }
    let fit = curve_fit(CurveModel::Lorentzian, freqs_ghz, &signal).map_err(|e| fail(e.to_string(), &signal))?;
    let (lo, hi) = freqs_ghz
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &f| (a.min(f), b.max(f)));
    let f12 = fit.params[0];
    if !(lo..=hi).contains(&f12) || fit.params[2] <= 0.0 {
        return Err(fail(format!("no resonance peak inside [{lo}, {hi}] GHz"), &signal));
    }
    Ok(SpectroscopyResult {
        f12_ghz: f12,
        freqs_ghz: freqs_ghz.to_vec(),
        signal,
        fit,
    })
}
