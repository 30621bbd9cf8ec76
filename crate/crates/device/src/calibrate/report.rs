use std::path::Path;

use nuqutrit_core::decomp::Subspace;
use nuqutrit_core::vm::{derive_seed, ConfusionMatrix};
use serde::{Deserialize, Serialize};

use super::{
    error_amplification, rabi_amplitude, rabi_spectroscopy_12, readout_experiment, silhouette_optimize,
    train_discriminator, AmplificationResult, Discriminator, SilhouetteMap,
};
use crate::error::{DeviceError, Result};
use crate::schedule::PulseCalibration;
use crate::transmon::MockTransmon;

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64).collect()
}

/// Grids and shot budgets for a full calibration pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPlan {
    pub spectroscopy_ghz: (f64, f64, usize),
    pub spectroscopy_amplitude: f64,
    /// Extra sweeps of the same width re-centred on the previous estimate. A Lorentzian fitted
    /// to the (non-Lorentzian) line is unbiased only on a grid symmetric about the peak.
    #[serde(default)]
    pub spectroscopy_refinements: usize,
    pub rabi_amplitudes: (f64, f64, usize),
    /// Shots per point for spectroscopy and Rabi sweeps; 0 for exact expectations.
    pub shots: u64,
    pub readout_durations_us: (f64, f64, usize),
    pub readout_amplitudes: (f64, f64, usize),
    pub silhouette_shots: usize,
    pub discriminator_shots: usize,
    pub amplification_n_max: u32,
    pub amplification_shots: u64,
}

impl Default for CalibrationPlan {
    fn default() -> Self {
        Self {
            spectroscopy_ghz: (4.85, 4.95, 81),
            spectroscopy_amplitude: 0.05,
            spectroscopy_refinements: 1,
            rabi_amplitudes: (0.0, 0.6, 61),
            shots: 1024,
            readout_durations_us: (2.0, 5.0, 13),
            readout_amplitudes: (0.4, 1.0, 21),
            silhouette_shots: 200,
            discriminator_shots: 20_000,
            amplification_n_max: 60,
            amplification_shots: 8192,
        }
    }
}

impl CalibrationPlan {
    pub fn spectroscopy_grid(&self) -> Vec<f64> {
        let (a, b, n) = self.spectroscopy_ghz;
        linspace(a, b, n)
    }

    pub fn rabi_grid(&self) -> Vec<f64> {
        let (a, b, n) = self.rabi_amplitudes;
        linspace(a, b, n)
    }

    pub fn readout_grids(&self) -> (Vec<f64>, Vec<f64>) {
        let (a, b, n) = self.readout_durations_us;
        let (c, d, m) = self.readout_amplitudes;
        (linspace(a, b, n), linspace(c, d, m))
    }
}

/// An estimate next to the hidden value it should recover.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub estimate: f64,
    pub truth: f64,
    pub error: f64,
}

impl Estimate {
    fn new(estimate: f64, truth: f64) -> Self {
        Self {
            estimate,
            truth,
            error: estimate - truth,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationReport {
    pub f12_ghz: Estimate,
    pub a_pi_01: Estimate,
    pub a_pi_12: Estimate,
    pub readout_duration_us: Estimate,
    pub readout_amplitude: Estimate,
    pub silhouette: f64,
    pub accuracies: [f64; 3],
    pub confusion: ConfusionMatrix,
    /// Classifier trained at the optimal readout setting.
    pub discriminator: Discriminator,
    pub under_rotation_rad: Estimate,
    pub decay_rate_khz: Estimate,
    pub fit_residuals: FitResiduals,
    /// Pulse parameters a gate compiler should use on this device.
    pub pulse_calibration: PulseCalibration,
    #[serde(skip)]
    pub heatmap: SilhouetteMap,
    #[serde(skip)]
    pub amplification: AmplificationResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResiduals {
    pub spectroscopy: f64,
    pub rabi_01: f64,
    pub rabi_12: f64,
    pub amplification: f64,
}

impl CalibrationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|source| DeviceError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Spectroscopy, both Rabi sweeps, readout optimisation, discriminator training and error
/// amplification, in that order.
pub fn calibrate(device: &MockTransmon, plan: &CalibrationPlan, seed: u64) -> Result<CalibrationReport> {
    device.validate()?;
    let mut grid = plan.spectroscopy_grid();
    let mut spec = rabi_spectroscopy_12(device, &grid, plan.spectroscopy_amplitude, plan.shots, derive_seed(seed, &[1]))?;
    for pass in 1..=plan.spectroscopy_refinements {
        let shift = spec.f12_ghz - (grid[0] + grid[grid.len() - 1]) / 2.0;
        grid.iter_mut().for_each(|f| *f += shift);
        spec = rabi_spectroscopy_12(
            device,
            &grid,
            plan.spectroscopy_amplitude,
            plan.shots,
            derive_seed(seed, &[1, pass as u64]),
        )?;
    }
    let grid = plan.rabi_grid();
    let r01 = rabi_amplitude(device, Subspace::S01, device.f01_ghz, &grid, plan.shots, derive_seed(seed, &[2]))?;
    let r12 = rabi_amplitude(device, Subspace::S12, spec.f12_ghz, &grid, plan.shots, derive_seed(seed, &[3]))?;
    let (durs, amps) = plan.readout_grids();
    let heatmap = silhouette_optimize(device, &durs, &amps, plan.silhouette_shots, derive_seed(seed, &[4]))?;
    let data = readout_experiment(
        device,
        heatmap.best_duration_us,
        heatmap.best_amplitude,
        plan.discriminator_shots,
        derive_seed(seed, &[5]),
    );
    let disc = train_discriminator(&data)?;
    let amp = error_amplification(
        device,
        plan.amplification_n_max,
        plan.amplification_shots,
        derive_seed(seed, &[6]),
    )?;
    let pulse_calibration = PulseCalibration {
        f01_ghz: device.f01_ghz,
        f12_ghz: spec.f12_ghz,
        a_pi_01: r01.a_pi,
        a_pi_12: r12.a_pi,
        td_dt: device.td_dt,
        sigma_dt: device.sigma_dt,
        dt_ns: device.dt_ns,
    };
    Ok(CalibrationReport {
        f12_ghz: Estimate::new(spec.f12_ghz, device.f12_ghz),
        a_pi_01: Estimate::new(r01.a_pi, device.effective_a_pi(Subspace::S01)),
        a_pi_12: Estimate::new(r12.a_pi, device.effective_a_pi(Subspace::S12)),
        readout_duration_us: Estimate::new(heatmap.best_duration_us, device.iq.ref_duration_us),
        readout_amplitude: Estimate::new(heatmap.best_amplitude, device.iq.ref_amplitude),
        silhouette: heatmap.best_score,
        accuracies: disc.accuracies,
        confusion: disc.confusion,
        discriminator: disc.clone(),
        under_rotation_rad: Estimate::new(amp.under_rotation, device.under_rotation_12),
        decay_rate_khz: Estimate::new(amp.decay_rate_khz, device.decay_rate_khz),
        fit_residuals: FitResiduals {
            spectroscopy: spec.fit.residual_norm,
            rabi_01: r01.fit.residual_norm,
            rabi_12: r12.fit.residual_norm,
            amplification: amp.residual_norm,
        },
        pulse_calibration,
        heatmap,
        amplification: amp,
    })
}
