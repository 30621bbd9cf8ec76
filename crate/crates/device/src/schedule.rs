use std::f64::consts::PI;

use nuqutrit_core::decomp::{GivensGate, Subspace};
use serde::{Deserialize, Serialize};

use crate::error::{DeviceError, Result};
use crate::transmon::MockTransmon;

/// One Gaussian play on the drive channel. The carrier phase is continuous across plays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Play {
    pub frequency_ghz: f64,
    /// Axis offset added to the carrier phase for this play.
    pub phase_rad: f64,
    /// Peak amplitude Ω₀; negative values flip the rotation sense.
    pub amplitude: f64,
    pub duration_dt: u32,
    pub sigma_dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    pub duration_us: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PulseSchedule {
    pub plays: Vec<Play>,
    pub measure: Option<Measure>,
}

impl PulseSchedule {
    pub fn new(plays: Vec<Play>) -> Self {
        Self { plays, measure: None }
    }

    pub fn measured(mut self, m: Measure) -> Self {
        self.measure = Some(m);
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (k, p) in self.plays.iter().enumerate() {
            let bad = |m: &str| Err(DeviceError::Schedule(format!("play {k}: {m}")));
            if p.duration_dt == 0 {
                return bad("duration must be a positive number of dt");
            }
            if !(p.sigma_dt > 0.0) || !p.sigma_dt.is_finite() {
                return bad("σ must be positive");
            }
            if !p.frequency_ghz.is_finite() || p.frequency_ghz <= 0.0 {
                return bad("carrier frequency must be positive");
            }
            if !p.phase_rad.is_finite() || !p.amplitude.is_finite() || p.amplitude.abs() > 1.0 {
                return bad("amplitude must lie in [-1, 1]");
            }
        }
        if let Some(m) = self.measure {
            if !(m.duration_us > 0.0) || !(0.0..=1.0).contains(&m.amplitude) {
                return Err(DeviceError::Schedule("measurement needs duration > 0 and amplitude in [0, 1]".into()));
            }
        }
        Ok(())
    }

    pub fn duration_dt(&self) -> u64 {
        self.plays.iter().map(|p| p.duration_dt as u64).sum()
    }
}

/// What a gate compiler knows about the device after calibration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseCalibration {
    pub f01_ghz: f64,
    pub f12_ghz: f64,
    pub a_pi_01: f64,
    pub a_pi_12: f64,
    pub td_dt: u32,
    pub sigma_dt: f64,
    pub dt_ns: f64,
}

impl PulseCalibration {
    /// Calibration equal to the hidden truth.
    pub fn exact(device: &MockTransmon) -> Self {
        Self {
            f01_ghz: device.f01_ghz,
            f12_ghz: device.f12_ghz,
            a_pi_01: device.effective_a_pi(Subspace::S01),
            a_pi_12: device.effective_a_pi(Subspace::S12),
            td_dt: device.td_dt,
            sigma_dt: device.sigma_dt,
            dt_ns: device.dt_ns,
        }
    }

    /// Factory settings: exact {01} values, nominal {12} amplitude (carries the coherent error).
    pub fn nominal(device: &MockTransmon) -> Self {
        Self {
            a_pi_12: device.a_pi_12,
            ..Self::exact(device)
        }
    }

    pub fn frequency(&self, s: Subspace) -> f64 {
        match s {
            Subspace::S01 => self.f01_ghz,
            Subspace::S12 => self.f12_ghz,
        }
    }

    pub fn a_pi(&self, s: Subspace) -> f64 {
        match s {
            Subspace::S01 => self.a_pi_01,
            Subspace::S12 => self.a_pi_12,
        }
    }

    pub fn gate_duration_ns(&self) -> f64 {
        self.td_dt as f64 * self.dt_ns
    }

    /// `A(θ) = θ/π · A_π` at the subspace frequency with axis phase `φ`.
    pub fn play(&self, g: &GivensGate<f64>) -> Play {
        Play {
            frequency_ghz: self.frequency(g.subspace),
            phase_rad: g.phi,
            amplitude: g.theta / PI * self.a_pi(g.subspace),
            duration_dt: self.td_dt,
            sigma_dt: self.sigma_dt,
        }
    }

    /// Zero-amplitude play at the subspace frequency, `Td` long.
    pub fn idle(&self, s: Subspace) -> Play {
        Play {
            frequency_ghz: self.frequency(s),
            phase_rad: 0.0,
            amplitude: 0.0,
            duration_dt: self.td_dt,
            sigma_dt: self.sigma_dt,
        }
    }

    pub fn schedule(&self, gates: &[GivensGate<f64>]) -> PulseSchedule {
        PulseSchedule::new(gates.iter().map(|g| self.play(g)).collect())
    }
}
