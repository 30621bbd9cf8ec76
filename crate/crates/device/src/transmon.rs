use std::path::Path;

use num_complex::Complex64;
use nuqutrit_core::decomp::Subspace;
use nuqutrit_core::vm::derive_seed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{DeviceError, Result};

/// Synthetic readout model.
///
/// Cloud centroids spread about their mean in proportion to
/// `a (1 − e^{−d/τ}) / (1 + (a/a_s)⁴)` (signal grows with drive and integration time, then
/// saturates and is pushed out of the dispersive regime at high power), and the cloud width
/// scales as `e^{d/T} / √d` (shot-noise averaging against relaxation during the window). The
/// ratio has a unique interior maximum at `a = a_s 3^{−1/4}` and at the `d` solving
/// `e^{−d/τ}/(τ(1 − e^{−d/τ})) + 1/(2d) = 1/T`. `centroids` and `sigma` are the values at the
/// reference setting. This is a stand-in, not dispersive-readout physics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IqModel {
    pub centroids: [Complex64; 3],
    pub sigma: f64,
    pub ref_duration_us: f64,
    pub ref_amplitude: f64,
    pub rise_us: f64,
    pub dephasing_us: f64,
    pub saturation_amplitude: f64,
}

impl Default for IqModel {
    fn default() -> Self {
        // triangle solved so nearest-centroid accuracies at the optimum are (0.985, 0.943, 0.945)
        let shift = Complex64::new(-2.8, -1.0);
        Self {
            centroids: [
                shift,
                Complex64::new(4.667_959_706, 0.0) + shift,
                Complex64::new(3.647_713_010, 3.146_184_240) + shift,
            ],
            sigma: 1.0,
            ref_duration_us: 4.0,
            ref_amplitude: 0.91,
            rise_us: 1.0,
            dephasing_us: 6.944,
            saturation_amplitude: 1.197_63,
        }
    }
}

impl IqModel {
    fn separation(&self, duration_us: f64, amplitude: f64) -> f64 {
        let x = amplitude / self.saturation_amplitude;
        amplitude * (1.0 - (-duration_us / self.rise_us).exp()) / (1.0 + x.powi(4))
    }

    fn width(&self, duration_us: f64) -> f64 {
        (duration_us / self.dephasing_us).exp() / duration_us.sqrt()
    }

    /// Centroids and cloud width for a measurement pulse.
    pub fn clouds(&self, duration_us: f64, amplitude: f64) -> ([Complex64; 3], f64) {
        let mean = self.centroids.iter().sum::<Complex64>() / 3.0;
        let s = self.separation(duration_us, amplitude) / self.separation(self.ref_duration_us, self.ref_amplitude);
        let w = self.width(duration_us) / self.width(self.ref_duration_us);
        (self.centroids.map(|c| mean + (c - mean) * s), self.sigma * w)
    }

    /// Separation over width, relative to the reference setting.
    pub fn relative_snr(&self, duration_us: f64, amplitude: f64) -> f64 {
        let (_, sigma) = self.clouds(duration_us, amplitude);
        self.separation(duration_us, amplitude) / self.separation(self.ref_duration_us, self.ref_amplitude)
            * self.sigma
            / sigma
    }
}

/// Slow random walk applied between jobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftModel {
    /// Centroid step per job, in units of the cloud width.
    pub centroid_step: f64,
    /// Relative π-amplitude step per job.
    pub amplitude_step: f64,
}

impl Default for DriftModel {
    fn default() -> Self {
        Self {
            centroid_step: 0.05,
            amplitude_step: 1e-3,
        }
    }
}

/// Hidden ground truth of a simulated transmon driven as a qutrit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MockTransmon {
    pub f01_ghz: f64,
    pub f12_ghz: f64,
    pub dt_ns: f64,
    /// Amplitude of a π rotation in each subspace for the default Gaussian.
    pub a_pi_01: f64,
    pub a_pi_12: f64,
    pub td_dt: u32,
    pub sigma_dt: f64,
    /// Coherent shortfall of every {12} rotation per π, radians.
    pub under_rotation_12: f64,
    /// Depolarizing rate applied during every play, kHz.
    pub decay_rate_khz: f64,
    /// Relative drive strength on the transition farther from the carrier.
    #[serde(default)]
    pub spectator_coupling: f64,
    pub iq: IqModel,
    #[serde(default)]
    pub drift: Option<DriftModel>,
    // recorded for reference only
    pub t1_us: f64,
    pub t2_us: f64,
    pub readout_length_us: f64,
    pub ej_over_ec: f64,
}

impl Default for MockTransmon {
    fn default() -> Self {
        Self {
            f01_ghz: 5.237,
            f12_ghz: 4.897,
            dt_ns: 0.222,
            a_pi_01: 0.2,
            a_pi_12: 0.15,
            td_dt: 160,
            sigma_dt: 40.0,
            under_rotation_12: 0.008,
            decay_rate_khz: 73.125,
            spectator_coupling: 0.0,
            iq: IqModel::default(),
            drift: None,
            t1_us: 184.5,
            t2_us: 40.39,
            readout_length_us: 4.0,
            ej_over_ec: 33.65,
        }
    }
}

impl MockTransmon {
    /// The default device without gate errors.
    pub fn noiseless() -> Self {
        Self {
            under_rotation_12: 0.0,
            decay_rate_khz: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(DeviceError::Device(m.into()));
        let finite = [
            self.f01_ghz,
            self.f12_ghz,
            self.dt_ns,
            self.a_pi_01,
            self.a_pi_12,
            self.sigma_dt,
            self.under_rotation_12,
            self.decay_rate_khz,
            self.spectator_coupling,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return bad("device parameters must be finite");
        }
        if !(self.f12_ghz < self.f01_ghz) || self.f12_ghz <= 0.0 {
            return bad("need 0 < f12 < f01 (negative anharmonicity)");
        }
        for a in [self.a_pi_01, self.a_pi_12] {
            if !(a > 0.0 && a <= 1.0) {
                return bad("π amplitudes must lie in (0, 1]");
            }
        }
        if self.dt_ns <= 0.0 || self.td_dt == 0 || self.sigma_dt <= 0.0 {
            return bad("dt, Td and σ must be positive");
        }
        if self.decay_rate_khz < 0.0 || !(0.0..=1.0).contains(&self.spectator_coupling) {
            return bad("decay rate must be nonnegative and spectator coupling in [0, 1]");
        }
        if self.iq.sigma <= 0.0 || self.iq.rise_us <= 0.0 || self.iq.dephasing_us <= 0.0 {
            return bad("readout model widths must be positive");
        }
        Ok(())
    }

    pub fn transition_ghz(&self, s: Subspace) -> f64 {
        match s {
            Subspace::S01 => self.f01_ghz,
            Subspace::S12 => self.f12_ghz,
        }
    }

    /// Amplitude that actually produces a π rotation, including the coherent {12} error.
    pub fn effective_a_pi(&self, s: Subspace) -> f64 {
        match s {
            Subspace::S01 => self.a_pi_01,
            Subspace::S12 => self.a_pi_12 / (1.0 - self.under_rotation_12 / std::f64::consts::PI),
        }
    }

    pub fn gate_duration_ns(&self) -> f64 {
        self.td_dt as f64 * self.dt_ns
    }

    /// Device as seen by job `job` when drift is enabled; unchanged otherwise.
    pub fn for_job(&self, job: u64, seed: u64) -> MockTransmon {
        let Some(drift) = self.drift else {
            return self.clone();
        };
        let mut out = self.clone();
        let mut walk = [0.0f64; 8];
        for k in 1..=job {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0xd41f7, k]));
            for w in walk.iter_mut() {
                *w += Distribution::<f64>::sample(&StandardNormal, &mut rng);
            }
        }
        for (j, c) in out.iq.centroids.iter_mut().enumerate() {
            let step = drift.centroid_step * self.iq.sigma;
            *c += Complex64::new(walk[2 * j], walk[2 * j + 1]) * step;
        }
        out.a_pi_01 = (self.a_pi_01 * (1.0 + drift.amplitude_step * walk[6])).clamp(1e-6, 1.0);
        out.a_pi_12 = (self.a_pi_12 * (1.0 + drift.amplitude_step * walk[7])).clamp(1e-6, 1.0);
        out
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let d: Self = serde_json::from_str(s)?;
        d.validate()?;
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("device serialises")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|source| DeviceError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&s)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|source| DeviceError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}
