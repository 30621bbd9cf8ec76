use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use nuqutrit_core::decomp::Scenario;
use nuqutrit_core::pmns::{Flavor, OscillationParams, ParamsFile, PHASE_RAD_PER_EV2_KM_PER_GEV};
use nuqutrit_core::vm::ConfusionMatrix;
use nuqutrit_device::{CalibrationPlan, MockTransmon};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, Result, RunError};

/// How each grid point is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Closed-form probabilities.
    Analytic,
    /// Exact state-vector execution of the compiled gates.
    Ideal,
    /// Shot sampling through a readout confusion matrix, then mitigation.
    Sampled,
    /// Pulse-level execution on a calibrated mock transmon with IQ readout.
    Pulse,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::Ideal => "ideal",
            Mode::Sampled => "sampled",
            Mode::Pulse => "pulse",
        }
    }

    pub fn is_noisy(self) -> bool {
        matches!(self, Mode::Sampled | Mode::Pulse)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// L/E in km/GeV at fixed energy.
    LOverE,
    /// Energy in GeV at fixed baseline.
    Energy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

/// Circuits per hardware job and how many of them are reserved for readout calibration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobLayout {
    pub circuits_per_job: usize,
    pub calibration_circuits: usize,
}

impl Default for JobLayout {
    fn default() -> Self {
        Self {
            circuits_per_job: 300,
            calibration_circuits: 3,
        }
    }
}

impl JobLayout {
    pub fn data_circuits(&self) -> usize {
        self.circuits_per_job - self.calibration_circuits
    }
}

pub const DEFAULT_POINTS: usize = 297;

/// Everything needed to regenerate one figure's data, seed included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub init: Flavor,
    pub axis: SweepAxis,
    pub grid: Grid,
    /// Energy (GeV) for an L/E sweep, baseline (km) for an energy sweep.
    pub fixed: f64,
    pub vm_ev2: Vec<f64>,
    pub delta_rad: Vec<f64>,
    pub mode: Mode,
    pub shots: u64,
    pub repeats: u32,
    pub seed: u64,
    #[serde(default = "yes")]
    pub mitigate: bool,
    /// Readout confusion `a[i][j] = P(i | j)` used by sampled mode.
    #[serde(default = "reported_confusion")]
    pub confusion: [[f64; 3]; 3],
    #[serde(default)]
    pub params: ParamsFile,
    #[serde(default)]
    pub jobs: JobLayout,
    /// Device for pulse mode; the default mock transmon when absent.
    #[serde(default)]
    pub device: Option<MockTransmon>,
    /// Calibration run before a pulse-mode sweep.
    #[serde(default)]
    pub calibration: Option<CalibrationPlan>,
    /// Smallest per-curve R² accepted in noisy modes.
    #[serde(default = "default_min_r2")]
    pub min_r2: f64,
}

fn yes() -> bool {
    true
}

fn reported_confusion() -> [[f64; 3]; 3] {
    ConfusionMatrix::reported_default().a
}

fn default_min_r2() -> f64 {
    0.92
}

/// One full period of the solar phase `Δm²₂₁ L / 2E` in km/GeV.
pub fn solar_period_l_over_e(p: &OscillationParams<f64>) -> f64 {
    2.0 * PI / (PHASE_RAD_PER_EV2_KM_PER_GEV * p.dm2_21)
}

impl ScenarioConfig {
    fn base(scenario: Scenario) -> Self {
        let params = ParamsFile::default();
        let period = solar_period_l_over_e(&params.to_params().expect("default parameters are valid"));
        Self {
            scenario,
            init: Flavor::E,
            axis: SweepAxis::LOverE,
            grid: Grid {
                min: 0.0,
                max: period,
                points: DEFAULT_POINTS,
            },
            fixed: 1.0,
            vm_ev2: vec![0.0],
            delta_rad: vec![0.0],
            mode: Mode::Sampled,
            shots: 8192,
            repeats: 4,
            seed: 2023,
            mitigate: true,
            confusion: reported_confusion(),
            params,
            jobs: JobLayout::default(),
            device: None,
            calibration: None,
            min_r2: default_min_r2(),
        }
    }

    /// Vacuum oscillation over one solar period at 1 GeV.
    pub fn vacuum() -> Self {
        Self::base(Scenario::Vacuum)
    }

    /// Matter potentials 0, 1e-5, 1e-4 and 1e-3 eV² starting from a muon neutrino.
    pub fn matter() -> Self {
        Self {
            init: Flavor::Mu,
            vm_ev2: vec![0.0, 1e-5, 1e-4, 1e-3],
            ..Self::base(Scenario::Matter)
        }
    }

    /// Energy sweep at 295 km for δ = −π/2, 0, π/2, π starting from a muon neutrino.
    pub fn cp() -> Self {
        Self {
            init: Flavor::Mu,
            axis: SweepAxis::Energy,
            grid: Grid {
                min: 0.1,
                max: 2.0,
                points: DEFAULT_POINTS,
            },
            fixed: 295.0,
            delta_rad: vec![-PI / 2.0, 0.0, PI / 2.0, PI],
            shots: 4096,
            ..Self::base(Scenario::Cp)
        }
    }

    pub fn for_scenario(s: Scenario) -> Self {
        match s {
            Scenario::Vacuum => Self::vacuum(),
            Scenario::Matter => Self::matter(),
            Scenario::Cp => Self::cp(),
        }
    }

    pub fn oscillation_params(&self) -> Result<OscillationParams<f64>> {
        Ok(self.params.to_params()?)
    }

    pub fn confusion_matrix(&self) -> Result<ConfusionMatrix> {
        Ok(ConfusionMatrix::new(self.confusion)?)
    }

    pub fn curves(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for &vm in &self.vm_ev2 {
            for &d in &self.delta_rad {
                out.push((vm, d));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(RunError::Config(m));
        let g = self.grid;
        if g.points < 2 {
            return bad(format!("grid needs at least 2 points, got {}", g.points));
        }
        if !(g.min.is_finite() && g.max.is_finite() && g.min <= g.max) {
            return bad(format!("grid bounds [{}, {}] are not an interval", g.min, g.max));
        }
        match self.axis {
            SweepAxis::LOverE if g.min < 0.0 => return bad("L/E must be nonnegative".into()),
            SweepAxis::Energy if g.min <= 0.0 => return bad("energies must be positive".into()),
            _ => {}
        }
        if !(self.fixed.is_finite() && self.fixed > 0.0) {
            return bad(format!("fixed energy/baseline must be positive, got {}", self.fixed));
        }
        if self.vm_ev2.is_empty() || self.delta_rad.is_empty() {
            return bad("need at least one matter potential and one CP phase".into());
        }
        if self.vm_ev2.iter().chain(&self.delta_rad).any(|v| !v.is_finite()) {
            return bad("matter potentials and CP phases must be finite".into());
        }
        match self.scenario {
            Scenario::Vacuum | Scenario::Cp if self.vm_ev2.iter().any(|&v| v != 0.0) => {
                return bad(format!("the {} scenario runs without matter potential", self.scenario));
            }
            Scenario::Vacuum | Scenario::Matter if self.delta_rad.iter().any(|&d| d != 0.0) => {
                return bad(format!("the {} scenario needs delta = 0; use cp", self.scenario));
            }
            _ => {}
        }
        if self.mode.is_noisy() && (self.shots == 0 || self.repeats == 0) {
            return bad("noisy modes need shots > 0 and repeats > 0".into());
        }
        if self.jobs.circuits_per_job <= self.jobs.calibration_circuits {
            return bad("a job must hold more circuits than its calibration circuits".into());
        }
        if self.mode == Mode::Sampled && self.jobs.calibration_circuits != 0 && self.jobs.calibration_circuits != 3 {
            return bad("per-job readout calibration uses exactly 3 circuits (or 0 to use the matrix as given)".into());
        }
        if !(self.min_r2 <= 1.0) {
            return bad("min_r2 must not exceed 1".into());
        }
        self.oscillation_params()?;
        self.confusion_matrix()?;
        if let Some(d) = &self.device {
            d.validate()?;
        }
        Ok(())
    }

    /// Reads a config file, or the config embedded in a run manifest.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let json = |source| RunError::Json {
            path: path.to_path_buf(),
            source,
        };
        let value: serde_json::Value = serde_json::from_str(&text).map_err(json)?;
        let inner = match value.get("config") {
            Some(c) if value.get("scenario").is_none() => c.clone(),
            _ => value,
        };
        let cfg: Self = serde_json::from_value(inner).map_err(json)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}
