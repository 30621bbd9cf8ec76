use std::f64::consts::PI;

use nuqutrit_core::decomp::{decompose, insert_evolution, Decomposition, GateSequence, GivensGate, Scenario};
use nuqutrit_core::pmns::{evolution_phases, exact_matter_probabilities, probability_table, Baseline, Flavor};
use nuqutrit_core::vm::{
    apply_sequence, compensate, derive_seed, mitigate, sample_counts_with, ConfusionMatrix, PhaseAdvanceModel,
};
use nuqutrit_device::pulse::sample_iq;
use nuqutrit_device::{calibrate, pulse_probabilities, CalibrationPlan, CalibrationReport, Measure, MockTransmon};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Mode, ScenarioConfig, SweepAxis};
use crate::error::{Result, RunError};

// seed-path tags
const POINT: u64 = 1;
const JOB_CALIBRATION: u64 = 2;
const DEVICE_CALIBRATION: u64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "reason", rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed(String),
}

impl Status {
    pub fn is_ok(&self) -> bool {
        matches!(self, Status::Ok)
    }
}

/// One grid point of one curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub curve: usize,
    pub point: usize,
    /// Hardware job the circuit was packed into.
    pub job: usize,
    pub vm_ev2: f64,
    pub delta_rad: f64,
    pub l_km: f64,
    pub e_gev: f64,
    pub l_over_e: f64,
    /// Final-flavor probabilities; the repeat mean in noisy modes.
    pub p: [f64; 3],
    /// Standard error of the repeat mean.
    pub err: [f64; 3],
    pub analytic: [f64; 3],
    /// Exact-diagonalisation probabilities, matter scenario only.
    pub exact: Option<[f64; 3]>,
    /// Raw classified counts summed over repeats.
    pub counts: Option<[u64; 3]>,
    pub shots: u64,
    pub status: Status,
}

impl Row {
    /// Value on the sweep axis.
    pub fn x(&self, axis: SweepAxis) -> f64 {
        match axis {
            SweepAxis::LOverE => self.l_over_e,
            SweepAxis::Energy => self.e_gev,
        }
    }
}

/// Readout calibration of one job: three preparation circuits and the matrix they give.
#[derive(Debug, Clone, Serialize)]
pub struct JobRecord {
    pub job: usize,
    /// `counts[j][i]`: prepared `j`, classified `i`.
    pub calibration_counts: Option<[[u64; 3]; 3]>,
    pub confusion: ConfusionMatrix,
}

#[derive(Debug, Clone)]
pub struct ResultTable {
    pub config: ScenarioConfig,
    pub rows: Vec<Row>,
    pub jobs: Vec<JobRecord>,
    /// Device calibration used by a pulse-mode run.
    pub calibration: Option<CalibrationReport>,
}

impl ResultTable {
    pub fn curve_rows(&self, curve: usize) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(move |r| r.curve == curve)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.status.is_ok()).count()
    }
}

/// Gates that take `|0⟩` to the level of `f`.
pub fn preparation(f: Flavor) -> Vec<GivensGate<f64>> {
    match f {
        Flavor::E => vec![],
        Flavor::Mu => vec![GivensGate::r01(0.0, PI)],
        Flavor::Tau => vec![GivensGate::r01(0.0, PI), GivensGate::r12(0.0, PI)],
    }
}

/// Default calibration before a pulse sweep: the standard plan with 8192-shot sweeps, so the
/// f12 estimate (and with it the frame compensation) is tight.
pub fn default_pulse_plan() -> CalibrationPlan {
    CalibrationPlan {
        shots: 8192,
        ..CalibrationPlan::default()
    }
}

struct PulseSetup {
    report: CalibrationReport,
    model: PhaseAdvanceModel<f64>,
    measure: Measure,
}

impl PulseSetup {
    fn new(device: &MockTransmon, plan: &CalibrationPlan, seed: u64) -> Result<Self> {
        let report = calibrate(device, plan, derive_seed(seed, &[DEVICE_CALIBRATION]))?;
        let cal = report.pulse_calibration;
        Ok(Self {
            model: PhaseAdvanceModel::from_device(cal.f01_ghz, cal.f12_ghz, cal.gate_duration_ns()),
            measure: Measure {
                duration_us: report.readout_duration_us.estimate,
                amplitude: report.readout_amplitude.estimate,
            },
            report,
        })
    }

    /// Frame-compensated pulse execution of `gates` from `|0⟩`.
    fn probabilities(&self, device: &MockTransmon, scenario: Scenario, gates: Vec<GivensGate<f64>>) -> Result<[f64; 3]> {
        let seq = GateSequence::new(scenario, gates);
        let sched = self.report.pulse_calibration.schedule(&compensate(&seq, &self.model).gates);
        Ok(pulse_probabilities(device, &sched)?)
    }

    /// `shots` single-shot readouts, each drawn in the IQ plane and classified.
    fn read(&self, device: &MockTransmon, probs: [f64; 3], shots: u64, seed: u64) -> Result<[u64; 3]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let levels = sample_counts_with(probs, shots, &mut rng)?;
        let mut out = [0u64; 3];
        for (level, &n) in levels.iter().enumerate() {
            for _ in 0..n {
                let z = sample_iq(device, self.measure, level, &mut rng);
                out[self.report.discriminator.classify(z)] += 1;
            }
        }
        Ok(out)
    }
}

struct Curve {
    vm: f64,
    delta: f64,
    params: nuqutrit_core::pmns::OscillationParams<f64>,
    decomposition: std::result::Result<Decomposition<f64>, String>,
}

fn baseline(cfg: &ScenarioConfig, x: f64) -> Result<Baseline<f64>> {
    Ok(match cfg.axis {
        SweepAxis::LOverE => Baseline::new(x * cfg.fixed, cfg.fixed)?,
        SweepAxis::Energy => Baseline::new(cfg.fixed, x)?,
    })
}

/// Runs every grid point of every curve in `cfg`.
///
/// Each point and repeat draws from its own seed derived from `(seed, point, repeat)`, so the
/// output does not depend on thread scheduling. Points that fail are kept with a failure
/// status and NaN probabilities.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let base = cfg.oscillation_params()?;
    let curves: Vec<Curve> = cfg
        .curves()
        .into_iter()
        .map(|(vm, delta)| {
            let params = base.with_delta(delta);
            Curve {
                vm,
                delta,
                params,
                decomposition: decompose(&params, cfg.scenario, vm).map_err(|e| e.to_string()),
            }
        })
        .collect();
    let xs = cfg.grid.values();
    let per_job = cfg.jobs.data_circuits();
    let total = curves.len() * xs.len();
    let n_jobs = total.div_ceil(per_job);
    let truth = cfg.confusion_matrix()?;
    let device = cfg.device.clone().unwrap_or_default();

    let pulse = match cfg.mode {
        Mode::Pulse => {
            let plan = cfg.calibration.clone().unwrap_or_else(default_pulse_plan);
            Some(PulseSetup::new(&device.for_job(0, cfg.seed), &plan, cfg.seed)?)
        }
        _ => None,
    };

    let jobs: Vec<JobRecord> = if cfg.mode.is_noisy() {
        (0..n_jobs)
            .into_par_iter()
            .map(|job| job_calibration(cfg, job, &truth, &device, pulse.as_ref()))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let rows = (0..total)
        .into_par_iter()
        .map(|g| {
            let (c, i) = (g / xs.len(), g % xs.len());
            let curve = &curves[c];
            let mut row = Row {
                curve: c,
                point: i,
                job: g / per_job,
                vm_ev2: curve.vm,
                delta_rad: curve.delta,
                l_km: f64::NAN,
                e_gev: f64::NAN,
                l_over_e: f64::NAN,
                p: [f64::NAN; 3],
                err: [f64::NAN; 3],
                analytic: [f64::NAN; 3],
                exact: None,
                counts: None,
                shots: 0,
                status: Status::Ok,
            };
            if let Err(e) = run_point(cfg, curve, xs[i], g, &jobs, &device, pulse.as_ref(), &mut row) {
                row.status = Status::Failed(e.to_string());
            }
            row
        })
        .collect();

    Ok(ResultTable {
        config: cfg.clone(),
        rows,
        jobs,
        calibration: pulse.map(|p| p.report),
    })
}

fn job_calibration(
    cfg: &ScenarioConfig,
    job: usize,
    truth: &ConfusionMatrix,
    device: &MockTransmon,
    pulse: Option<&PulseSetup>,
) -> Result<JobRecord> {
    if cfg.mode == Mode::Sampled && cfg.jobs.calibration_circuits == 0 {
        return Ok(JobRecord {
            job,
            calibration_counts: None,
            confusion: *truth,
        });
    }
    let shots = cfg.shots * cfg.repeats as u64;
    let job_device = device.for_job(job as u64, cfg.seed);
    let mut counts = [[0u64; 3]; 3];
    for (j, f) in Flavor::ALL.into_iter().enumerate() {
        let seed = derive_seed(cfg.seed, &[JOB_CALIBRATION, job as u64, j as u64]);
        counts[j] = match pulse {
            Some(p) => {
                let probs = p.probabilities(&job_device, cfg.scenario, preparation(f))?;
                p.read(&job_device, probs, shots, seed)?
            }
            None => {
                let mut basis = [0.0; 3];
                basis[j] = 1.0;
                truth.sample(basis, shots, seed)?.counts
            }
        };
    }
    Ok(JobRecord {
        job,
        calibration_counts: Some(counts),
        confusion: ConfusionMatrix::from_counts(&counts)?,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_point(
    cfg: &ScenarioConfig,
    curve: &Curve,
    x: f64,
    g: usize,
    jobs: &[JobRecord],
    device: &MockTransmon,
    pulse: Option<&PulseSetup>,
    row: &mut Row,
) -> Result<()> {
    let b = baseline(cfg, x)?;
    row.l_km = b.l_km();
    row.e_gev = b.e_gev();
    row.l_over_e = b.l_over_e();
    let init = cfg.init.index();
    row.analytic = probability_table(&curve.params, curve.vm, &b)?[init];
    if cfg.scenario == Scenario::Matter {
        row.exact = Some(exact_matter_probabilities(&curve.params, curve.vm, &b)?[init]);
    }
    if cfg.mode == Mode::Analytic {
        row.p = row.analytic;
        row.err = [0.0; 3];
        return Ok(());
    }
    let d = curve.decomposition.as_ref().map_err(|e| RunError::Config(e.clone()))?;
    let seq = insert_evolution(&d.r, &d.r_dag, evolution_phases(&d.params, &b), cfg.scenario);
    let ideal = apply_sequence(cfg.init, &seq).probabilities();
    if cfg.mode == Mode::Ideal {
        row.p = ideal;
        row.err = [0.0; 3];
        return Ok(());
    }

    let job = &jobs[row.job];
    let job_device;
    let probs = match pulse {
        Some(p) => {
            job_device = device.for_job(row.job as u64, cfg.seed);
            let mut gates = preparation(cfg.init);
            gates.extend(seq.gates.iter().copied());
            p.probabilities(&job_device, cfg.scenario, gates)?
        }
        None => {
            job_device = device.clone();
            ideal
        }
    };
    let reps = cfg.repeats as usize;
    let mut total = [0u64; 3];
    let mut estimates = Vec::with_capacity(reps);
    for r in 0..reps {
        let seed = derive_seed(cfg.seed, &[POINT, g as u64, r as u64]);
        let counts = match pulse {
            Some(p) => p.read(&job_device, probs, cfg.shots, seed)?,
            None => cfg.confusion_matrix()?.sample(probs, cfg.shots, seed)?.counts,
        };
        for k in 0..3 {
            total[k] += counts[k];
        }
        let freqs = counts.map(|n| n as f64 / cfg.shots as f64);
        estimates.push(if cfg.mitigate {
            mitigate(freqs, &job.confusion)?.probs
        } else {
            freqs
        });
    }
    let n = reps as f64;
    for k in 0..3 {
        let mean = estimates.iter().map(|e| e[k]).sum::<f64>() / n;
        let var = if reps > 1 {
            estimates.iter().map(|e| (e[k] - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        row.p[k] = mean;
        row.err[k] = (var / n).sqrt();
    }
    row.counts = Some(total);
    row.shots = cfg.shots * cfg.repeats as u64;
    Ok(())
}
