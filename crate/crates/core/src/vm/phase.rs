//! Inter-subspace phase advances and their maximum-likelihood recovery.
//!
//! A single oscillator tracks the frame of whichever transition it is driving. While a {01}
//! pulse plays, the {12} frame slips by `2π(f01 − f12)·Td`, and a {12} pulse slips the {01}
//! frame by the opposite amount. Gate `k` therefore runs with its axis shifted by the slip
//! accumulated in its subspace so far; the first gate needs no correction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::state::{run_gates, QutritState};
use crate::decomp::{GateSequence, GivensGate, Subspace};
use crate::error::{Error, Result};
use crate::optim::{least_squares, LsqOptions, LsqSolution};
use crate::pmns::Flavor;
use crate::scalar::Real;

/// Frame slip per pulse and the two running frame registers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseAdvanceModel<T> {
    /// `2π(f12 − f01)·Td` reduced into `(−π, π]`.
    pub omega_off: T,
    pub acc01: T,
    pub acc12: T,
}

impl<T: Real> PhaseAdvanceModel<T> {
    pub fn new(omega_off: T) -> Self {
        Self {
            omega_off: omega_off.wrap_angle(),
            acc01: T::zero(),
            acc12: T::zero(),
        }
    }

    /// From transition frequencies in GHz and pulse length in ns.
    pub fn from_device(f01_ghz: T, f12_ghz: T, td_ns: T) -> Self {
        Self::new(T::TAU() * (f12_ghz - f01_ghz) * td_ns)
    }

    pub fn reset(&mut self) {
        self.acc01 = T::zero();
        self.acc12 = T::zero();
    }

    /// Frame offset the next gate in `subspace` will see.
    pub fn offset(&self, subspace: Subspace) -> T {
        match subspace {
            Subspace::S01 => self.acc01,
            Subspace::S12 => self.acc12,
        }
    }

    /// Advances the idle register after one pulse in `subspace`.
    pub fn advance(&mut self, subspace: Subspace) {
        match subspace {
            Subspace::S01 => self.acc12 = (self.acc12 - self.omega_off).wrap_angle(),
            Subspace::S12 => self.acc01 = (self.acc01 + self.omega_off).wrap_angle(),
        }
    }

    /// Axis offsets every gate of `gates` picks up, starting from reset registers.
    pub fn offsets(&self, gates: &[GivensGate<T>]) -> Vec<T> {
        let mut m = Self::new(self.omega_off);
        gates
            .iter()
            .map(|g| {
                let o = m.offset(g.subspace);
                m.advance(g.subspace);
                o
            })
            .collect()
    }
}

/// The sequence as executed by a device whose frames slip according to `model`.
pub fn apply_phase_advances<T: Real>(seq: &GateSequence<T>, model: &PhaseAdvanceModel<T>) -> GateSequence<T> {
    shift_all(seq, &model.offsets(&seq.gates), T::one())
}

/// Pre-corrects `seq` so that executing it under `model` realises the original gates.
pub fn compensate<T: Real>(seq: &GateSequence<T>, model: &PhaseAdvanceModel<T>) -> GateSequence<T> {
    shift_all(seq, &model.offsets(&seq.gates), -T::one())
}

fn shift_all<T: Real>(seq: &GateSequence<T>, offsets: &[T], sign: T) -> GateSequence<T> {
    let gates = seq
        .gates
        .iter()
        .zip(offsets)
        .map(|(g, &o)| g.shifted(sign * o))
        .collect();
    GateSequence {
        gates,
        scenario: seq.scenario,
        meta: seq.meta,
    }
}

/// Applies a phase vector `φ` (one entry per gate after the first) to a sequence.
pub fn with_phase_vector<T: Real>(seq: &GateSequence<T>, phases: &[T]) -> Result<GateSequence<T>> {
    if seq.is_empty() || phases.len() != seq.len() - 1 {
        return Err(Error::Invalid(format!(
            "expected {} phases for a {}-gate sequence, got {}",
            seq.len().saturating_sub(1),
            seq.len(),
            phases.len()
        )));
    }
    let mut offsets = vec![T::zero()];
    offsets.extend_from_slice(phases);
    Ok(shift_all(seq, &offsets, T::one()))
}

/// Model phase vector `φ` for `seq` (the offsets of gates 2..n).
pub fn phase_vector<T: Real>(seq: &GateSequence<T>, model: &PhaseAdvanceModel<T>) -> Vec<T> {
    model.offsets(&seq.gates).into_iter().skip(1).collect()
}

/// One measured distribution: the ideal (uncorrected) sequence, the prepared flavor and the
/// observed counts. Counts may be fractional, e.g. `N·p` for noiseless data.
#[derive(Debug, Clone)]
pub struct PhaseObservation {
    pub sequence: GateSequence<f64>,
    pub initial: Flavor,
    pub counts: [f64; 3],
}

/// The only exact degeneracy: moving every {12} axis by the same amount conjugates the
/// circuit with `diag(1, 1, e^{ix})`, which commutes with the {01} gates and only rephases
/// the basis states at both ends. Returned as a unit-free direction over `φ`; all zeros when
/// the first gate is itself a {12} gate, whose axis is not free.
pub fn gauge_direction(subspaces: &[Subspace]) -> Vec<f64> {
    if subspaces.first() == Some(&Subspace::S12) {
        return vec![0.0; subspaces.len() - 1];
    }
    subspaces
        .iter()
        .skip(1)
        .map(|s| if *s == Subspace::S12 { 1.0 } else { 0.0 })
        .collect()
}

/// Index into `φ` of the phase held fixed by the fit (the first {12} gate after gate 1).
pub fn gauge_index(subspaces: &[Subspace]) -> Option<usize> {
    gauge_direction(subspaces).iter().position(|&v| v != 0.0)
}

/// Moves `phases` along the gauge direction until the gauge entry equals `gauge_value`,
/// then wraps every entry into `(−π, π]`.
pub fn canonicalize_phases(subspaces: &[Subspace], phases: &[f64], gauge_value: f64) -> Vec<f64> {
    let dir = gauge_direction(subspaces);
    let shift = gauge_index(subspaces).map_or(0.0, |i| gauge_value - phases[i]);
    phases
        .iter()
        .zip(&dir)
        .map(|(p, d)| (p + d * shift).wrap_angle())
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct PhaseFitOptions {
    /// Value the gauge-fixed phase is held at.
    pub gauge_value: f64,
    /// Random starts in addition to `φ = 0`.
    pub extra_starts: usize,
    pub seed: u64,
}

impl Default for PhaseFitOptions {
    fn default() -> Self {
        Self {
            gauge_value: 0.0,
            extra_starts: 24,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseFit {
    /// Recovered `φ`, wrapped into `(−π, π]`, in the fixed gauge.
    pub phases: Vec<f64>,
    /// One-sigma uncertainties from the curvature of the log-likelihood; zero for the gauge entry.
    pub sigma: Vec<f64>,
    /// `Σ n ln p` at the optimum.
    pub log_likelihood: f64,
    /// Multinomial deviance, `2 Σ n ln(n / N p)`.
    pub deviance: f64,
    pub gauge_index: Option<usize>,
    pub gauge_direction: Vec<f64>,
}

fn model_probs(seq: &GateSequence<f64>, initial: Flavor, phases: &[f64]) -> [f64; 3] {
    let mut offsets = Vec::with_capacity(seq.len());
    offsets.push(0.0);
    offsets.extend_from_slice(phases);
    let gates: Vec<GivensGate<f64>> = seq
        .gates
        .iter()
        .zip(&offsets)
        .map(|(g, &o)| GivensGate { phi: g.phi + o, ..*g })
        .collect();
    run_gates(QutritState::flavor(initial), &gates).probabilities()
}

fn deviance_term(n: f64, np: f64) -> f64 {
    let np = np.max(1e-300);
    let t = if n > 0.0 { n * (n / np).ln() - n + np } else { np };
    t.max(0.0)
}

/// Multinomial log-likelihood `Σ n ln p` of `phases` (full vector, gauge included).
pub fn phase_log_likelihood(data: &[PhaseObservation], phases: &[f64]) -> f64 {
    data.iter()
        .map(|o| {
            let p = model_probs(&o.sequence, o.initial, phases);
            (0..3)
                .filter(|&i| o.counts[i] > 0.0)
                .map(|i| o.counts[i] * p[i].max(1e-300).ln())
                .sum::<f64>()
        })
        .sum()
}

/// Maximum-likelihood phase advances over a set of observations that share one gate template.
///
/// Residuals are signed deviance contributions, so least squares on them maximises the
/// multinomial likelihood exactly. The gauge phase is held at `opts.gauge_value`.
pub fn fit_phase_advances(data: &[PhaseObservation], opts: &PhaseFitOptions) -> Result<PhaseFit> {
    let first = data.first().ok_or_else(|| Error::Invalid("no observations".into()))?;
    let subspaces: Vec<Subspace> = first.sequence.gates.iter().map(|g| g.subspace).collect();
    if subspaces.len() < 2 {
        return Err(Error::Invalid("need at least two gates to have phase advances".into()));
    }
    for o in data {
        let s: Vec<Subspace> = o.sequence.gates.iter().map(|g| g.subspace).collect();
        if s != subspaces {
            return Err(Error::Invalid("observations use different gate templates".into()));
        }
        if o.counts.iter().any(|c| !(*c >= 0.0) || !c.is_finite()) {
            return Err(Error::Invalid("counts must be finite and nonnegative".into()));
        }
    }
    let k = subspaces.len() - 1;
    let gauge = gauge_index(&subspaces);
    let free: Vec<usize> = (0..k).filter(|i| Some(*i) != gauge).collect();
    if data.len() * 2 < free.len() {
        return Err(Error::Invalid("fewer independent outcomes than free phases".into()));
    }

    let expand = |x: &[f64]| -> Vec<f64> {
        let mut full = vec![opts.gauge_value; k];
        for (slot, &i) in free.iter().enumerate() {
            full[i] = x[slot];
        }
        full
    };
    let residual = |x: &[f64]| -> Vec<f64> {
        let full = expand(x);
        let mut r = Vec::with_capacity(data.len() * 3);
        for o in data {
            let n_tot: f64 = o.counts.iter().sum();
            let p = model_probs(&o.sequence, o.initial, &full);
            for i in 0..3 {
                let np = n_tot * p[i];
                let d = (2.0 * deviance_term(o.counts[i], np)).sqrt();
                r.push(if o.counts[i] >= np { d } else { -d });
            }
        }
        r
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts = vec![vec![0.0; free.len()]];
    for _ in 0..opts.extra_starts {
        starts.push((0..free.len()).map(|_| rng.gen_range(-3.1..3.1)).collect());
    }
    let lsq = LsqOptions {
        diff_step: 1e-7,
        ..LsqOptions::default()
    };
    let mut best: Option<LsqSolution> = None;
    for x0 in &starts {
        let Ok(sol) = least_squares(&residual, None, x0, &lsq) else {
            continue;
        };
        if best.as_ref().map_or(true, |b| sol.sum_sq < b.sum_sq) {
            best = Some(sol);
        }
    }
    let sol = best.ok_or_else(|| Error::numeric("phase fit diverged from every start", f64::INFINITY))?;
    if !sol.converged {
        return Err(Error::numeric("phase fit stagnated", sol.sum_sq));
    }
    let full = expand(&sol.x);
    let phases: Vec<f64> = full.iter().map(|p| p.wrap_angle()).collect();
    let mut sigma = vec![0.0; k];
    if let Some(cov) = sol.normal_inverse() {
        for (slot, &i) in free.iter().enumerate() {
            sigma[i] = cov[(slot, slot)].max(0.0).sqrt();
        }
    } else {
        for &i in &free {
            sigma[i] = f64::INFINITY;
        }
    }
    Ok(PhaseFit {
        log_likelihood: phase_log_likelihood(data, &phases),
        deviance: sol.sum_sq,
        phases,
        sigma,
        gauge_index: gauge,
        gauge_direction: gauge_direction(&subspaces),
    })
}
