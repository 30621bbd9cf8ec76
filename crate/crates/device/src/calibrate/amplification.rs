use std::f64::consts::PI;

use nuqutrit_core::decomp::GivensGate;
use nuqutrit_core::optim::{multistart, LsqOptions};
use nuqutrit_core::vm::derive_seed;
use serde::Serialize;

use super::measure_population;
use crate::error::{DeviceError, Result};
use crate::pulse::pulse_probabilities;
use crate::schedule::PulseCalibration;
use crate::transmon::MockTransmon;

#[derive(Debug, Clone, Serialize)]
pub struct AmplificationResult {
    /// Coherent shortfall per π pulse, radians; positive means under-rotation.
    pub under_rotation: f64,
    pub under_rotation_stderr: f64,
    pub decay_rate_khz: f64,
    pub decay_rate_stderr_khz: f64,
    pub ns: Vec<u32>,
    /// `P(|1⟩)` after `R¹²(π)ⁿ R⁰¹(π)`.
    pub plain: Vec<f64>,
    /// `P(|1⟩)` after `R¹²(π)ⁿ R¹²(π/2) R⁰¹(π)`.
    pub prefixed: Vec<f64>,
    /// `[B_plain, B_prefixed, γ per pulse, ε]`.
    pub params: [f64; 4],
    pub residual_norm: f64,
}

/// Expected `P(|1⟩)` for `n` pulses of angle `π − ε` with per-pulse contraction `e^{−γ}`.
///
/// Without the prefix the coherent part is `(1 + (−1)ⁿ cos nε)/2`, which is blind to the sign of
/// `ε`; the `π/2` prefix turns it into `(1 + (−1)ⁿ sin((n + ½)ε))/2`. Depolarizing commutes with
/// the rotations, so populations relax toward `1/3` by `e^{−γn}` (the constant `B` absorbs the
/// preparation pulses).
pub fn amplification_model(params: &[f64], n: u32, prefixed: bool) -> f64 {
    let [b_plain, b_pre, gamma, eps] = [params[0], params[1], params[2], params[3]];
    let n_f = n as f64;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let (b, coh) = if prefixed {
        (b_pre, sign * ((n_f + 0.5) * eps).sin())
    } else {
        (b_plain, sign * (n_f * eps).cos())
    };
    1.0 / 3.0 + b * (-gamma * n_f).exp() * (1.0 / 6.0 + coh / 2.0)
}

/// Runs both pulse trains for `n = 0..=n_max` with the nominal `{12}` amplitude and fits them jointly.
pub fn error_amplification(device: &MockTransmon, n_max: u32, shots: u64, seed: u64) -> Result<AmplificationResult> {
    if n_max < 20 {
        return Err(DeviceError::Data("error amplification needs n_max ≥ 20".into()));
    }
    let cal = PulseCalibration::nominal(device);
    let pi01 = cal.play(&GivensGate::r01(0.0, PI));
    let pi12 = cal.play(&GivensGate::r12(0.0, PI));
    let half12 = cal.play(&GivensGate::r12(0.0, PI / 2.0));
    let ns: Vec<u32> = (0..=n_max).collect();
    let mut plain = Vec::with_capacity(ns.len());
    let mut prefixed = Vec::with_capacity(ns.len());
    for &n in &ns {
        for (variant, out) in [(0u64, &mut plain), (1, &mut prefixed)] {
            let mut plays = vec![pi01];
            if variant == 1 {
                plays.push(half12);
            }
            plays.extend(std::iter::repeat(pi12).take(n as usize));
            let p = pulse_probabilities(device, &crate::schedule::PulseSchedule::new(plays))?;
            out.push(measure_population(p, 1, shots, derive_seed(seed, &[variant, n as u64]))?);
        }
    }

    let residual = |x: &[f64]| -> Vec<f64> {
        ns.iter()
            .zip(&plain)
            .map(|(&n, y)| amplification_model(x, n, false) - y)
            .chain(ns.iter().zip(&prefixed).map(|(&n, y)| amplification_model(x, n, true) - y))
            .collect()
    };
    let mut starts = Vec::new();
    for eps in [-0.03, -0.01, -0.003, 0.0, 0.003, 0.01, 0.03] {
        for gamma in [0.0, 0.01, 0.05] {
            starts.push(vec![1.0, 1.0, gamma, eps]);
        }
    }
    let sol = multistart(&residual, None, &starts, &LsqOptions::default(), 0.0).map_err(|e| DeviceError::Fit {
        experiment: "error amplification",
        reason: e.to_string(),
        xs: ns.iter().map(|&n| n as f64).collect(),
        ys: plain.clone(),
    })?;
    let cov = sol.covariance();
    let se = |i: usize| cov.as_ref().map_or(f64::INFINITY, |c| c[(i, i)].max(0.0).sqrt());
    // γ = rate · Td
    let per_khz = device.gate_duration_ns() * 1e-9 * 1e3;
    Ok(AmplificationResult {
        under_rotation: sol.x[3],
        under_rotation_stderr: se(3),
        decay_rate_khz: sol.x[2] / per_khz,
        decay_rate_stderr_khz: se(2) / per_khz,
        ns,
        plain,
        prefixed,
        params: [sol.x[0], sol.x[1], sol.x[2], sol.x[3]],
        residual_norm: sol.sum_sq.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_matches_exact_pulse_trains() {
        let d = MockTransmon::default();
        let r = error_amplification(&d, 30, 0, 0).unwrap();
        assert!(r.residual_norm < 1e-6, "{}", r.residual_norm);
        assert!((r.under_rotation - 0.008).abs() < 1e-6);
        assert!((r.decay_rate_khz - 73.125).abs() < 1e-3);
    }
}
