//! Rotating-wave simulation of Gaussian drive plays on a three-level transmon.
//!
//! States live in the frame rotating with each transition (`|1⟩` at f01, `|2⟩` at f01 + f12),
//! so idle evolution is trivial. The drive carrier keeps one continuous phase across plays; a
//! play at frequency `f` therefore shifts the phase seen by transition `tr` by
//! `2π (f − f_tr) · duration`, which is where the qutrit's phase advances come from.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use nuqutrit_core::decomp::Subspace;
use nuqutrit_core::vm::QutritState;
use nuqutrit_core::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{DeviceError, Result};
use crate::schedule::{Measure, Play, PulseSchedule};
use crate::transmon::MockTransmon;

/// RK4 steps per `dt`.
pub const SUBSTEPS: u32 = 2;
/// Upper bound on RK4 steps per schedule.
pub const MAX_STEPS: u64 = 50_000_000;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Gaussian envelope at time `t` (units of dt) for a play of `duration` dt.
pub fn envelope(t: f64, duration: u32, sigma: f64) -> f64 {
    let x = t - duration as f64 / 2.0;
    (-x * x / (2.0 * sigma * sigma)).exp()
}

/// `∫ envelope` in ns, with the quadrature implied by the RK4 grid (Simpson on half steps).
pub fn envelope_area_ns(duration: u32, sigma: f64, dt_ns: f64) -> f64 {
    let h = 1.0 / SUBSTEPS as f64;
    let n = duration * SUBSTEPS;
    let mut s = 0.0;
    for k in 0..n {
        let t = k as f64 * h;
        s += envelope(t, duration, sigma) + 4.0 * envelope(t + h / 2.0, duration, sigma) + envelope(t + h, duration, sigma);
    }
    s * h / 6.0 * dt_ns
}

/// Carrier phase of each transition frame relative to the drive, accumulated over plays.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FrameState {
    pub offset01: f64,
    pub offset12: f64,
}

struct Drive {
    // coupling per unit amplitude, rad/ns
    g: [f64; 2],
    weight: [f64; 2],
    chi0: [f64; 2],
    // 2π(f − f_tr), rad/ns
    detune: [f64; 2],
}

fn drive_for(device: &MockTransmon, play: &Play, frame: &FrameState) -> Drive {
    let area = envelope_area_ns(device.td_dt, device.sigma_dt, device.dt_ns);
    let g01 = PI / (device.a_pi_01 * area);
    let g12 = PI / (device.effective_a_pi(Subspace::S12) * area);
    let f = play.frequency_ghz;
    let near01 = (f - device.f01_ghz).abs() <= (f - device.f12_ghz).abs();
    let s = device.spectator_coupling;
    Drive {
        g: [g01, g12],
        weight: if near01 { [1.0, s] } else { [s, 1.0] },
        chi0: [frame.offset01 + play.phase_rad, frame.offset12 + play.phase_rad],
        detune: [TAU * (f - device.f01_ghz), TAU * (f - device.f12_ghz)],
    }
}

fn deriv(u: &[[Complex64; 3]; 3], c01: Complex64, c12: Complex64) -> [[Complex64; 3]; 3] {
    // −i H U with H₁₀ = c01, H₂₁ = c12 and their conjugates above the diagonal
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for j in 0..3 {
        out[0][j] = -I * c01.conj() * u[1][j];
        out[1][j] = -I * (c01 * u[0][j] + c12.conj() * u[2][j]);
        out[2][j] = -I * c12 * u[1][j];
    }
    out
}

fn axpy(u: &[[Complex64; 3]; 3], k: &[[Complex64; 3]; 3], h: f64) -> [[Complex64; 3]; 3] {
    let mut out = *u;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] += k[i][j] * h;
        }
    }
    out
}

/// Unitary of one play; advances `frame`.
pub fn play_propagator(device: &MockTransmon, play: &Play, frame: &mut FrameState) -> Matrix3 {
    let d = drive_for(device, play, frame);
    let h_dt = 1.0 / SUBSTEPS as f64;
    let h = h_dt * device.dt_ns;
    let couplings = |t_dt: f64| -> (Complex64, Complex64) {
        let env = play.amplitude * envelope(t_dt, play.duration_dt, play.sigma_dt);
        let t_ns = t_dt * device.dt_ns;
        let c = |k: usize| {
            let omega = d.weight[k] * d.g[k] * env;
            Complex64::from_polar(omega / 2.0, d.chi0[k] + d.detune[k] * t_ns)
        };
        (c(0), c(1))
    };
    let mut u = Matrix3::identity().m;
    if play.amplitude != 0.0 {
        for k in 0..play.duration_dt * SUBSTEPS {
            let t = k as f64 * h_dt;
            let (a0, b0) = couplings(t);
            let (am, bm) = couplings(t + h_dt / 2.0);
            let (a1, b1) = couplings(t + h_dt);
            let k1 = deriv(&u, a0, b0);
            let k2 = deriv(&axpy(&u, &k1, h / 2.0), am, bm);
            let k3 = deriv(&axpy(&u, &k2, h / 2.0), am, bm);
            let k4 = deriv(&axpy(&u, &k3, h), a1, b1);
            for i in 0..3 {
                for j in 0..3 {
                    u[i][j] += (k1[i][j] + 2.0 * k2[i][j] + 2.0 * k3[i][j] + k4[i][j]) * (h / 6.0);
                }
            }
        }
    }
    let span = play.duration_dt as f64 * device.dt_ns;
    frame.offset01 = wrap(frame.offset01 + d.detune[0] * span);
    frame.offset12 = wrap(frame.offset12 + d.detune[1] * span);
    Matrix3 { m: u }
}

fn wrap(x: f64) -> f64 {
    x - TAU * (x / TAU).round()
}

fn check_steps(schedule: &PulseSchedule) -> Result<()> {
    let steps = schedule.duration_dt() * SUBSTEPS as u64;
    if steps > MAX_STEPS {
        return Err(DeviceError::StepOverflow {
            steps,
            limit: MAX_STEPS,
        });
    }
    Ok(())
}

/// Noiseless unitary of a whole schedule, starting from zero frame offsets.
pub fn propagator(device: &MockTransmon, schedule: &PulseSchedule) -> Result<Matrix3> {
    schedule.validate()?;
    check_steps(schedule)?;
    let mut frame = FrameState::default();
    Ok(schedule
        .plays
        .iter()
        .fold(Matrix3::identity(), |acc, p| play_propagator(device, p, &mut frame) * acc))
}

/// `ρ` after the schedule, with depolarizing noise `1 − exp(−2π · rate · duration)` per play.
pub fn evolve_density(device: &MockTransmon, schedule: &PulseSchedule, rho: Matrix3) -> Result<Matrix3> {
    schedule.validate()?;
    check_steps(schedule)?;
    let mixed = Matrix3::identity().scale(1.0 / 3.0);
    let mut frame = FrameState::default();
    let mut rho = rho;
    for p in &schedule.plays {
        let u = play_propagator(device, p, &mut frame);
        rho = u * rho * u.adjoint();
        let span_s = p.duration_dt as f64 * device.dt_ns * 1e-9;
        let q = 1.0 - (-device.decay_rate_khz * 1e3 * span_s).exp();
        if q > 0.0 {
            rho = rho.scale(1.0 - q) + mixed.scale(q);
        }
    }
    Ok(rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IqPoint {
    pub level: usize,
    pub iq: Complex64,
}

#[derive(Debug, Clone)]
pub struct PulseOutcome {
    pub rho: Matrix3,
    pub probabilities: [f64; 3],
    /// Pure pre-measurement state when the device has no incoherent error.
    pub state: Option<QutritState<f64>>,
    pub measurement: Option<IqPoint>,
}

/// Runs `schedule` from `|0⟩`; draws one measurement from `seed` if the schedule ends in one.
pub fn simulate_pulse(device: &MockTransmon, schedule: &PulseSchedule, seed: u64) -> Result<PulseOutcome> {
    let state = if device.decay_rate_khz == 0.0 {
        let u = propagator(device, schedule)?;
        Some(QutritState::new(u.column(0))?)
    } else {
        None
    };
    let mut rho0 = Matrix3::zeros();
    rho0.m[0][0] = Complex64::new(1.0, 0.0);
    let rho = evolve_density(device, schedule, rho0)?;
    let probabilities = populations(&rho);
    let measurement = schedule.measure.map(|m| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r: f64 = rng.gen();
        let level = if r < probabilities[0] {
            0
        } else if r < probabilities[0] + probabilities[1] {
            1
        } else {
            2
        };
        IqPoint {
            level,
            iq: sample_iq(device, m, level, &mut rng),
        }
    });
    Ok(PulseOutcome {
        rho,
        probabilities,
        state,
        measurement,
    })
}

/// Outcome probabilities of `schedule` from `|0⟩`, clipped onto the simplex.
pub fn pulse_probabilities(device: &MockTransmon, schedule: &PulseSchedule) -> Result<[f64; 3]> {
    let mut rho0 = Matrix3::zeros();
    rho0.m[0][0] = Complex64::new(1.0, 0.0);
    Ok(populations(&evolve_density(device, schedule, rho0)?))
}

fn populations(rho: &Matrix3) -> [f64; 3] {
    let p = [rho.m[0][0].re, rho.m[1][1].re, rho.m[2][2].re].map(|x| x.max(0.0));
    let s: f64 = p.iter().sum();
    p.map(|x| x / s)
}

/// One IQ sample for a qutrit found in `level`.
pub fn sample_iq<R: Rng + ?Sized>(device: &MockTransmon, m: Measure, level: usize, rng: &mut R) -> Complex64 {
    let (centroids, sigma) = device.iq.clouds(m.duration_us, m.amplitude);
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    centroids[level] + Complex64::new(re, im) * sigma
}
