//! Pulse-level mock of a transmon driven as a qutrit, and the experiments that calibrate it.

pub mod calibrate;
pub mod error;
pub mod fit;
pub mod pulse;
pub mod schedule;
pub mod transmon;

pub use calibrate::{
    calibrate, error_amplification, rabi_amplitude, rabi_spectroscopy_12, readout_experiment, silhouette_optimize,
    train_discriminator, CalibrationPlan, CalibrationReport, Discriminator,
};
pub use error::{DeviceError, Result};
pub use fit::{curve_fit, CurveFit, CurveModel};
pub use pulse::{propagator, pulse_probabilities, simulate_pulse, PulseOutcome};
pub use schedule::{Measure, Play, PulseCalibration, PulseSchedule};
pub use transmon::{DriftModel, IqModel, MockTransmon};
