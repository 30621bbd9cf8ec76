//! Qutrit state-vector machine with readout confusion, gate errors and frame-slip modelling.

mod confusion;
mod density;
mod phase;
mod reported;
mod sampling;
mod state;

pub use confusion::{apply_confusion, confuse_counts, mitigate, ConfusionMatrix, Mitigated, ILL_CONDITIONED};
pub use density::{evolve_density, inject_gate_errors, GateErrorModel};
pub use phase::{
    apply_phase_advances, canonicalize_phases, compensate, fit_phase_advances, gauge_direction, gauge_index,
    phase_log_likelihood, phase_vector, with_phase_vector, PhaseAdvanceModel, PhaseFit, PhaseFitOptions,
    PhaseObservation,
};
pub use reported::{parse_phase_cell, ReportedPhases, REPORTED_PHASES};
pub use sampling::{derive_seed, sample_counts, sample_counts_with, validate_simplex, ShotCounts};
pub use state::{apply_sequence, probabilities, probability_triples, run_gates, QutritState};
