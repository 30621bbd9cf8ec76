//! Givens-rotation compilation of the PMNS action and its time evolution.

mod alphas;
mod compile;
mod givens;
mod schedule;
mod sequence;
mod verify;

pub use alphas::{alpha_half_cosines, solve_alphas, AlphaAngles};
pub use compile::{compile_scenario, decompose, insert_evolution, Decomposition};
pub use givens::{givens_matrix, GivensGate, Subspace};
pub use schedule::{
    physical_pulses, schedule_duration, ScheduleReport, REPORTED_QUBIT_DURATION_DT,
    REPORTED_QUTRIT_DURATION_DT,
};
pub use sequence::{
    merge_adjacent, reconstruct, subspace_counts, GateRecord, GateSequence, GateSequenceFile, Scenario,
    SequenceMeta, SequenceMetaRecord, GATE_FILE_FORMAT,
};
pub use verify::{fit_decomposition, fit_givens_product, verify_decomposition, DecompositionFit, GivensFit};
