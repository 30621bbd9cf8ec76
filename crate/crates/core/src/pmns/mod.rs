//! Analytic three-flavor oscillation engine.

mod evolution;
mod matter;
mod mixing;
mod oracle;
mod params;

pub use evolution::{
    evolution_operator, evolution_phases, oscillation_probability, probability_table,
    propagation_params, EvolutionPhases,
};
pub use matter::{matter_effective_params, MatterParams, MAX_VALIDATED_VM};
pub use mixing::{build_hamiltonian, build_pmns, hamiltonian_time, pmns_factors};
pub use oracle::{
    exact_matter_oracle, exact_matter_probabilities, exact_propagator, hamiltonian_eigensystem,
    EIGEN_RESIDUAL_TOL,
};
pub use params::{Baseline, Flavor, OscillationParams, ParamsFile, PHASE_RAD_PER_EV2_KM_PER_GEV};
