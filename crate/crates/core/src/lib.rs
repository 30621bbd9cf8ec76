//! Three-flavor neutrino oscillations computed analytically and on a simulated qutrit.
//!
//! The math is generic over [`scalar::Real`] (`f32` or `f64`); the aliases below fix it to `f64`,
//! which is what the optimisers, samplers and the command-line runner use.

pub mod decomp;
pub mod error;
pub mod matrix;
pub mod optim;
pub mod pmns;
pub mod scalar;
pub mod vm;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Matrix3 = matrix::ComplexMatrix3<f64>;
pub type Params = pmns::OscillationParams<f64>;
pub type Baseline = pmns::Baseline<f64>;
pub type Matter = pmns::MatterParams<f64>;
pub type Phases = pmns::EvolutionPhases<f64>;
pub type Gate = decomp::GivensGate<f64>;
pub type Sequence = decomp::GateSequence<f64>;
pub type Alphas = decomp::AlphaAngles<f64>;
pub type State = vm::QutritState<f64>;
pub type FrameModel = vm::PhaseAdvanceModel<f64>;
pub type ErrorModel = vm::GateErrorModel<f64>;
