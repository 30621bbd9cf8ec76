use num_complex::Complex;

use crate::decomp::{GateSequence, GivensGate};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix3;
use crate::pmns::Flavor;
use crate::scalar::Real;

/// Coherent and incoherent per-gate errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateErrorModel<T> {
    /// Rotation shortfall per π of programmed angle, in radians: a π pulse rotates `π − ε`.
    pub under_rotation: T,
    /// Probability of replacing the state by the maximally mixed one after each gate.
    pub depolarizing: T,
}

impl<T: Real> GateErrorModel<T> {
    pub fn ideal() -> Self {
        Self {
            under_rotation: T::zero(),
            depolarizing: T::zero(),
        }
    }

    /// Depolarizing probability `q = 1 − exp(−rate · Td)` for `decay_khz` and `td_ns`.
    pub fn from_decay_rate(under_rotation: T, decay_khz: T, td_ns: T) -> Result<Self> {
        if decay_khz < T::zero() || td_ns < T::zero() || under_rotation.is_nan() {
            return Err(Error::domain("error rates must be nonnegative"));
        }
        let x = decay_khz * T::lit(1e3) * td_ns * T::lit(1e-9);
        Ok(Self {
            under_rotation,
            depolarizing: T::one() - (-x).exp(),
        })
    }

    /// Angle actually rotated for a programmed `theta`.
    pub fn realised_angle(&self, theta: T) -> T {
        theta * (T::one() - self.under_rotation / T::PI())
    }
}

/// `ρ ↦ G ρ G†`, then `ρ ↦ (1 − q) ρ + q I/3`, for every gate.
pub fn evolve_density<T: Real>(
    mut rho: ComplexMatrix3<T>,
    gates: &[GivensGate<T>],
    model: &GateErrorModel<T>,
) -> ComplexMatrix3<T> {
    let q = model.depolarizing;
    let mixed = ComplexMatrix3::identity().scale(T::one() / T::lit(3.0));
    for g in gates {
        let noisy = GivensGate {
            theta: model.realised_angle(g.theta),
            ..*g
        };
        let u = noisy.matrix();
        rho = u * rho * u.adjoint();
        if q > T::zero() {
            rho = rho.scale(T::one() - q) + mixed.scale(q);
        }
    }
    rho
}

/// Outcome probabilities of a noisy run of `seq` from the basis state of `initial`.
pub fn inject_gate_errors<T: Real>(
    seq: &GateSequence<T>,
    initial: Flavor,
    model: &GateErrorModel<T>,
) -> [T; 3] {
    let mut rho = ComplexMatrix3::zeros();
    rho.m[initial.index()][initial.index()] = Complex::new(T::one(), T::zero());
    let rho = evolve_density(rho, &seq.gates, model);
    [rho.m[0][0].re, rho.m[1][1].re, rho.m[2][2].re]
}
