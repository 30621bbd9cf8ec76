use num_complex::Complex;
use num_traits::{One, Zero};

use crate::decomp::{GateSequence, GivensGate};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix3, Vector3};
use crate::pmns::Flavor;
use crate::scalar::Real;

/// Three-level pure state `c₀|0⟩ + c₁|1⟩ + c₂|2⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QutritState<T> {
    pub amplitudes: Vector3<T>,
}

impl<T: Real> QutritState<T> {
    pub fn basis(level: usize) -> Self {
        assert!(level < 3, "qutrit level {level} out of range");
        let mut amplitudes = [Complex::zero(); 3];
        amplitudes[level] = Complex::one();
        Self { amplitudes }
    }

    /// Basis state encoding a flavor: e → |0⟩, μ → |1⟩, τ → |2⟩.
    pub fn flavor(f: Flavor) -> Self {
        Self::basis(f.index())
    }

    /// Normalises the given amplitudes; rejects the zero vector.
    pub fn new(amplitudes: Vector3<T>) -> Result<Self> {
        let n = amplitudes.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::Invalid("state amplitudes must have finite nonzero norm".into()));
        }
        Ok(Self {
            amplitudes: amplitudes.map(|z| z / n),
        })
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn apply_matrix(&mut self, m: &ComplexMatrix3<T>) {
        self.amplitudes = m.apply(&self.amplitudes);
    }

    /// Applies one Givens rotation touching only its two levels.
    pub fn apply_gate(&mut self, g: &GivensGate<T>) {
        let (m, n) = g.subspace.levels();
        let half = g.theta * T::lit(0.5);
        let (s, c) = half.sin_cos();
        let minus_i_s = Complex::new(T::zero(), -s);
        let e = Complex::new(g.phi.cos(), g.phi.sin());
        let (a, b) = (self.amplitudes[m], self.amplitudes[n]);
        self.amplitudes[m] = a * c + minus_i_s * e.conj() * b;
        self.amplitudes[n] = minus_i_s * e * a + b * c;
    }

    pub fn probabilities(&self) -> [T; 3] {
        probabilities(self)
    }
}

/// `pᵢ = |cᵢ|²`.
pub fn probabilities<T: Real>(state: &QutritState<T>) -> [T; 3] {
    state.amplitudes.map(|z| z.norm_sqr())
}

/// Runs `seq` (application order) on the basis state of `initial`.
pub fn apply_sequence<T: Real>(initial: Flavor, seq: &GateSequence<T>) -> QutritState<T> {
    run_gates(QutritState::flavor(initial), &seq.gates)
}

pub fn run_gates<T: Real>(mut state: QutritState<T>, gates: &[GivensGate<T>]) -> QutritState<T> {
    for g in gates {
        state.apply_gate(g);
    }
    state
}

/// Final-flavor probabilities for all three initial flavors, indexed `[initial][final]`.
pub fn probability_triples<T: Real>(seq: &GateSequence<T>) -> [[T; 3]; 3] {
    Flavor::ALL.map(|f| apply_sequence(f, seq).probabilities())
}
