use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::matrix::ComplexMatrix3;
use crate::scalar::{cis, Real};

/// Two-level subspace a Givens rotation acts in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subspace {
    #[serde(rename = "01")]
    S01,
    #[serde(rename = "12")]
    S12,
}

impl Subspace {
    /// Level indices `(m, n)`.
    pub fn levels(self) -> (usize, usize) {
        match self {
            Subspace::S01 => (0, 1),
            Subspace::S12 => (1, 2),
        }
    }

    pub fn other(self) -> Subspace {
        match self {
            Subspace::S01 => Subspace::S12,
            Subspace::S12 => Subspace::S01,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Subspace::S01 => "01",
            Subspace::S12 => "12",
        }
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// `R^{mn}_φ(θ) = exp[-iθ/2 (σx cos φ + σy sin φ)]` on levels `{m, n}`.
///
/// Construction reduces `φ` into `(-π, π]` and `θ` into `(-2π, 2π]` (period 4π), so the matrix
/// is unchanged by normalisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GivensGate<T> {
    pub subspace: Subspace,
    pub phi: T,
    pub theta: T,
}

pub(crate) fn wrap_theta<T: Real>(theta: T) -> T {
    let period = T::lit(2.0) * T::TAU();
    let mut t = theta % period;
    if t <= -T::TAU() {
        t += period;
    } else if t > T::TAU() {
        t -= period;
    }
    t
}

impl<T: Real> GivensGate<T> {
    pub fn new(subspace: Subspace, phi: T, theta: T) -> Self {
        Self {
            subspace,
            phi: phi.wrap_angle(),
            theta: wrap_theta(theta),
        }
    }

    pub fn r01(phi: T, theta: T) -> Self {
        Self::new(Subspace::S01, phi, theta)
    }

    pub fn r12(phi: T, theta: T) -> Self {
        Self::new(Subspace::S12, phi, theta)
    }

    /// Same gate with its axis moved by `dphi`.
    pub fn shifted(&self, dphi: T) -> Self {
        Self::new(self.subspace, self.phi + dphi, self.theta)
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.subspace, self.phi, -self.theta)
    }

    pub fn matrix(&self) -> ComplexMatrix3<T> {
        givens_matrix(self)
    }

    pub fn cast<U: Real>(&self) -> GivensGate<U> {
        GivensGate::new(
            self.subspace,
            U::lit(self.phi.to_f64_lossy()),
            U::lit(self.theta.to_f64_lossy()),
        )
    }
}

/// Explicit matrix of a Givens rotation; identity outside the gate's subspace.
pub fn givens_matrix<T: Real>(g: &GivensGate<T>) -> ComplexMatrix3<T> {
    let (m, n) = g.subspace.levels();
    let half = g.theta * T::lit(0.5);
    let (s, c) = half.sin_cos();
    let minus_i_s = Complex::new(T::zero(), -s);
    let mut out = ComplexMatrix3::identity();
    out.m[m][m] = Complex::new(c, T::zero());
    out.m[n][n] = Complex::new(c, T::zero());
    out.m[m][n] = minus_i_s * cis(-g.phi);
    out.m[n][m] = minus_i_s * cis(g.phi);
    out
}
