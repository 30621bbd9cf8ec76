use num_complex::Complex;
use num_traits::Zero;

use super::params::OscillationParams;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix3;
use crate::scalar::{cis, Real};

/// Builds the Dirac mixing matrix in the standard parameterisation; row = flavor, column = mass state.
pub fn build_pmns<T: Real>(p: &OscillationParams<T>) -> ComplexMatrix3<T> {
    let (s12, c12) = p.theta12.sin_cos();
    let (s23, c23) = p.theta23.sin_cos();
    let (s13, c13) = p.theta13.sin_cos();
    let e = cis(p.delta);
    let r = |x: T| Complex::new(x, T::zero());
    ComplexMatrix3::from_rows([
        [r(c12 * c13), r(s12 * c13), e.conj() * s13],
        [
            r(-s12 * c23) - e * (c12 * s23 * s13),
            r(c12 * c23) - e * (s12 * s23 * s13),
            r(s23 * c13),
        ],
        [
            r(s12 * s23) - e * (c12 * c23 * s13),
            r(-c12 * s23) - e * (s12 * c23 * s13),
            r(c23 * c13),
        ],
    ])
}

/// The three factors whose product `R₂₃ · U₁₃(δ) · R₁₂` is the mixing matrix.
pub fn pmns_factors<T: Real>(p: &OscillationParams<T>) -> [ComplexMatrix3<T>; 3] {
    let (s12, c12) = p.theta12.sin_cos();
    let (s23, c23) = p.theta23.sin_cos();
    let (s13, c13) = p.theta13.sin_cos();
    let zero = T::zero();
    let one = T::one();
    let r23 = ComplexMatrix3::from_real([[one, zero, zero], [zero, c23, s23], [zero, -s23, c23]]);
    let mut u13 = ComplexMatrix3::from_real([[c13, zero, zero], [zero, one, zero], [zero, zero, c13]]);
    u13.m[0][2] = cis(-p.delta) * s13;
    u13.m[2][0] = -cis(p.delta) * s13;
    let r12 = ComplexMatrix3::from_real([[c12, s12, zero], [-s12, c12, zero], [zero, zero, one]]);
    [r23, u13, r12]
}

/// Flavor-basis Hamiltonian `(1/2E)[U diag(0, Δm²₂₁, Δm²₃₁) U† + diag(V_m, 0, 0)]` in eV²/GeV.
///
/// Multiplying by `2 · 1.26693 · 2 · L[km]` turns it into the dimensionless `H t`; use
/// [`hamiltonian_time`] for that factor.
pub fn build_hamiltonian<T: Real>(
    p: &OscillationParams<T>,
    vm: T,
    e_gev: T,
) -> Result<ComplexMatrix3<T>> {
    if !(e_gev > T::zero()) {
        return Err(Error::domain(format!("energy must be positive, got {e_gev}")));
    }
    let u = build_pmns(p);
    let masses = ComplexMatrix3::diagonal([
        Complex::zero(),
        Complex::new(p.dm2_21, T::zero()),
        Complex::new(p.dm2_31, T::zero()),
    ]);
    let mut h = u * masses * u.adjoint();
    h.m[0][0] += Complex::new(vm, T::zero());
    // keep it exactly Hermitian
    for i in 0..3 {
        h.m[i][i] = Complex::new(h.m[i][i].re, T::zero());
        for j in (i + 1)..3 {
            let avg = (h.m[i][j] + h.m[j][i].conj()) * T::lit(0.5);
            h.m[i][j] = avg;
            h.m[j][i] = avg.conj();
        }
    }
    Ok(h.scale(T::one() / (T::lit(2.0) * e_gev)))
}

/// Dimensionless propagation time for a Hamiltonian from [`build_hamiltonian`] over `l_km`.
pub fn hamiltonian_time<T: Real>(l_km: T) -> T {
    T::lit(2.0 * super::params::PHASE_RAD_PER_EV2_KM_PER_GEV) * l_km
}
