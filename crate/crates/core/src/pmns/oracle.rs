//! Exact constant-density propagation by Hermitian eigendecomposition; independent of the
//! matter-effective approximation.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use super::params::{Baseline, Flavor, OscillationParams};
use super::mixing::{build_hamiltonian, hamiltonian_time};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix3;

/// Required eigen-residual `‖Hv − λv‖ / ‖H‖`.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-12;

fn to_na(m: &ComplexMatrix3<f64>) -> Matrix3<Complex64> {
    Matrix3::from_fn(|i, j| m.m[i][j])
}

/// Eigenvalues (eV²/GeV, ascending) and unit eigenvectors (columns) of the flavor Hamiltonian.
pub fn hamiltonian_eigensystem(
    p: &OscillationParams<f64>,
    vm: f64,
    e_gev: f64,
) -> Result<([f64; 3], Matrix3<Complex64>)> {
    let h = build_hamiltonian(p, vm, e_gev)?;
    let norm = h.max_abs().max(f64::MIN_POSITIVE);
    // work at unit scale so the residual bound is meaningful
    let m = to_na(&h.scale(1.0 / norm));
    let eig = m.symmetric_eigen();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vals = [0.0; 3];
    let mut vecs = Matrix3::<Complex64>::zeros();
    let mut worst: f64 = 0.0;
    for (k, &src) in order.iter().enumerate() {
        let lambda = eig.eigenvalues[src];
        let v: Vector3<Complex64> = eig.eigenvectors.column(src).into_owned();
        let r = (m * v - v * Complex64::new(lambda, 0.0)).norm();
        worst = worst.max(r);
        vals[k] = lambda * norm;
        vecs.set_column(k, &v);
    }
    if !(worst < EIGEN_RESIDUAL_TOL) {
        return Err(Error::numeric("hermitian eigensolver residual above tolerance", worst));
    }
    Ok((vals, vecs))
}

/// Exact flavor-basis propagator `V e^{-iΛt} V†` for constant matter potential `vm`.
pub fn exact_propagator(
    p: &OscillationParams<f64>,
    vm: f64,
    baseline: &Baseline<f64>,
) -> Result<ComplexMatrix3<f64>> {
    let (vals, vecs) = hamiltonian_eigensystem(p, vm, baseline.e_gev())?;
    let t = hamiltonian_time(baseline.l_km());
    let phases = Matrix3::from_diagonal(&Vector3::from_fn(|i, _| {
        Complex64::from_polar(1.0, -vals[i] * t)
    }));
    let s = vecs * phases * vecs.adjoint();
    let mut out = ComplexMatrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            out.m[i][j] = s[(i, j)];
        }
    }
    Ok(out)
}

/// All nine exact probabilities, indexed `[initial][final]`.
pub fn exact_matter_probabilities(
    p: &OscillationParams<f64>,
    vm: f64,
    baseline: &Baseline<f64>,
) -> Result<[[f64; 3]; 3]> {
    let s = exact_propagator(p, vm, baseline)?;
    let mut out = [[0.0; 3]; 3];
    for (a, row) in out.iter_mut().enumerate() {
        for (b, slot) in row.iter_mut().enumerate() {
            *slot = s.m[b][a].norm_sqr();
        }
    }
    Ok(out)
}

/// Exact `P(α → β)` for constant matter potential `vm`.
pub fn exact_matter_oracle(
    p: &OscillationParams<f64>,
    vm: f64,
    baseline: &Baseline<f64>,
    alpha: Flavor,
    beta: Flavor,
) -> Result<f64> {
    Ok(exact_matter_probabilities(p, vm, baseline)?[alpha.index()][beta.index()])
}
