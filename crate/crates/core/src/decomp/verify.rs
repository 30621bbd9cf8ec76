use num_complex::Complex;

use super::alphas::AlphaAngles;
use super::givens::{GivensGate, Subspace};
use super::sequence::{reconstruct, GateSequence};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix3;
use crate::optim::{multistart, LsqOptions};
use crate::scalar::{cis, Real};

/// `‖offdiag(U · reconstruct(seq)†)‖∞`.
///
/// Zero means `U = X₀ · R` for a diagonal unitary `X₀`. Such an `X₀` only rephases flavor
/// amplitudes, so every probability of `R Λ R†` is unchanged.
pub fn verify_decomposition<T: Real>(u: &ComplexMatrix3<T>, seq: &GateSequence<T>) -> T {
    (*u * reconstruct(seq).adjoint()).max_offdiag()
}

/// Result of fitting `X₀ · G₁ G₂ ⋯ G_k` (fixed axes, operator order) to a unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct GivensFit {
    pub angles: Vec<f64>,
    /// Phases of the diagonal `X₀`.
    pub diag_phases: [f64; 3],
    /// `‖X₀ R − U‖_F` at the optimum.
    pub objective: f64,
}

impl GivensFit {
    pub fn gates(&self, axes: &[(Subspace, f64)]) -> Vec<GivensGate<f64>> {
        axes.iter()
            .zip(&self.angles)
            .map(|(&(s, phi), &theta)| GivensGate::new(s, phi, theta))
            .collect()
    }
}

fn product_of(axes: &[(Subspace, f64)], angles: &[f64]) -> ComplexMatrix3<f64> {
    axes.iter()
        .zip(angles)
        .fold(ComplexMatrix3::identity(), |acc, (&(s, phi), &theta)| {
            acc * GivensGate::new(s, phi, theta).matrix()
        })
}

/// Diagonal phases minimising `‖X₀ R − U‖_F` for fixed `R`.
fn best_diag(u: &ComplexMatrix3<f64>, r: &ComplexMatrix3<f64>) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let overlap: Complex<f64> = (0..3).map(|j| u.m[k][j] * r.m[k][j].conj()).sum();
        *o = overlap.arg();
    }
    out
}

/// Fits rotation angles for a fixed list of `(subspace, axis)` pairs, in operator order,
/// together with a diagonal phase matrix on the left.
///
/// Deterministic multistart over a grid of initial angles; stops once the objective is
/// below `1e-10`. Fails with the best residual when no start gets below `1e-8`.
pub fn fit_givens_product(u: &ComplexMatrix3<f64>, axes: &[(Subspace, f64)]) -> Result<GivensFit> {
    let k = axes.len();
    if k == 0 {
        return Err(Error::Invalid("empty gate template".into()));
    }
    let residual = |x: &[f64]| -> Vec<f64> {
        let r = product_of(axes, &x[..k]);
        let x0 = ComplexMatrix3::diagonal([cis(x[k]), cis(x[k + 1]), cis(x[k + 2])]);
        let d = x0 * r - *u;
        d.m.iter().flatten().flat_map(|z| [z.re, z.im]).collect()
    };
    let seeds = [-2.4, -0.8, 0.8, 2.4];
    let mut starts = Vec::new();
    let total = seeds.len().pow(k as u32);
    for idx in 0..total.min(4096) {
        let mut rem = idx;
        let mut x: Vec<f64> = (0..k)
            .map(|_| {
                let v = seeds[rem % seeds.len()];
                rem /= seeds.len();
                v
            })
            .collect();
        x.extend(best_diag(u, &product_of(axes, &x)));
        starts.push(x);
    }
    let sol = multistart(&residual, None, &starts, &LsqOptions::default(), 1e-20)?;
    let objective = sol.residual_norm();
    if objective > 1e-8 {
        return Err(Error::numeric("Givens fit did not converge", objective));
    }
    Ok(GivensFit {
        angles: sol.x[..k].to_vec(),
        diag_phases: [sol.x[k], sol.x[k + 1], sol.x[k + 2]],
        objective,
    })
}

/// Least-squares oracle for the α angles of a real mixing matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionFit {
    pub alphas: AlphaAngles<f64>,
    /// θ₁₂ read off the first row, `atan2(|U₀₁|, |U₀₀|)`.
    pub theta12: f64,
    pub diag_phases: [f64; 3],
    pub objective: f64,
}

/// Fits `X₀ · R⁰¹_{π/2}(a₁) R¹²_{3π/2}(a₂) R⁰¹_{π/2}(b)` to `U` and reports `α₃ = b + 2θ₁₂`.
///
/// The two trailing {01} gates of the closed form share an axis, so only their sum `b` is
/// identifiable. Angle signs and 2π shifts are gauge: compare `|cos(αᵢ/2)|`.
pub fn fit_decomposition(u: &ComplexMatrix3<f64>) -> Result<DecompositionFit> {
    let hp = std::f64::consts::FRAC_PI_2;
    let axes = [(Subspace::S01, hp), (Subspace::S12, 3.0 * hp), (Subspace::S01, hp)];
    let fit = fit_givens_product(u, &axes)?;
    let theta12 = u.m[0][1].norm().atan2(u.m[0][0].norm());
    let alphas = AlphaAngles::from_values(fit.angles[0], fit.angles[1], fit.angles[2] + 2.0 * theta12);
    Ok(DecompositionFit {
        alphas,
        theta12,
        diag_phases: fit.diag_phases,
        objective: fit.objective,
    })
}
