//! Thin wrapper over the `levenberg-marquardt` solver for closure-defined residuals.
//!
//! Jacobians come from central differences unless the caller supplies one.

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt};
use nalgebra::{DMatrix, DVector, Dyn, Owned};

use crate::error::{Error, Result};

type ResidualFn<'a> = dyn Fn(&[f64]) -> Vec<f64> + 'a;
type JacobianFn<'a> = dyn Fn(&[f64]) -> DMatrix<f64> + 'a;

#[derive(Debug, Clone, Copy)]
pub struct LsqOptions {
    pub ftol: f64,
    pub xtol: f64,
    pub gtol: f64,
    /// Maximum evaluations as a multiple of `(n + 1)`.
    pub patience: usize,
    /// Relative step for central differences.
    pub diff_step: f64,
}

impl Default for LsqOptions {
    fn default() -> Self {
        Self {
            ftol: 1e-15,
            xtol: 1e-15,
            gtol: 1e-15,
            patience: 200,
            diff_step: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LsqSolution {
    pub x: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `Σ r²`.
    pub sum_sq: f64,
    pub jacobian: DMatrix<f64>,
    pub evaluations: usize,
    pub converged: bool,
}

impl LsqSolution {
    pub fn residual_norm(&self) -> f64 {
        self.sum_sq.sqrt()
    }

    /// `(JᵀJ)⁻¹`, or `None` when the normal matrix is singular to working precision.
    pub fn normal_inverse(&self) -> Option<DMatrix<f64>> {
        let jtj = self.jacobian.transpose() * &self.jacobian;
        let svd = jtj.clone().svd(true, true);
        let smax = svd.singular_values.max();
        if !(smax > 0.0) {
            return None;
        }
        let smin = svd.singular_values.min();
        if smin <= smax * 1e-12 {
            return None;
        }
        jtj.try_inverse()
    }

    /// Parameter covariance `s² (JᵀJ)⁻¹` with `s² = Σr² / (m − n)`.
    pub fn covariance(&self) -> Option<DMatrix<f64>> {
        let m = self.residuals.len();
        let n = self.x.len();
        if m <= n {
            return None;
        }
        let s2 = self.sum_sq / (m - n) as f64;
        self.normal_inverse().map(|c| c * s2)
    }
}

struct Problem<'a> {
    f: &'a ResidualFn<'a>,
    jac: Option<&'a JacobianFn<'a>>,
    x: DVector<f64>,
    diff_step: f64,
}

pub(crate) fn numeric_jacobian(f: &ResidualFn<'_>, x: &[f64], rel_step: f64) -> DMatrix<f64> {
    let r0 = f(x);
    let mut jac = DMatrix::zeros(r0.len(), x.len());
    let mut xp = x.to_vec();
    for j in 0..x.len() {
        let h = rel_step * x[j].abs().max(1.0);
        xp[j] = x[j] + h;
        let rp = f(&xp);
        xp[j] = x[j] - h;
        let rm = f(&xp);
        xp[j] = x[j];
        for i in 0..r0.len() {
            jac[(i, j)] = (rp[i] - rm[i]) / (2.0 * h);
        }
    }
    jac
}

impl LeastSquaresProblem<f64, Dyn, Dyn> for Problem<'_> {
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, Dyn>;
    type ParameterStorage = Owned<f64, Dyn>;

    fn set_params(&mut self, x: &DVector<f64>) {
        self.x.copy_from(x);
    }

    fn params(&self) -> DVector<f64> {
        self.x.clone()
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        let r = (self.f)(self.x.as_slice());
        if r.iter().all(|v| v.is_finite()) {
            Some(DVector::from_vec(r))
        } else {
            None
        }
    }

    fn jacobian(&self) -> Option<DMatrix<f64>> {
        let j = match self.jac {
            Some(jf) => jf(self.x.as_slice()),
            None => numeric_jacobian(self.f, self.x.as_slice(), self.diff_step),
        };
        if j.iter().all(|v| v.is_finite()) {
            Some(j)
        } else {
            None
        }
    }
}

/// Minimises `Σ f(x)²` from `x0`.
pub fn least_squares(
    f: &ResidualFn<'_>,
    jac: Option<&JacobianFn<'_>>,
    x0: &[f64],
    opts: &LsqOptions,
) -> Result<LsqSolution> {
    if x0.is_empty() {
        return Err(Error::Invalid("no parameters to fit".into()));
    }
    let problem = Problem {
        f,
        jac,
        x: DVector::from_column_slice(x0),
        diff_step: opts.diff_step,
    };
    let solver = LevenbergMarquardt::new()
        .with_ftol(opts.ftol)
        .with_xtol(opts.xtol)
        .with_gtol(opts.gtol)
        .with_patience(opts.patience);
    let (problem, report) = solver.minimize(problem);
    if report.termination.was_usage_issue()
        && !matches!(
            report.termination,
            levenberg_marquardt::TerminationReason::NoImprovementPossible(_)
        )
    {
        return Err(Error::Invalid(format!("least squares: {:?}", report.termination)));
    }
    let x = problem.x.as_slice().to_vec();
    let residuals = f(&x);
    if residuals.iter().any(|v| !v.is_finite()) {
        return Err(Error::numeric("least squares diverged", f64::INFINITY));
    }
    let sum_sq = residuals.iter().map(|r| r * r).sum();
    let jacobian = match jac {
        Some(jf) => jf(&x),
        None => numeric_jacobian(f, &x, opts.diff_step),
    };
    let converged = report.termination.was_successful()
        || matches!(
            report.termination,
            levenberg_marquardt::TerminationReason::NoImprovementPossible(_)
        );
    Ok(LsqSolution {
        x,
        residuals,
        sum_sq,
        jacobian,
        evaluations: report.number_of_evaluations,
        converged,
    })
}

/// Runs [`least_squares`] from each start and keeps the lowest `Σr²`.
///
/// Returns early once a start reaches `good_enough`.
pub fn multistart(
    f: &ResidualFn<'_>,
    jac: Option<&JacobianFn<'_>>,
    starts: &[Vec<f64>],
    opts: &LsqOptions,
    good_enough: f64,
) -> Result<LsqSolution> {
    let mut best: Option<LsqSolution> = None;
    for x0 in starts {
        let sol = match least_squares(f, jac, x0, opts) {
            Ok(s) => s,
            Err(Error::Numeric { .. }) => continue,
            Err(e) => return Err(e),
        };
        let better = best.as_ref().map_or(true, |b| sol.sum_sq < b.sum_sq);
        if better {
            best = Some(sol);
        }
        if best.as_ref().is_some_and(|b| b.sum_sq <= good_enough) {
            break;
        }
    }
    best.ok_or_else(|| Error::numeric("every start diverged", f64::INFINITY))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_exact_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        let f = |p: &[f64]| -> Vec<f64> {
            xs.iter().zip(&ys).map(|(x, y)| p[0] * x + p[1] - y).collect()
        };
        let sol = least_squares(&f, None, &[0.0, 0.0], &LsqOptions::default()).unwrap();
        assert!((sol.x[0] - 2.0).abs() < 1e-9);
        assert!((sol.x[1] + 1.0).abs() < 1e-9);
        assert!(sol.residual_norm() < 1e-9);
    }

    #[test]
    fn rank_deficient_normal_matrix_has_no_inverse() {
        // p[0] and p[1] only enter as their sum
        let f = |p: &[f64]| -> Vec<f64> { (0..5).map(|i| p[0] + p[1] - i as f64).collect() };
        let sol = least_squares(&f, None, &[0.0, 0.0], &LsqOptions::default()).unwrap();
        assert!(sol.normal_inverse().is_none());
    }

    #[test]
    fn multistart_escapes_local_minimum() {
        // cos has minima of (cos x − (−1))² only at odd multiples of π
        let f = |p: &[f64]| vec![p[0].cos() + 1.0, 0.0];
        let starts = vec![vec![0.0], vec![2.5]];
        let sol = multistart(&f, None, &starts, &LsqOptions::default(), 1e-20).unwrap();
        assert!(sol.sum_sq < 1e-12);
    }
}
