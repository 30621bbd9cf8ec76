//! Model curves for the calibration experiments, fitted with the core least-squares backend.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use nuqutrit_core::optim::{multistart, LsqOptions};
use serde::{Deserialize, Serialize};

use crate::error::{DeviceError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveModel {
    /// `[x0, γ, A, c]`: `c + A / (1 + ((x − x0)/γ)²)`.
    Lorentzian,
    /// `[A, T, p, c]`: `c + A cos(2πx/T + p)`.
    Cosine,
    /// `[A, r, ω, p, c]`: `c + A e^{−r x} cos(ωx + p)`.
    DampedCosine,
    /// `[m, b]`: `m x + b`.
    Line,
}

impl CurveModel {
    pub fn n_params(self) -> usize {
        match self {
            CurveModel::Lorentzian | CurveModel::Cosine => 4,
            CurveModel::DampedCosine => 5,
            CurveModel::Line => 2,
        }
    }

    pub fn eval(self, p: &[f64], x: f64) -> f64 {
        match self {
            CurveModel::Lorentzian => {
                let u = (x - p[0]) / p[1];
                p[3] + p[2] / (1.0 + u * u)
            }
            CurveModel::Cosine => p[3] + p[0] * (TAU * x / p[1] + p[2]).cos(),
            CurveModel::DampedCosine => p[4] + p[0] * (-p[1] * x).exp() * (p[2] * x + p[3]).cos(),
            CurveModel::Line => p[0] * x + p[1],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveFit {
    pub model: CurveModel,
    pub params: Vec<f64>,
    /// `s² (JᵀJ)⁻¹`; rows of parameters that the data cannot determine are `∞`.
    pub covariance: Vec<Vec<f64>>,
    pub residual_norm: f64,
}

impl CurveFit {
    pub fn stderr(&self) -> Vec<f64> {
        (0..self.params.len())
            .map(|i| self.covariance[i][i].max(0.0).sqrt())
            .collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.model.eval(&self.params, x)
    }
}

fn fit_error(reason: impl Into<String>, xs: &[f64], ys: &[f64]) -> DeviceError {
    DeviceError::Fit {
        experiment: "curve_fit",
        reason: reason.into(),
        xs: xs.to_vec(),
        ys: ys.to_vec(),
    }
}

/// Linear least squares of `ys` on the columns produced by `basis`, returning coefficients and `Σr²`.
fn linear_fit(xs: &[f64], ys: &[f64], basis: impl Fn(f64) -> Vec<f64>) -> Option<(Vec<f64>, f64)> {
    let rows: Vec<Vec<f64>> = xs.iter().map(|&x| basis(x)).collect();
    let k = rows.first()?.len();
    let a = DMatrix::from_fn(xs.len(), k, |i, j| rows[i][j]);
    let b = DVector::from_column_slice(ys);
    let sol = a.clone().svd(true, true).solve(&b, 1e-12).ok()?;
    let r = &a * &sol - b;
    Some((sol.as_slice().to_vec(), r.norm_squared()))
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn starts(model: CurveModel, xs: &[f64], ys: &[f64]) -> Vec<Vec<f64>> {
    let span = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let span = if span > 0.0 { span } else { 1.0 };
    let step = span / (xs.len().max(2) - 1) as f64;
    match model {
        CurveModel::Line => vec![linear_fit(xs, ys, |x| vec![x, 1.0]).map_or(vec![0.0, mean(ys)], |(c, _)| c)],
        CurveModel::Lorentzian => {
            let mut sorted = ys.to_vec();
            sorted.sort_by(f64::total_cmp);
            let base = sorted[sorted.len() / 2];
            let (k, _) = ys
                .iter()
                .enumerate()
                .max_by(|a, b| (a.1 - base).abs().total_cmp(&(b.1 - base).abs()))
                .unwrap();
            let amp = ys[k] - base;
            let above = ys.iter().filter(|&&y| (y - base) / amp > 0.5).count().max(1);
            let width = (above as f64 * step / 2.0).max(step / 2.0);
            [0.5, 1.0, 2.0, 4.0]
                .iter()
                .map(|s| vec![xs[k], width * s, amp, base])
                .collect()
        }
        CurveModel::Cosine => {
            // scan periods from Nyquist to twice the span, solving the linear part exactly
            let mut best: Option<(f64, Vec<f64>, f64)> = None;
            let n = 400;
            for i in 0..n {
                let t = 2.0 * step * (span / step).powf(i as f64 / (n - 1) as f64);
                let Some((c, rss)) = linear_fit(xs, ys, |x| vec![1.0, (TAU * x / t).cos(), (TAU * x / t).sin()]) else {
                    continue;
                };
                if best.as_ref().map_or(true, |b| rss < b.2) {
                    best = Some((t, c, rss));
                }
            }
            let Some((t, c, _)) = best else {
                return vec![vec![0.0, span, 0.0, mean(ys)]];
            };
            let amp = c[1].hypot(c[2]);
            let phase = (-c[2]).atan2(c[1]);
            vec![vec![amp, t, phase, c[0]], vec![amp, t * 0.9, phase, c[0]], vec![amp, t * 1.1, phase, c[0]]]
        }
        CurveModel::DampedCosine => {
            let mut best: Option<(f64, f64, Vec<f64>, f64)> = None;
            let n = 300;
            let w_max = PI / step;
            let w_min = PI / span;
            for i in 0..n {
                let w = w_min + (w_max - w_min) * i as f64 / (n - 1) as f64;
                for r in [0.0, 0.3, 1.0, 3.0].map(|m| m / span) {
                    let Some((c, rss)) = linear_fit(xs, ys, |x| {
                        let e = (-r * x).exp();
                        vec![1.0, e * (w * x).cos(), e * (w * x).sin()]
                    }) else {
                        continue;
                    };
                    if best.as_ref().map_or(true, |b| rss < b.3) {
                        best = Some((w, r, c, rss));
                    }
                }
            }
            let Some((w, r, c, _)) = best else {
                return vec![vec![0.0, 0.0, PI / span, 0.0, mean(ys)]];
            };
            let amp = c[1].hypot(c[2]);
            let phase = (-c[2]).atan2(c[1]);
            vec![vec![amp, r, w, phase, c[0]], vec![amp, r + 0.5 / span, w, phase, c[0]]]
        }
    }
}

/// Nonlinear least squares of `model` to `(xs, ys)` with deterministic data-driven starts.
///
/// Fails when the Jacobian at the optimum is rank deficient, except for a vanishing
/// oscillation amplitude: then the amplitude and offset are reported and the undetermined
/// frequency-like parameters get infinite variance.
pub fn curve_fit(model: CurveModel, xs: &[f64], ys: &[f64]) -> Result<CurveFit> {
    let k = model.n_params();
    if xs.len() != ys.len() {
        return Err(fit_error("xs and ys differ in length", xs, ys));
    }
    if xs.len() < k + 1 {
        return Err(fit_error(format!("need at least {} points for {k} parameters", k + 1), xs, ys));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(fit_error("non-finite data", xs, ys));
    }
    let residual = |p: &[f64]| -> Vec<f64> { xs.iter().zip(ys).map(|(&x, &y)| model.eval(p, x) - y).collect() };
    let scale = ys.iter().map(|y| y * y).sum::<f64>().max(1e-300);
    let opts = LsqOptions::default();
    let sol = multistart(&residual, None, &starts(model, xs, ys), &opts, 1e-24 * scale)
        .map_err(|e| fit_error(e.to_string(), xs, ys))?;
    let mut params = sol.x.clone();
    let n = xs.len();
    let s2 = if n > k { sol.sum_sq / (n - k) as f64 } else { 0.0 };

    let amp_index = match model {
        CurveModel::Cosine | CurveModel::DampedCosine => Some(0),
        _ => None,
    };
    let ys_spread = (ys.iter().map(|y| (y - mean(ys)).powi(2)).sum::<f64>() / n as f64).sqrt();
    let vanishing = amp_index.is_some_and(|i| params[i].abs() <= 1e-9 * (1.0 + ys_spread + mean(ys).abs()));

    let covariance = if vanishing {
        // only A and c are identifiable: refit the offset alone and leave the rest undetermined
        let c = mean(ys);
        let offset = k - 1;
        params[0] = 0.0;
        params[offset] = c;
        let s2 = ys.iter().map(|y| (y - c).powi(2)).sum::<f64>() / (n - 1) as f64;
        let mut cov = vec![vec![f64::INFINITY; k]; k];
        cov[offset] = vec![0.0; k];
        for row in cov.iter_mut() {
            row[offset] = 0.0;
        }
        cov[offset][offset] = s2 / n as f64;
        cov[0][0] = 2.0 * s2 / n as f64;
        cov
    } else {
        let inv = sol
            .normal_inverse()
            .ok_or_else(|| fit_error("rank-deficient Jacobian at the optimum", xs, ys))?;
        (0..k).map(|i| (0..k).map(|j| inv[(i, j)] * s2).collect()).collect()
    };

    match model {
        CurveModel::Lorentzian => params[1] = params[1].abs(),
        CurveModel::Cosine | CurveModel::DampedCosine if !vanishing && params[0] < 0.0 => {
            params[0] = -params[0];
            let p = if model == CurveModel::Cosine { 2 } else { 3 };
            params[p] += PI;
        }
        _ => {}
    }
    if let CurveModel::Cosine = model {
        params[2] = wrap(params[2]);
    }
    if let CurveModel::DampedCosine = model {
        params[3] = wrap(params[3]);
    }
    Ok(CurveFit {
        model,
        params,
        covariance,
        residual_norm: sol.sum_sq.sqrt(),
    })
}

fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn exact_data_fit_to_machine_precision() {
        let cases: [(CurveModel, Vec<f64>, Vec<f64>); 4] = [
            (CurveModel::Lorentzian, vec![4.9, 0.01, 0.8, 0.05], grid(4.8, 5.0, 41)),
            (CurveModel::Cosine, vec![0.5, 0.31, 0.4, 0.5], grid(0.0, 0.6, 40)),
            (CurveModel::DampedCosine, vec![0.3, 0.02, 3.0, 0.2, 0.4], grid(0.0, 60.0, 61)),
            (CurveModel::Line, vec![2.0, -1.0], grid(0.0, 1.0, 5)),
        ];
        for (m, p, xs) in cases {
            let ys: Vec<f64> = xs.iter().map(|&x| m.eval(&p, x)).collect();
            let f = curve_fit(m, &xs, &ys).unwrap();
            assert!(f.residual_norm < 1e-10, "{m:?}: {}", f.residual_norm);
            for (a, b) in f.params.iter().zip(&p) {
                assert!((a - b).abs() < 1e-6, "{m:?}: {:?} vs {p:?}", f.params);
            }
        }
    }

    #[test]
    fn constant_data_gives_zero_amplitude() {
        let xs = grid(0.0, 1.0, 30);
        let ys = vec![0.42; 30];
        let f = curve_fit(CurveModel::Cosine, &xs, &ys).unwrap();
        assert!(f.params[0].abs() < 1e-9);
        assert!((f.params[3] - 0.42).abs() < 1e-12);
        assert!(f.stderr()[1].is_infinite());
    }

    #[test]
    fn too_few_points_is_an_error() {
        assert!(curve_fit(CurveModel::Lorentzian, &[1.0, 2.0, 3.0, 4.0], &[0.0, 1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn duplicated_abscissae_are_rank_deficient() {
        let xs = vec![1.0; 6];
        let ys = vec![0.0, 1.0, 2.0, 0.5, 0.2, 0.1];
        let err = curve_fit(CurveModel::Line, &xs, &ys).unwrap_err();
        assert!(matches!(err, DeviceError::Fit { .. }));
    }
}
