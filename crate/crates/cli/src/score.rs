use nuqutrit_core::pmns::Flavor;
use serde::{Deserialize, Serialize};

use crate::config::Mode;
use crate::run::ResultTable;

/// Reference probabilities below this are left out of relative errors.
pub const REL_ERR_FLOOR: f64 = 0.05;
/// Upper end of the "mostly 1 to 10 %" band.
pub const REL_ERR_BAND: f64 = 0.10;

/// `1 − Σ(yᵢ − y₀ᵢ)² / Σ(yᵢ − ȳ)²` with `ȳ` the mean of the data `y`.
///
/// `None` when the data have no spread (the ratio is undefined).
pub fn r_squared(y: &[f64], y0: &[f64]) -> Option<f64> {
    if y.is_empty() || y.len() != y0.len() {
        return None;
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    if ss_tot == 0.0 || !ss_tot.is_finite() {
        return None;
    }
    let ss_res: f64 = y.iter().zip(y0).map(|(a, b)| (a - b).powi(2)).sum();
    Some(1.0 - ss_res / ss_tot)
}

/// `|y − y₀| / y₀` wherever `y₀ > floor`.
pub fn relative_errors(y: &[f64], y0: &[f64], floor: f64) -> Vec<f64> {
    y.iter()
        .zip(y0)
        .filter(|(_, &b)| b > floor)
        .map(|(a, b)| (a - b).abs() / b)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveScore {
    pub curve: usize,
    pub vm_ev2: f64,
    pub delta_rad: f64,
    pub final_flavor: Flavor,
    pub points: usize,
    pub r2: Option<f64>,
    pub max_abs_err: f64,
    /// Points with reference probability above [`REL_ERR_FLOOR`].
    pub rel_points: usize,
    pub mean_rel_err: f64,
    pub max_rel_err: f64,
    /// Share of those points with relative error at most [`REL_ERR_BAND`].
    pub frac_within_band: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub mode: Mode,
    pub shots: u64,
    pub repeats: u32,
    pub curves: Vec<CurveScore>,
    pub min_r2: Option<f64>,
    pub max_abs_err: f64,
    /// Pooled over every curve.
    pub frac_within_band: f64,
    /// Largest gap between the matter approximation and exact diagonalisation.
    pub approximation_gap: Option<f64>,
    pub failed_points: usize,
}

/// Scores a finished run against the analytic probabilities stored in its rows.
pub fn score(table: &ResultTable) -> ScoreReport {
    let cfg = &table.config;
    let n_curves = table.rows.iter().map(|r| r.curve + 1).max().unwrap_or(0);
    let mut curves = Vec::new();
    let mut pooled = (0usize, 0usize);
    for c in 0..n_curves {
        let rows: Vec<_> = table.curve_rows(c).filter(|r| r.status.is_ok()).collect();
        let Some(first) = rows.first() else { continue };
        for f in Flavor::ALL {
            let k = f.index();
            let y: Vec<f64> = rows.iter().map(|r| r.p[k]).collect();
            let y0: Vec<f64> = rows.iter().map(|r| r.analytic[k]).collect();
            let rel = relative_errors(&y, &y0, REL_ERR_FLOOR);
            let within = rel.iter().filter(|&&e| e <= REL_ERR_BAND).count();
            pooled.0 += within;
            pooled.1 += rel.len();
            curves.push(CurveScore {
                curve: c,
                vm_ev2: first.vm_ev2,
                delta_rad: first.delta_rad,
                final_flavor: f,
                points: y.len(),
                r2: r_squared(&y, &y0),
                max_abs_err: y.iter().zip(&y0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
                rel_points: rel.len(),
                mean_rel_err: if rel.is_empty() { 0.0 } else { rel.iter().sum::<f64>() / rel.len() as f64 },
                max_rel_err: rel.iter().copied().fold(0.0, f64::max),
                frac_within_band: if rel.is_empty() { 1.0 } else { within as f64 / rel.len() as f64 },
            });
        }
    }
    let gap = table
        .rows
        .iter()
        .filter_map(|r| r.exact.map(|e| (0..3).map(|k| (e[k] - r.analytic[k]).abs()).fold(0.0, f64::max)))
        .reduce(f64::max);
    ScoreReport {
        mode: cfg.mode,
        shots: cfg.shots,
        repeats: cfg.repeats,
        min_r2: curves.iter().filter_map(|c| c.r2).reduce(f64::min),
        max_abs_err: curves.iter().map(|c| c.max_abs_err).fold(0.0, f64::max),
        frac_within_band: if pooled.1 == 0 { 1.0 } else { pooled.0 as f64 / pooled.1 as f64 },
        curves,
        approximation_gap: gap,
        failed_points: table.failures(),
    }
}

/// One named pass/fail check on a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Agreement required between analytic and ideal execution.
pub const MODE_CONSISTENCY_TOL: f64 = 1e-9;
/// Largest accepted gap between the matter approximation and the exact oracle.
pub const APPROXIMATION_GAP_TOL: f64 = 1e-2;

/// Invariant checks the CLI exit code is based on.
pub fn gates(table: &ResultTable, report: &ScoreReport) -> Vec<Gate> {
    let mut out = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| {
        out.push(Gate {
            name: name.into(),
            passed,
            detail,
        })
    };
    push(
        "all points ran",
        report.failed_points == 0,
        format!("{} failed of {}", report.failed_points, table.rows.len()),
    );
    let simplex = table
        .rows
        .iter()
        .filter(|r| r.status.is_ok())
        .map(|r| (r.p.iter().sum::<f64>() - 1.0).abs().max(r.p.iter().map(|p| (-p).max(p - 1.0)).fold(0.0, f64::max)))
        .fold(0.0, f64::max);
    push("probabilities on the simplex", simplex <= 1e-9, format!("worst deviation {simplex:.2e}"));
    match table.config.mode {
        Mode::Analytic | Mode::Ideal => push(
            "matches analytic",
            report.max_abs_err <= MODE_CONSISTENCY_TOL,
            format!("max |Δp| = {:.2e} (tol {MODE_CONSISTENCY_TOL:.0e})", report.max_abs_err),
        ),
        Mode::Sampled | Mode::Pulse => {
            let min = table.config.min_r2;
            push(
                "per-curve R²",
                report.min_r2.is_some_and(|r| r >= min),
                format!("min R² = {} (need ≥ {min})", report.min_r2.map_or("undefined".into(), |r| format!("{r:.4}"))),
            )
        }
    }
    if let Some(gap) = report.approximation_gap {
        push(
            "matter approximation",
            gap <= APPROXIMATION_GAP_TOL,
            format!("max |approx − exact| = {gap:.2e} (tol {APPROXIMATION_GAP_TOL:.0e})"),
        );
    }
    out
}
