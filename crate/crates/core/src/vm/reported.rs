//! Phase advances measured on hardware, kept as annotations next to fitted values.
//!
//! They depend on the device they were measured on and are never fed back into circuits.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// One row of measured phase advances in radians as printed, `None` where not applicable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportedPhases {
    pub label: &'static str,
    pub raw: [Option<f64>; 7],
}

impl ReportedPhases {
    /// Populated entries wrapped into `(−π, π]`.
    pub fn normalized(&self) -> Vec<f64> {
        self.raw.iter().flatten().map(|p| p.wrap_angle()).collect()
    }
}

// measured values, not approximations of 2π
#[allow(clippy::approx_constant)]
pub const REPORTED_PHASES: [ReportedPhases; 4] = [
    ReportedPhases {
        label: "vacuum e",
        raw: [Some(-1.5312), Some(-0.4341), Some(5.9253), Some(6.5312), Some(-0.4005), None, None],
    },
    ReportedPhases {
        label: "vacuum/matter mu",
        raw: [Some(1.7018), Some(-6.2831), Some(-0.0497), Some(3.2981), Some(-6.4306), None, None],
    },
    ReportedPhases {
        label: "vacuum tau",
        raw: [Some(1.7409), Some(-0.6074), Some(-0.6796), Some(3.2591), Some(-0.7130), None, None],
    },
    ReportedPhases {
        label: "cp mu",
        raw: [Some(-1.9599), Some(0.0299), Some(0.0299), Some(0.0299), Some(0.0299), Some(-5.8599), Some(0.0611)],
    },
];

/// Parses one table cell: a number, possibly with a stray trailing comma, or `N/A`.
pub fn parse_phase_cell(cell: &str) -> Result<Option<f64>> {
    let s = cell.trim().trim_end_matches(',').trim();
    if s.eq_ignore_ascii_case("n/a") {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| Error::domain(format!("not a phase value: {cell:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn stray_comma_and_missing_cells_parse() {
        assert_eq!(parse_phase_cell("5.9253,").unwrap(), Some(5.9253));
        assert_eq!(parse_phase_cell(" N/A ").unwrap(), None);
        assert!(parse_phase_cell("abc").is_err());
    }

    #[test]
    fn rows_have_five_or_seven_phases_in_range() {
        for (row, n) in REPORTED_PHASES.iter().zip([5, 5, 5, 7]) {
            let v = row.normalized();
            assert_eq!(v.len(), n, "{}", row.label);
            assert!(v.iter().all(|p| *p > -PI && *p <= PI));
        }
        // −6.2831 is one part in 1e4 short of −2π
        assert!(REPORTED_PHASES[1].normalized()[1].abs() < 2e-4);
    }
}
