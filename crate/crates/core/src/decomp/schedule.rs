use serde::Serialize;

use super::givens::GivensGate;
use super::sequence::GateSequence;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Reported qutrit execution time for the vacuum circuit, in units of dt.
pub const REPORTED_QUTRIT_DURATION_DT: u64 = 640;
/// Reported execution time of the two-qubit encoding of the same circuit, in units of dt.
pub const REPORTED_QUBIT_DURATION_DT: u64 = 12224;

/// Durations of a sequence under the one-pulse-per-gate schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScheduleReport {
    pub gate_duration_dt: u64,
    pub gates: usize,
    /// Pulses after fusing neighbours that share subspace and axis.
    pub merged_pulses: usize,
    pub unmerged_dt: u64,
    pub merged_dt: u64,
    pub reported_qutrit_dt: u64,
    pub reported_qubit_dt: u64,
    /// Neither computed duration equals the reported qutrit figure.
    pub mismatch: bool,
}

/// Counts pulses that remain after fusing adjacent gates in the same subspace with the same axis.
///
/// A fused pair whose angles cancel (θ ≡ 0 mod 4π) still costs nothing; it is dropped.
pub fn physical_pulses<T: Real>(gates: &[GivensGate<T>]) -> usize {
    super::sequence::merge_adjacent(gates)
        .iter()
        .filter(|g| g.theta.abs() > T::lit(1e-12))
        .count()
}

/// Duration of `seq` with `td` dt per pulse, with and without same-axis fusion.
pub fn schedule_duration<T: Real>(seq: &GateSequence<T>, td: u64) -> Result<ScheduleReport> {
    if td == 0 {
        return Err(Error::domain("pulse duration must be positive"));
    }
    let merged_pulses = physical_pulses(&seq.gates);
    let unmerged_dt = seq.gates.len() as u64 * td;
    let merged_dt = merged_pulses as u64 * td;
    let mismatch = !seq.is_empty()
        && unmerged_dt != REPORTED_QUTRIT_DURATION_DT
        && merged_dt != REPORTED_QUTRIT_DURATION_DT;
    Ok(ScheduleReport {
        gate_duration_dt: td,
        gates: seq.gates.len(),
        merged_pulses,
        unmerged_dt,
        merged_dt,
        reported_qutrit_dt: REPORTED_QUTRIT_DURATION_DT,
        reported_qubit_dt: REPORTED_QUBIT_DURATION_DT,
        mismatch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::compile::compile_scenario;
    use crate::decomp::sequence::Scenario;
    use crate::pmns::{Baseline, OscillationParams};

    #[test]
    fn empty_sequence_takes_no_time() {
        let r = schedule_duration(&GateSequence::<f64>::empty(Scenario::Vacuum), 160).unwrap();
        assert_eq!(r.unmerged_dt, 0);
        assert_eq!(r.merged_dt, 0);
        assert!(!r.mismatch);
    }

    #[test]
    fn vacuum_circuit_is_960_dt_not_640() {
        let p = OscillationParams::nufit();
        let b = Baseline::new(1000.0, 1.0).unwrap();
        let s = compile_scenario(&p, Scenario::Vacuum, 0.0, &b).unwrap();
        let r = schedule_duration(&s, 160).unwrap();
        assert_eq!(r.unmerged_dt, 960);
        assert_eq!(r.merged_dt, 960);
        assert!(r.mismatch);
        let cp = compile_scenario(&p.with_delta(1.0), Scenario::Cp, 0.0, &b).unwrap();
        assert!(schedule_duration(&cp, 160).unwrap().unmerged_dt > r.unmerged_dt);
    }

    #[test]
    fn zero_duration_rejected() {
        assert!(schedule_duration(&GateSequence::<f64>::empty(Scenario::Cp), 0).is_err());
    }
}
