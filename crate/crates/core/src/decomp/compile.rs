use super::alphas::{pmns_operator_gates, solve_alphas, AlphaAngles};
use super::givens::{GivensGate, Subspace};
use super::sequence::{merge_adjacent, GateSequence, Scenario, SequenceMeta};
use crate::error::{Error, Result};
use crate::pmns::{evolution_phases, propagation_params, Baseline, EvolutionPhases, OscillationParams};
use crate::scalar::Real;

/// The two halves of a compiled PMNS action.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<T> {
    /// Mass → flavor rotation `R`.
    pub r: GateSequence<T>,
    /// Flavor → mass rotation `R†`.
    pub r_dag: GateSequence<T>,
    pub alphas: AlphaAngles<T>,
    /// Parameters the angles were solved for (hatted in matter).
    pub params: OscillationParams<T>,
}

/// Compiles `R` and `R†` for a scenario.
///
/// Vacuum and matter use real mixing and reject a nonzero δ; matter swaps in the hatted
/// parameters for potential `vm`. The CP scenario places δ on the axes of the α₁ and α₃ gates.
pub fn decompose<T: Real>(p: &OscillationParams<T>, scenario: Scenario, vm: T) -> Result<Decomposition<T>> {
    let eff = match scenario {
        Scenario::Vacuum => {
            if vm != T::zero() {
                return Err(Error::Invalid("vacuum scenario takes no matter potential".into()));
            }
            *p
        }
        Scenario::Matter => propagation_params(p, vm)?,
        Scenario::Cp => {
            if vm != T::zero() {
                return Err(Error::Invalid("cp scenario is compiled in vacuum".into()));
            }
            *p
        }
    };
    let delta = match scenario {
        Scenario::Cp => eff.delta,
        _ => {
            if eff.delta.wrap_angle() != T::zero() {
                return Err(Error::Invalid(format!(
                    "{scenario} template needs real mixing (delta = 0); use the cp scenario"
                )));
            }
            T::zero()
        }
    };
    let alphas = solve_alphas(&eff.with_delta(delta))?;
    let ops = pmns_operator_gates(&alphas, eff.theta12, delta);
    let meta = SequenceMeta {
        alphas: Some(alphas),
        params: Some(eff),
        vm,
        phases: None,
    };
    let r = GateSequence::from_operator_product(scenario, ops.to_vec()).with_meta(meta);
    let r_dag = r.inverse();
    Ok(Decomposition {
        r,
        r_dag,
        alphas,
        params: eff,
    })
}

/// Builds the evolution circuit: `R†` first, then `R` with each axis moved by its subspace phase.
///
/// Shifting the axes of `R` by `−Φ` realises `R Λ† R†` up to the unobservable diagonal frame,
/// whose probabilities equal those of `U Λ U†` with `Λ = diag(1, e^{iΦ⁰¹}, e^{i(Φ⁰¹+Φ¹²)})`.
/// Vacuum and matter then fuse same-axis neighbours inside each half, giving six gates; CP keeps
/// all eight.
pub fn insert_evolution<T: Real>(
    r: &GateSequence<T>,
    r_dag: &GateSequence<T>,
    phases: EvolutionPhases<T>,
    scenario: Scenario,
) -> GateSequence<T> {
    let shift = |g: &GivensGate<T>| match g.subspace {
        Subspace::S01 => g.shifted(-phases.phi01),
        Subspace::S12 => g.shifted(-phases.phi12),
    };
    let before: Vec<GivensGate<T>> = r_dag.gates.clone();
    let after: Vec<GivensGate<T>> = r.gates.iter().map(shift).collect();
    let gates = match scenario {
        Scenario::Vacuum | Scenario::Matter => {
            let mut g = merge_adjacent(&before);
            g.extend(merge_adjacent(&after));
            g
        }
        Scenario::Cp => {
            let mut g = before;
            g.extend(after);
            g
        }
    };
    let mut meta = r.meta;
    meta.phases = Some(phases);
    GateSequence {
        gates,
        scenario,
        meta,
    }
}

/// One-call compile: decomposition plus evolution for a baseline.
pub fn compile_scenario<T: Real>(
    p: &OscillationParams<T>,
    scenario: Scenario,
    vm: T,
    baseline: &Baseline<T>,
) -> Result<GateSequence<T>> {
    let d = decompose(p, scenario, vm)?;
    let phases = evolution_phases(&d.params, baseline);
    Ok(insert_evolution(&d.r, &d.r_dag, phases, scenario))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::sequence::reconstruct;
    use crate::matrix::ComplexMatrix3;
    use crate::pmns::probability_table;
    use std::f64::consts::PI;

    fn probs_from(seq: &GateSequence<f64>) -> [[f64; 3]; 3] {
        let m = reconstruct(seq).abs_sqr();
        // m[final][initial] → [initial][final]
        let mut out = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                out[a][b] = m[b][a];
            }
        }
        out
    }

    #[test]
    fn vacuum_pair_is_inverse() {
        let d = decompose(&OscillationParams::nufit(), Scenario::Vacuum, 0.0).unwrap();
        let prod = reconstruct(&d.r) * reconstruct(&d.r_dag);
        assert!((prod - ComplexMatrix3::identity()).max_abs() < 1e-12);
        assert_eq!(d.r.len(), 4);
    }

    #[test]
    fn gate_counts() {
        let p = OscillationParams::nufit();
        let b = Baseline::new(300.0, 1.0).unwrap();
        assert_eq!(compile_scenario(&p, Scenario::Vacuum, 0.0, &b).unwrap().len(), 6);
        assert_eq!(compile_scenario(&p, Scenario::Matter, 1e-4, &b).unwrap().len(), 6);
        assert_eq!(compile_scenario(&p.with_delta(1.0), Scenario::Cp, 0.0, &b).unwrap().len(), 8);
    }

    #[test]
    fn printed_vacuum_shape() {
        let p = OscillationParams::nufit();
        let b = Baseline::new(500.0, 1.0).unwrap();
        let d = decompose(&p, Scenario::Vacuum, 0.0).unwrap();
        let ph = evolution_phases(&p, &b);
        let s = insert_evolution(&d.r, &d.r_dag, ph, Scenario::Vacuum);
        let a = d.alphas;
        let hp = PI / 2.0;
        let want = [
            GivensGate::r01(hp, -a.alpha1),
            GivensGate::r12(3.0 * hp, -a.alpha2),
            GivensGate::r01(hp, 2.0 * p.theta12 - a.alpha3),
            GivensGate::r01(hp - ph.phi01, a.alpha3 - 2.0 * p.theta12),
            GivensGate::r12(3.0 * hp - ph.phi12, a.alpha2),
            GivensGate::r01(hp - ph.phi01, a.alpha1),
        ];
        for (g, w) in s.gates.iter().zip(want.iter()) {
            assert_eq!(g.subspace, w.subspace);
            assert!((g.phi - w.phi).abs() < 1e-12);
            assert!((g.theta - w.theta).abs() < 1e-12);
        }
    }

    #[test]
    fn scenarios_match_analytic() {
        let p = OscillationParams::nufit();
        for &(scenario, delta, vm) in &[
            (Scenario::Vacuum, 0.0, 0.0),
            (Scenario::Matter, 0.0, 1e-3),
            (Scenario::Cp, -PI / 2.0, 0.0),
            (Scenario::Cp, PI / 2.0, 0.0),
            (Scenario::Cp, PI, 0.0),
        ] {
            let pd = p.with_delta(delta);
            for l in [1.0, 295.0, 4000.0, 20000.0] {
                let b = Baseline::new(l, 0.9).unwrap();
                let seq = compile_scenario(&pd, scenario, vm, &b).unwrap();
                let got = probs_from(&seq);
                let want = probability_table(&pd, vm, &b).unwrap();
                for i in 0..3 {
                    for j in 0..3 {
                        assert!(
                            (got[i][j] - want[i][j]).abs() < 1e-12,
                            "{scenario} δ={delta} L={l}: {} vs {}",
                            got[i][j],
                            want[i][j]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn cp_at_zero_delta_equals_vacuum_halves() {
        let p = OscillationParams::nufit();
        let v = decompose(&p, Scenario::Vacuum, 0.0).unwrap();
        let c = decompose(&p, Scenario::Cp, 0.0).unwrap();
        assert_eq!(v.r.gates, c.r.gates);
        assert_eq!(v.r_dag.gates, c.r_dag.gates);
    }

    #[test]
    fn matter_at_zero_potential_is_vacuum() {
        let p = OscillationParams::nufit();
        let v = decompose(&p, Scenario::Vacuum, 0.0).unwrap();
        let m = decompose(&p, Scenario::Matter, 0.0).unwrap();
        assert_eq!(v.r.gates, m.r.gates);
    }

    #[test]
    fn zero_phases_give_identity() {
        let d = decompose(&OscillationParams::nufit(), Scenario::Vacuum, 0.0).unwrap();
        let s = insert_evolution(&d.r, &d.r_dag, EvolutionPhases::zero(), Scenario::Vacuum);
        assert!((reconstruct(&s) - ComplexMatrix3::identity()).max_abs() < 1e-12);
    }

    #[test]
    fn rejects_complex_mixing_in_real_templates() {
        let p = OscillationParams::nufit().with_delta(0.5);
        assert!(decompose(&p, Scenario::Vacuum, 0.0).is_err());
        assert!(decompose(&p, Scenario::Matter, 1e-4).is_err());
    }
}
