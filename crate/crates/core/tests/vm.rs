use std::f64::consts::PI;

use num_complex::Complex64;
use nuqutrit_core::decomp::{compile_scenario, GateSequence, GivensGate, Scenario, Subspace};
use nuqutrit_core::pmns::{probability_table, Baseline, Flavor, OscillationParams};
use nuqutrit_core::vm::{
    apply_phase_advances, apply_sequence, canonicalize_phases, fit_phase_advances, mitigate, phase_vector,
    probability_triples, run_gates, sample_counts, with_phase_vector, ConfusionMatrix, PhaseAdvanceModel,
    PhaseFitOptions, PhaseObservation, QutritState,
};
use proptest::prelude::*;

fn fig3_grid() -> impl Iterator<Item = f64> {
    (0..300).map(|i| 33419.0 * i as f64 / 299.0)
}

fn subspaces(s: &GateSequence<f64>) -> Vec<Subspace> {
    s.gates.iter().map(|g| g.subspace).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn gates_preserve_norm(
        amps in prop::array::uniform3((-1.0..1.0f64, -1.0..1.0f64)),
        gates in prop::collection::vec((prop::bool::ANY, -PI..PI, -7.0..7.0f64), 0..12),
    ) {
        let Ok(state) = QutritState::new(amps.map(|(re, im)| Complex64::new(re, im))) else { return Ok(()) };
        let gates: Vec<GivensGate<f64>> = gates
            .into_iter()
            .map(|(s, phi, theta)| GivensGate::new(if s { Subspace::S01 } else { Subspace::S12 }, phi, theta))
            .collect();
        let out = run_gates(state, &gates);
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-13);
    }
}

#[test]
fn vacuum_circuit_matches_oracle_on_full_grid() {
    let p = OscillationParams::<f64>::nufit();
    for le in fig3_grid() {
        let b = Baseline::from_l_over_e(le).unwrap();
        let got = probability_triples(&compile_scenario(&p, Scenario::Vacuum, 0.0, &b).unwrap());
        let want = probability_table(&p, 0.0, &b).unwrap();
        for f in Flavor::ALL {
            for c in 0..3 {
                assert!((got[f.index()][c] - want[f.index()][c]).abs() < 1e-12, "L/E={le}");
            }
        }
    }
}

#[test]
fn matter_and_cp_circuits_match_oracle() {
    let p = OscillationParams::<f64>::nufit();
    for vm in [1e-5, 1e-4, 1e-3] {
        for i in 0..100 {
            let b = Baseline::new(20.0 * i as f64, 1.0).unwrap();
            let got = probability_triples(&compile_scenario(&p, Scenario::Matter, vm, &b).unwrap());
            let want = probability_table(&p, vm, &b).unwrap();
            for f in 0..3 {
                for c in 0..3 {
                    assert!((got[f][c] - want[f][c]).abs() < 1e-12);
                }
            }
        }
    }
    for delta in [-PI / 2.0, 0.0, PI / 2.0, PI] {
        let pd = p.with_delta(delta);
        for i in 0..100 {
            let b = Baseline::new(295.0, 0.1 + 1.9 * i as f64 / 99.0).unwrap();
            let got = probability_triples(&compile_scenario(&pd, Scenario::Cp, 0.0, &b).unwrap());
            let want = probability_table(&pd, 0.0, &b).unwrap();
            for f in 0..3 {
                for c in 0..3 {
                    assert!((got[f][c] - want[f][c]).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn sampled_frequencies_converge() {
    let p = [0.2, 0.5, 0.3];
    let c = sample_counts(p, 1_000_000, 11).unwrap();
    for (f, q) in c.frequencies().iter().zip(p) {
        assert!((f - q).abs() < 2e-3);
    }
    // same seed, same counts
    assert_eq!(c, sample_counts(p, 1_000_000, 11).unwrap());
}

#[test]
fn mitigation_recovers_truth_on_average() {
    let a = ConfusionMatrix::reported_default();
    let p = OscillationParams::<f64>::nufit();
    let b = Baseline::from_l_over_e(8000.0).unwrap();
    let truth = probability_table(&p, 0.0, &b).unwrap()[Flavor::Mu.index()];
    let mut total = 0.0;
    for seed in 0..100 {
        let counts = a.sample(truth, 8192 * 4, seed).unwrap();
        let m = mitigate(counts.frequencies(), &a).unwrap();
        assert!(!m.ill_conditioned);
        total += (0..3).map(|i| (m.probs[i] - truth[i]).abs()).sum::<f64>() / 3.0;
    }
    assert!(total / 100.0 < 0.02, "{}", total / 100.0);

    let big = a.sample(truth, 1_000_000, 3).unwrap();
    let m = mitigate(big.frequencies(), &a).unwrap();
    for i in 0..3 {
        assert!((m.probs[i] - truth[i]).abs() < 2e-3);
    }
}

fn observations(templates: &[GateSequence<f64>], phases: &[f64], shots: Option<u64>) -> Vec<PhaseObservation> {
    let mut out = Vec::new();
    for (k, s) in templates.iter().enumerate() {
        let actual = with_phase_vector(s, phases).unwrap();
        for f in Flavor::ALL {
            let p = apply_sequence(f, &actual).probabilities();
            let counts = match shots {
                None => p.map(|x| x * 1e6),
                Some(n) => sample_counts(p, n, 1000 + 3 * k as u64 + f.index() as u64)
                    .unwrap()
                    .counts
                    .map(|c| c as f64),
            };
            out.push(PhaseObservation {
                sequence: s.clone(),
                initial: f,
                counts,
            });
        }
    }
    out
}

fn assert_phases_recovered(subs: &[Subspace], injected: &[f64], got: &[f64], tol: f64) {
    let idx = nuqutrit_core::vm::gauge_index(subs).unwrap();
    let want = canonicalize_phases(subs, injected, got[idx]);
    for (g, w) in got.iter().zip(&want) {
        let d = (g - w + PI).rem_euclid(2.0 * PI) - PI;
        assert!(d.abs() < tol, "got {got:?}, want {want:?}");
    }
}

#[test]
fn phase_fit_round_trips_vacuum_template() {
    let p = OscillationParams::<f64>::nufit();
    let templates: Vec<_> = (0..12)
        .map(|i| compile_scenario(&p, Scenario::Vacuum, 0.0, &Baseline::from_l_over_e(400.0 + 2700.0 * i as f64).unwrap()).unwrap())
        .collect();
    let subs = subspaces(&templates[0]);
    let injected = [0.4, -1.1, 0.9, 2.2, -0.6];
    let idx = nuqutrit_core::vm::gauge_index(&subs).unwrap();
    let opts = PhaseFitOptions {
        gauge_value: injected[idx],
        ..PhaseFitOptions::default()
    };
    let fit = fit_phase_advances(&observations(&templates, &injected, None), &opts).unwrap();
    assert_phases_recovered(&subs, &injected, &fit.phases, 1e-6);
}

#[test]
fn phase_fit_round_trips_cp_template() {
    // a single CP phase leaves a discrete ambiguity in the second half, so mix several
    let p = OscillationParams::<f64>::nufit();
    let templates: Vec<_> = (0..12)
        .map(|i| {
            let pd = p.with_delta(-PI / 2.0 + 0.5 * (i % 4) as f64);
            compile_scenario(&pd, Scenario::Cp, 0.0, &Baseline::from_l_over_e(400.0 + 2700.0 * i as f64).unwrap()).unwrap()
        })
        .collect();
    let subs = subspaces(&templates[0]);
    assert_eq!(subs.len(), 8);
    let injected = [0.3, -0.8, 1.2, -2.0, 0.5, 1.7, -0.2];
    let opts = PhaseFitOptions {
        gauge_value: injected[nuqutrit_core::vm::gauge_index(&subs).unwrap()],
        ..PhaseFitOptions::default()
    };
    let fit = fit_phase_advances(&observations(&templates, &injected, None), &opts).unwrap();
    assert_phases_recovered(&subs, &injected, &fit.phases, 1e-6);
}

#[test]
fn sampled_phase_fit_is_within_tolerance() {
    let p = OscillationParams::<f64>::nufit();
    let templates: Vec<_> = (0..12)
        .map(|i| compile_scenario(&p, Scenario::Vacuum, 0.0, &Baseline::from_l_over_e(400.0 + 2700.0 * i as f64).unwrap()).unwrap())
        .collect();
    let subs = subspaces(&templates[0]);
    let model = PhaseAdvanceModel::from_device(5.237, 4.897, 160.0 * 0.222);
    let injected = phase_vector(&templates[0], &model);
    let opts = PhaseFitOptions {
        gauge_value: injected[nuqutrit_core::vm::gauge_index(&subs).unwrap()],
        ..PhaseFitOptions::default()
    };
    let fit = fit_phase_advances(&observations(&templates, &injected, Some(8192 * 4)), &opts).unwrap();
    assert_phases_recovered(&subs, &injected, &fit.phases, 0.05);
    assert!(fit.sigma.iter().all(|s| s.is_finite() && *s < 0.05));
}

#[test]
fn frame_model_matches_phase_vector() {
    // running a circuit through the accumulator equals shifting it by the model's phase vector
    let p = OscillationParams::<f64>::nufit();
    let model = PhaseAdvanceModel::from_device(5.237, 4.897, 35.52);
    for le in [1000.0, 7000.0, 21000.0] {
        let s = compile_scenario(&p, Scenario::Vacuum, 0.0, &Baseline::from_l_over_e(le).unwrap()).unwrap();
        let a = probability_triples(&apply_phase_advances(&s, &model));
        let b = probability_triples(&with_phase_vector(&s, &phase_vector(&s, &model)).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                assert!((a[i][j] - b[i][j]).abs() < 1e-6);
            }
        }
        let w = model.omega_off;
        let want = [-w, w, w, -3.0 * w, 2.0 * w];
        for (g, w) in phase_vector(&s, &model).iter().zip(want) {
            assert!(((g - w + PI).rem_euclid(2.0 * PI) - PI).abs() < 1e-12);
        }
    }
}

#[test]
fn single_precision_circuits_track_double() {
    let p = OscillationParams::<f64>::nufit();
    let b = Baseline::from_l_over_e(12345.0).unwrap();
    let s64 = compile_scenario(&p, Scenario::Vacuum, 0.0, &b).unwrap();
    let s32: GateSequence<f32> = s64.cast();
    let a = probability_triples(&s64);
    let c = probability_triples(&s32);
    for i in 0..3 {
        for j in 0..3 {
            assert!((a[i][j] - c[i][j] as f64).abs() < 1e-5);
        }
    }
}
