use std::f64::consts::PI;

use num_complex::Complex64;
use nuqutrit_core::decomp::{
    alpha_half_cosines, compile_scenario, decompose, fit_decomposition, fit_givens_product, givens_matrix,
    insert_evolution, merge_adjacent, reconstruct, solve_alphas, verify_decomposition, GateSequence, GivensGate,
    Scenario, Subspace,
};
use nuqutrit_core::pmns::{build_pmns, evolution_phases, probability_table, Baseline, OscillationParams};
use nuqutrit_core::vm::probability_triples;
use nuqutrit_core::{Matrix3, Params};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn real_params() -> impl Strategy<Value = Params> {
    (0.01..PI / 2.0 - 0.01, 0.01..PI / 2.0 - 0.01, 0.01..PI / 2.0 - 0.01)
        .prop_map(|(a, b, c)| OscillationParams::nufit().with_angles(a, b, c))
}

fn gate() -> impl Strategy<Value = GivensGate<f64>> {
    (prop::bool::ANY, -PI..PI, -2.0 * PI..2.0 * PI).prop_map(|(s, phi, theta)| {
        GivensGate::new(if s { Subspace::S01 } else { Subspace::S12 }, phi, theta)
    })
}

#[test]
fn explicit_pi_rotations() {
    let i = Complex64::new(0.0, 1.0);
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let m01 = givens_matrix(&GivensGate::r01(0.0, PI));
    let want01 = Matrix3::from_rows([[z, -i, z], [-i, z, z], [z, z, one]]);
    assert!((m01 - want01).max_abs() < 1e-15);
    let m12 = givens_matrix(&GivensGate::r12(0.0, PI));
    let want12 = Matrix3::from_rows([[one, z, z], [z, z, -i], [z, -i, z]]);
    assert!((m12 - want12).max_abs() < 1e-15);
    assert!((givens_matrix(&GivensGate::r01(0.0, 0.0)) - Matrix3::identity()).max_abs() < 1e-15);
}

#[test]
fn global_fit_decomposition_is_certified() {
    let p = OscillationParams::<f64>::nufit();
    let d = decompose(&p, Scenario::Vacuum, 0.0).unwrap();
    let r = verify_decomposition(&build_pmns(&p), &d.r);
    assert!(r < 1e-10, "{r}");
    assert!((reconstruct(&d.r) * reconstruct(&d.r_dag) - Matrix3::identity()).max_abs() < 1e-12);
}

#[test]
fn fitted_decomposition_recovers_closed_form_cosines() {
    let p = OscillationParams::<f64>::nufit();
    let fit = fit_decomposition(&build_pmns(&p)).unwrap();
    assert!(fit.objective < 1e-8);
    let closed = alpha_half_cosines(&p).unwrap();
    for (got, want) in fit.alphas.half_cosines().iter().zip(closed.iter()) {
        assert!((got.abs() - want.unwrap().abs()).abs() < 1e-6, "{got} vs {want:?}");
    }
    assert!((fit.theta12 - p.theta12).abs() < 1e-12);
}

#[test]
fn random_draws_are_certified_and_fit() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let p = OscillationParams::nufit().with_angles(
            rng.gen_range(0.01..PI / 2.0 - 0.01),
            rng.gen_range(0.01..PI / 2.0 - 0.01),
            rng.gen_range(0.01..PI / 2.0 - 0.01),
        );
        let d = decompose(&p, Scenario::Vacuum, 0.0).unwrap();
        assert!(verify_decomposition(&build_pmns(&p), &d.r) < 1e-10);
    }
    for _ in 0..10 {
        let p = OscillationParams::nufit().with_angles(
            rng.gen_range(0.05..1.5),
            rng.gen_range(0.05..1.5),
            rng.gen_range(0.05..1.5),
        );
        let fit = fit_decomposition(&build_pmns(&p)).unwrap();
        let closed = alpha_half_cosines(&p).unwrap();
        for (got, want) in fit.alphas.half_cosines().iter().zip(closed.iter()) {
            assert!((got.abs() - want.unwrap().abs()).abs() < 1e-6);
        }
    }
}

#[test]
fn cp_decomposition_is_certified_for_any_phase() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let p = OscillationParams::nufit().with_delta(rng.gen_range(-PI..PI));
        let d = decompose(&p, Scenario::Cp, 0.0).unwrap();
        assert!(verify_decomposition(&build_pmns(&p), &d.r) < 1e-10);
    }
}

#[test]
fn givens_product_round_trip_up_to_gauge() {
    // X₀ · R⁰¹_{π/2}(a) R¹²_{3π/2}(b) R⁰¹_{π/2}(c) with random angles and diagonal phases
    let hp = PI / 2.0;
    let axes = [(Subspace::S01, hp), (Subspace::S12, 3.0 * hp), (Subspace::S01, hp)];
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..10 {
        let angles: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let x0 = Matrix3::diagonal([0, 1, 2].map(|_| Complex64::from_polar(1.0, rng.gen_range(-PI..PI))));
        let r = axes
            .iter()
            .zip(&angles)
            .fold(Matrix3::identity(), |acc, (&(s, phi), &t)| acc * GivensGate::new(s, phi, t).matrix());
        let u = x0 * r;
        let fit = fit_givens_product(&u, &axes).unwrap();
        assert!(fit.objective < 1e-8);
        for (got, want) in fit.angles.iter().zip(&angles) {
            // sign and 2π shifts are absorbed by X₀
            assert!(((got / 2.0).cos().abs() - (want / 2.0).cos().abs()).abs() < 1e-6);
        }
    }
}

#[test]
fn branch_flags_are_reported() {
    let a = solve_alphas(&OscillationParams::<f64>::nufit()).unwrap();
    assert_eq!(a.negated, [false, true, true]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn givens_gates_are_unitary(g in gate()) {
        let m = g.matrix();
        prop_assert!(m.unitarity_defect() < 1e-14);
        let other = match g.subspace { Subspace::S01 => 2, Subspace::S12 => 0 };
        prop_assert!((m.m[other][other] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn compiled_circuits_match_analytic(p in real_params(), l_over_e in 0.0..40000.0, delta in -PI..PI) {
        let b = Baseline::from_l_over_e(l_over_e).unwrap();
        for (scenario, params, vm) in [
            (Scenario::Vacuum, p, 0.0),
            (Scenario::Matter, p, 1e-3),
            (Scenario::Cp, p.with_delta(delta), 0.0),
        ] {
            let Ok(seq) = compile_scenario(&params, scenario, vm, &b) else { continue };
            let got = probability_triples(&seq);
            let want = probability_table(&params, vm, &b).unwrap();
            for a in 0..3 {
                for c in 0..3 {
                    prop_assert!((got[a][c] - want[a][c]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn diagonal_gauge_is_invisible(p in real_params(), l_over_e in 0.0..40000.0,
                                   x in prop::array::uniform3(-PI..PI)) {
        let d = decompose(&p, Scenario::Vacuum, 0.0).unwrap();
        let b = Baseline::from_l_over_e(l_over_e).unwrap();
        let lam = evolution_phases(&p, &b).lambda();
        let r = reconstruct(&d.r);
        let x0 = Matrix3::diagonal(x.map(|t| Complex64::from_polar(1.0, t)));
        let plain = r * lam * r.adjoint();
        let gauged = (x0 * r) * lam * (x0 * r).adjoint();
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((plain.m[i][j].norm_sqr() - gauged.m[i][j].norm_sqr()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn merging_preserves_the_product(gates in prop::collection::vec(gate(), 0..8), extra in -3.0..3.0f64) {
        // duplicate each gate's axis once to create mergeable neighbours
        let mut seq = Vec::new();
        for g in gates {
            seq.push(g);
            seq.push(GivensGate::new(g.subspace, g.phi, extra));
        }
        let merged = merge_adjacent(&seq);
        prop_assert!(merged.len() <= seq.len());
        let a = reconstruct(&GateSequence::new(Scenario::Cp, seq));
        let b = reconstruct(&GateSequence::new(Scenario::Cp, merged));
        prop_assert!((a - b).max_abs() < 1e-12);
    }
}

#[test]
fn cp_at_zero_delta_reproduces_vacuum_at_random_baselines() {
    let p = OscillationParams::<f64>::nufit();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let b = Baseline::new(rng.gen_range(0.0..20000.0), rng.gen_range(0.1..3.0)).unwrap();
        let v = probability_triples(&compile_scenario(&p, Scenario::Vacuum, 0.0, &b).unwrap());
        let c = probability_triples(&compile_scenario(&p, Scenario::Cp, 0.0, &b).unwrap());
        for a in 0..3 {
            for f in 0..3 {
                assert!((v[a][f] - c[a][f]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn fused_gate_equals_unfused_pair() {
    let p = OscillationParams::<f64>::nufit();
    let a = solve_alphas(&p).unwrap();
    let hp = PI / 2.0;
    let pair = [GivensGate::r01(hp, -2.0 * p.theta12), GivensGate::r01(hp, a.alpha3)];
    let fused = GivensGate::r01(hp, a.alpha3 - 2.0 * p.theta12);
    let m = pair[1].matrix() * pair[0].matrix();
    assert!((m - fused.matrix()).max_abs() < 1e-14);
    assert_eq!(merge_adjacent(&pair), vec![fused]);
}

#[test]
fn gate_file_round_trip() {
    let p = OscillationParams::<f64>::nufit();
    let b = Baseline::new(295.0, 0.6).unwrap();
    let seq = compile_scenario(&p.with_delta(-PI / 2.0), Scenario::Cp, 0.0, &b).unwrap();
    let json = seq.to_json();
    let back = GateSequence::from_json(&json).unwrap();
    assert_eq!(back.gates, seq.gates);
    assert_eq!(back.scenario, Scenario::Cp);
    assert_eq!(back.meta.alphas.unwrap().alpha2, seq.meta.alphas.unwrap().alpha2);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["order"], "application");
    assert_eq!(v["gates"].as_array().unwrap().len(), 8);
    for key in ["subspace", "phi_rad", "theta_rad"] {
        assert!(v["gates"][0].get(key).is_some());
    }
}

#[test]
fn insert_evolution_keeps_halves_separate() {
    // at Φ = 0 the two halves share axes at the seam but must not fuse across it
    let p = OscillationParams::<f64>::nufit();
    let d = decompose(&p, Scenario::Vacuum, 0.0).unwrap();
    let s = insert_evolution(&d.r, &d.r_dag, nuqutrit_core::Phases::zero(), Scenario::Vacuum);
    assert_eq!(s.len(), 6);
}
