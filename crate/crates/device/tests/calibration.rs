use std::f64::consts::PI;

use nuqutrit_core::decomp::{GivensGate, Subspace};
use nuqutrit_device::calibrate::{silhouette_score, CalibrationPlan};
use nuqutrit_device::{
    calibrate, curve_fit, error_amplification, pulse_probabilities, rabi_amplitude, rabi_spectroscopy_12,
    readout_experiment, silhouette_optimize, train_discriminator, CurveModel, MockTransmon, PulseCalibration,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn spectroscopy_finds_f12_within_a_grid_step() {
    let d = MockTransmon::noiseless();
    let grid = linspace(4.85, 4.95, 81);
    let step = grid[1] - grid[0];
    let r = rabi_spectroscopy_12(&d, &grid, 0.05, 0, 1).unwrap();
    assert!((r.f12_ghz - d.f12_ghz).abs() < step, "{}", r.f12_ghz);
    // default device with shot noise
    let r = rabi_spectroscopy_12(&MockTransmon::default(), &grid, 0.05, 1024, 2).unwrap();
    assert!((r.f12_ghz - 4.897).abs() < step, "{}", r.f12_ghz);
}

#[test]
fn spectroscopy_residuals_are_even_about_the_peak() {
    let d = MockTransmon::noiseless();
    let grid: Vec<f64> = (-30..=30).map(|k| d.f12_ghz + 1.5e-3 * k as f64).collect();
    let r = rabi_spectroscopy_12(&d, &grid, 0.05, 0, 0).unwrap();
    let res: Vec<f64> = grid.iter().zip(&r.signal).map(|(&f, y)| r.fit.eval(f) - y).collect();
    for k in 0..30 {
        assert!((res[k] - res[60 - k]).abs() < 1e-6);
    }
}

#[test]
fn spectroscopy_without_a_peak_fails_with_curve() {
    let d = MockTransmon::noiseless();
    let grid = linspace(4.5, 4.6, 41);
    match rabi_spectroscopy_12(&d, &grid, 0.05, 0, 0) {
        Err(nuqutrit_device::DeviceError::Fit { ys, .. }) => assert_eq!(ys.len(), 41),
        Ok(r) => panic!("found a peak at {}", r.f12_ghz),
        Err(e) => panic!("unexpected error {e}"),
    }
}

#[test]
fn rabi_recovers_pi_amplitude() {
    let d = MockTransmon::default();
    let grid = linspace(0.0, 0.6, 61);
    for s in [Subspace::S01, Subspace::S12] {
        let truth = d.effective_a_pi(s);
        let exact = rabi_amplitude(&d, s, d.transition_ghz(s), &grid, 0, 3).unwrap();
        assert!((exact.a_pi - truth).abs() < 0.01 * truth);
        let noisy = rabi_amplitude(&d, s, d.transition_ghz(s), &grid, 1024, 4).unwrap();
        assert!((noisy.a_pi - truth).abs() < 0.03 * truth, "{s:?}: {}", noisy.a_pi);
    }
}

#[test]
fn stronger_coupling_halves_pi_amplitude() {
    let d = MockTransmon::noiseless();
    let strong = MockTransmon {
        a_pi_01: d.a_pi_01 / 2.0,
        a_pi_12: d.a_pi_12 / 2.0,
        ..d.clone()
    };
    let grid = linspace(0.0, 0.6, 61);
    for s in [Subspace::S01, Subspace::S12] {
        let a = rabi_amplitude(&d, s, d.transition_ghz(s), &grid, 0, 0).unwrap().a_pi;
        let b = rabi_amplitude(&strong, s, d.transition_ghz(s), &grid, 0, 0).unwrap().a_pi;
        assert!((b / a - 0.5).abs() < 1e-6);
    }
}

#[test]
fn calibrated_gates_close_the_loop() {
    let d = MockTransmon::noiseless();
    let plan = CalibrationPlan {
        shots: 0,
        silhouette_shots: 30,
        readout_durations_us: (3.5, 4.5, 5),
        readout_amplitudes: (0.85, 0.97, 5),
        discriminator_shots: 500,
        amplification_n_max: 20,
        amplification_shots: 0,
        ..CalibrationPlan::default()
    };
    let report = calibrate(&d, &plan, 11).unwrap();
    let cal = report.pulse_calibration;
    let pi01 = cal.play(&GivensGate::r01(0.0, PI));
    let pi12 = cal.play(&GivensGate::r12(0.0, PI));
    let p1 = pulse_probabilities(&d, &nuqutrit_device::PulseSchedule::new(vec![pi01])).unwrap();
    assert!(p1[1] > 0.999, "{p1:?}");
    let p2 = pulse_probabilities(&d, &nuqutrit_device::PulseSchedule::new(vec![pi01, pi12])).unwrap();
    assert!(p2[2] > 0.999, "{p2:?}");
}

#[test]
fn report_serialises_estimates_against_truth() {
    let d = MockTransmon::default();
    let plan = CalibrationPlan {
        silhouette_shots: 20,
        readout_durations_us: (3.0, 5.0, 3),
        readout_amplitudes: (0.7, 1.0, 3),
        discriminator_shots: 200,
        amplification_n_max: 20,
        amplification_shots: 2048,
        ..CalibrationPlan::default()
    };
    let r = calibrate(&d, &plan, 5).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    for key in ["f12_ghz", "a_pi_01", "a_pi_12", "under_rotation_rad", "decay_rate_khz"] {
        assert!(v[key]["estimate"].is_number() && v[key]["truth"].is_number(), "{key}");
    }
    assert!(v["fit_residuals"]["spectroscopy"].is_number());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cal.json");
    r.write_json(&path).unwrap();
    assert!(std::fs::read_to_string(path).unwrap().contains("pulse_calibration"));
}

#[test]
fn zero_readout_amplitude_gives_no_clusters() {
    let d = MockTransmon::default();
    let data = readout_experiment(&d, 4.0, 0.0, 200, 3);
    assert!(silhouette_score(&data.points, &data.labels).abs() < 0.05);
}

#[test]
fn centroid_estimates_tighten_with_shots() {
    let d = MockTransmon::default();
    let (truth, _) = d.iq.clouds(4.0, 0.91);
    let err = |shots: usize| -> f64 {
        (0..20)
            .map(|s| {
                let disc = train_discriminator(&readout_experiment(&d, 4.0, 0.91, shots, 100 + s)).unwrap();
                (disc.centroids[0] - truth[0]).norm_sqr()
            })
            .sum::<f64>()
            / 20.0
    };
    let ratio = (err(200) / err(3200)).sqrt();
    // 16× the shots → 4× smaller error
    assert!(ratio > 2.5 && ratio < 6.5, "{ratio}");
}

#[test]
fn silhouette_optimum_is_found() {
    let d = MockTransmon::default();
    let durs = linspace(2.0, 5.0, 13);
    let amps = linspace(0.4, 1.0, 21);
    let map = silhouette_optimize(&d, &durs, &amps, 200, 8).unwrap();
    let dd = durs[1] - durs[0];
    let da = amps[1] - amps[0];
    assert!((map.best_duration_us - 4.0).abs() <= dd + 1e-9, "{}", map.best_duration_us);
    assert!((map.best_amplitude - 0.91).abs() <= da + 1e-9, "{}", map.best_amplitude);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("heat.csv");
    map.write_csv(&path).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().count(), 1 + 13 * 21);
    assert!(text.starts_with("duration_us,amplitude,silhouette"));
}

#[test]
fn silhouette_ties_prefer_lowest_duration_then_amplitude() {
    let d = MockTransmon::default();
    let map = silhouette_optimize(&d, &[4.0, 4.0], &[0.91, 0.91], 50, 1).unwrap();
    assert_eq!(map.scores[0][0], map.scores[1][1]);
    assert_eq!(map.best_index, (0, 0));
}

#[test]
fn discriminator_accuracies_match_the_target_snr() {
    let d = MockTransmon::default();
    let disc = train_discriminator(&readout_experiment(&d, 4.0, 0.91, 40_000, 21)).unwrap();
    for (got, want) in disc.accuracies.iter().zip([0.985, 0.943, 0.945]) {
        assert!((got - want).abs() < 0.01, "{:?}", disc.accuracies);
    }
    for j in 0..3 {
        let col: f64 = (0..3).map(|i| disc.confusion.a[i][j]).sum();
        assert!((col - 1.0).abs() < 1e-12);
    }
    let mut far = d.clone();
    far.iq.centroids = far.iq.centroids.map(|c| c * 3.0);
    let easy = train_discriminator(&readout_experiment(&far, 4.0, 0.91, 2000, 2)).unwrap();
    assert!(easy.accuracies.iter().all(|&a| a > 0.99));
}

#[test]
fn error_amplification_recovers_injected_errors() {
    let d = MockTransmon::default();
    let r = error_amplification(&d, 60, 8192, 17).unwrap();
    assert!((r.under_rotation - 0.008).abs() < 0.2 * 0.008, "{}", r.under_rotation);
    assert!((r.decay_rate_khz - 73.125).abs() < 0.2 * 73.125, "{}", r.decay_rate_khz);

    let flipped = MockTransmon {
        under_rotation_12: -0.008,
        ..d.clone()
    };
    let r = error_amplification(&flipped, 60, 8192, 18).unwrap();
    assert!((r.under_rotation + 0.008).abs() < 0.2 * 0.008, "{}", r.under_rotation);
}

#[test]
fn perfect_pulses_give_flat_amplification_curve() {
    let d = MockTransmon::noiseless();
    let r = error_amplification(&d, 40, 8192, 3).unwrap();
    for (n, p) in r.ns.iter().zip(&r.plain) {
        if n % 2 == 0 {
            assert!(*p > 0.99, "n={n}: {p}");
        }
    }
    assert!(r.under_rotation.abs() < 1e-3, "{}", r.under_rotation);
}

#[test]
fn curve_fit_uncertainties_are_calibrated() {
    // over many noisy draws the truth lies within 2σ about 95% of the time
    let truth = [0.4, 0.3, 0.7, 0.5];
    let xs = linspace(0.0, 0.9, 60);
    let noise = Normal::new(0.0, 0.02).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut inside = [0usize; 4];
    let trials = 100;
    for _ in 0..trials {
        let ys: Vec<f64> = xs
            .iter()
            .map(|&x| CurveModel::Cosine.eval(&truth, x) + noise.sample(&mut rng))
            .collect();
        let f = curve_fit(CurveModel::Cosine, &xs, &ys).unwrap();
        for (k, se) in f.stderr().iter().enumerate() {
            if (f.params[k] - truth[k]).abs() <= 2.0 * se {
                inside[k] += 1;
            }
        }
    }
    for k in 0..4 {
        assert!(inside[k] >= 88, "parameter {k}: {}/{trials}", inside[k]);
    }
}

#[test]
fn calibration_is_seed_deterministic() {
    let d = MockTransmon::default();
    let grid = linspace(4.85, 4.95, 41);
    let a = rabi_spectroscopy_12(&d, &grid, 0.05, 512, 77).unwrap();
    let b = rabi_spectroscopy_12(&d, &grid, 0.05, 512, 77).unwrap();
    assert_eq!(a.signal, b.signal);
    let p = PulseCalibration::nominal(&d);
    assert_eq!(p.f12_ghz, d.f12_ghz);
}
