use std::path::Path;

use num_complex::Complex64;
use nuqutrit_core::vm::ConfusionMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{DeviceError, Result};
use crate::pulse::sample_iq;
use crate::schedule::Measure;
use crate::transmon::MockTransmon;

/// Labelled single-shot IQ samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IqDataset {
    pub points: Vec<Complex64>,
    pub labels: Vec<usize>,
    pub duration_us: f64,
    pub amplitude: f64,
}

/// `shots` samples for each prepared level, interleaved `0, 1, 2, 0, 1, 2, …`.
///
/// The same `seed` reuses the same underlying normal draws at every pulse setting.
pub fn readout_experiment(device: &MockTransmon, duration_us: f64, amplitude: f64, shots: usize, seed: u64) -> IqDataset {
    let m = Measure {
        duration_us,
        amplitude,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(3 * shots);
    let mut labels = Vec::with_capacity(3 * shots);
    for _ in 0..shots {
        for level in 0..3 {
            points.push(sample_iq(device, m, level, &mut rng));
            labels.push(level);
        }
    }
    IqDataset {
        points,
        labels,
        duration_us,
        amplitude,
    }
}

/// Mean silhouette coefficient; `-1` when fewer than two clusters are present.
pub fn silhouette_score(points: &[Complex64], labels: &[usize]) -> f64 {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0usize; k];
    for &l in labels {
        sizes[l] += 1;
    }
    if sizes.iter().filter(|&&s| s > 0).count() < 2 || points.len() != labels.len() {
        return -1.0;
    }
    let mut total = 0.0;
    let mut sums = vec![0.0; k];
    for (i, p) in points.iter().enumerate() {
        sums.iter_mut().for_each(|s| *s = 0.0);
        for (q, &l) in points.iter().zip(labels) {
            sums[l] += (p - q).norm();
        }
        let own = labels[i];
        if sizes[own] < 2 {
            continue;
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own && sizes[c] > 0)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let m = a.max(b);
        if m > 0.0 {
            total += (b - a) / m;
        }
    }
    total / points.len() as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct SilhouetteMap {
    pub durations_us: Vec<f64>,
    pub amplitudes: Vec<f64>,
    /// `scores[i][j]` for `durations_us[i]`, `amplitudes[j]`.
    pub scores: Vec<Vec<f64>>,
    pub best_duration_us: f64,
    pub best_amplitude: f64,
    pub best_score: f64,
    /// `(duration index, amplitude index)` of the best cell.
    pub best_index: (usize, usize),
}

impl SilhouetteMap {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let io = |source: std::io::Error| DeviceError::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut w = csv::Writer::from_path(path).map_err(|e| io(e.into()))?;
        w.write_record(["duration_us", "amplitude", "silhouette"]).map_err(|e| io(e.into()))?;
        for (i, d) in self.durations_us.iter().enumerate() {
            for (j, a) in self.amplitudes.iter().enumerate() {
                w.write_record([d.to_string(), a.to_string(), self.scores[i][j].to_string()])
                    .map_err(|e| io(e.into()))?;
            }
        }
        w.flush().map_err(io)
    }
}

/// Silhouette heat map over the grid; ties go to the lowest duration, then lowest amplitude.
pub fn silhouette_optimize(
    device: &MockTransmon,
    durations_us: &[f64],
    amplitudes: &[f64],
    shots: usize,
    seed: u64,
) -> Result<SilhouetteMap> {
    if durations_us.is_empty() || amplitudes.is_empty() {
        return Err(DeviceError::Data("silhouette grid is empty".into()));
    }
    let mut scores = Vec::with_capacity(durations_us.len());
    let mut best = (0, 0, f64::NEG_INFINITY);
    for (i, &d) in durations_us.iter().enumerate() {
        let mut row = Vec::with_capacity(amplitudes.len());
        for (j, &a) in amplitudes.iter().enumerate() {
            let data = readout_experiment(device, d, a, shots, seed);
            let s = silhouette_score(&data.points, &data.labels);
            if s > best.2 {
                best = (i, j, s);
            }
            row.push(s);
        }
        scores.push(row);
    }
    Ok(SilhouetteMap {
        durations_us: durations_us.to_vec(),
        amplitudes: amplitudes.to_vec(),
        scores,
        best_duration_us: durations_us[best.0],
        best_amplitude: amplitudes[best.1],
        best_score: best.2,
        best_index: (best.0, best.1),
    })
}

/// Nearest-centroid classifier with its held-out confusion matrix.
#[derive(Debug, Clone, Serialize)]
pub struct Discriminator {
    pub centroids: [Complex64; 3],
    pub confusion: ConfusionMatrix,
    /// Held-out accuracy per prepared level.
    pub accuracies: [f64; 3],
}

impl Discriminator {
    pub fn classify(&self, z: Complex64) -> usize {
        (0..3)
            .min_by(|&a, &b| (z - self.centroids[a]).norm_sqr().total_cmp(&(z - self.centroids[b]).norm_sqr()))
            .unwrap()
    }
}

/// Trains on even-indexed samples of each class and evaluates on the odd ones.
pub fn train_discriminator(data: &IqDataset) -> Result<Discriminator> {
    let mut by_class: [Vec<Complex64>; 3] = Default::default();
    for (&p, &l) in data.points.iter().zip(&data.labels) {
        if l > 2 {
            return Err(DeviceError::Data(format!("label {l} is not a qutrit level")));
        }
        by_class[l].push(p);
    }
    let n = by_class[0].len();
    if n < 2 || by_class.iter().any(|c| c.len() != n) {
        return Err(DeviceError::Data(
            "discriminator needs a balanced dataset with at least two shots per level".into(),
        ));
    }
    let mut centroids = [Complex64::new(0.0, 0.0); 3];
    for (c, pts) in centroids.iter_mut().zip(&by_class) {
        let train: Vec<&Complex64> = pts.iter().step_by(2).collect();
        *c = train.iter().copied().sum::<Complex64>() / train.len() as f64;
    }
    let mut disc = Discriminator {
        centroids,
        confusion: ConfusionMatrix::identity(),
        accuracies: [0.0; 3],
    };
    let mut counts = [[0u64; 3]; 3];
    for (j, pts) in by_class.iter().enumerate() {
        for p in pts.iter().skip(1).step_by(2) {
            counts[j][disc.classify(*p)] += 1;
        }
    }
    disc.confusion = ConfusionMatrix::from_counts(&counts)?;
    disc.accuracies = disc.confusion.diagonal();
    Ok(disc)
}
