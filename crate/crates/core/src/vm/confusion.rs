use nalgebra::{Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sampling::{sample_counts_with, ShotCounts};
use crate::error::{Error, Result};

/// Above this condition number mitigation results are flagged as unreliable.
pub const ILL_CONDITIONED: f64 = 1e6;

/// Readout assignment matrix, `a[i][j] = P(classified i | prepared j)`; columns sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub a: [[f64; 3]; 3],
}

impl ConfusionMatrix {
    pub fn new(a: [[f64; 3]; 3]) -> Result<Self> {
        for j in 0..3 {
            let mut sum = 0.0;
            for row in &a {
                let v = row[j];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Invalid(format!("confusion entry {v} outside [0, 1]")));
                }
                sum += v;
            }
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::Invalid(format!("confusion column {j} sums to {sum}")));
            }
        }
        Ok(Self { a })
    }

    pub fn identity() -> Self {
        Self {
            a: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    /// Assignment fidelities 0.985, 0.943, 0.945 with the misassignments mostly into the
    /// neighbouring level.
    pub fn reported_default() -> Self {
        Self {
            a: [[0.985, 0.035, 0.005], [0.012, 0.943, 0.050], [0.003, 0.022, 0.945]],
        }
    }

    /// Column `j` from the classified counts of prepared state `j`.
    pub fn from_counts(per_prepared: &[[u64; 3]; 3]) -> Result<Self> {
        let mut a = [[0.0; 3]; 3];
        for (j, counts) in per_prepared.iter().enumerate() {
            let total: u64 = counts.iter().sum();
            if total == 0 {
                return Err(Error::Invalid(format!("no calibration shots for prepared state {j}")));
            }
            for i in 0..3 {
                a[i][j] = counts[i] as f64 / total as f64;
            }
        }
        Ok(Self { a })
    }

    pub fn diagonal(&self) -> [f64; 3] {
        [self.a[0][0], self.a[1][1], self.a[2][2]]
    }

    fn to_na(self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.a[i][j])
    }

    /// 2-norm condition number; infinite when singular.
    pub fn condition_number(&self) -> f64 {
        let sv = self.to_na().singular_values();
        let (max, min) = (sv.max(), sv.min());
        if min <= 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// `A · p`.
    pub fn apply(&self, p: [f64; 3]) -> [f64; 3] {
        let v = self.to_na() * Vector3::from(p);
        [v[0], v[1], v[2]]
    }

    /// Classified counts for `p` after `shots` measurements.
    pub fn sample(&self, p: [f64; 3], shots: u64, seed: u64) -> Result<ShotCounts> {
        apply_confusion(p, self, shots, seed)
    }
}

/// Samples `shots` readouts of a state with outcome distribution `p` through `a`.
pub fn apply_confusion(p: [f64; 3], a: &ConfusionMatrix, shots: u64, seed: u64) -> Result<ShotCounts> {
    super::sampling::sample_counts(a.apply(p), shots, seed)
}

/// Reassigns already-measured counts: every shot in true bin `j` lands in bin `i` with
/// probability `a[i][j]`.
pub fn confuse_counts(counts: &ShotCounts, a: &ConfusionMatrix, seed: u64) -> Result<ShotCounts> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = [0u64; 3];
    for j in 0..3 {
        let column = [a.a[0][j], a.a[1][j], a.a[2][j]];
        let moved = sample_counts_with(column, counts.counts[j], &mut rng)?;
        for i in 0..3 {
            out[i] += moved[i];
        }
    }
    Ok(ShotCounts {
        counts: out,
        shots: counts.shots,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mitigated {
    /// Clipped and renormalised estimate.
    pub probs: [f64; 3],
    /// `A⁻¹ f` before clipping; may leave the simplex.
    pub raw: [f64; 3],
    pub condition: f64,
    /// Condition number above [`ILL_CONDITIONED`].
    pub ill_conditioned: bool,
}

/// Inverts the readout confusion on observed frequencies, clips negatives and renormalises.
pub fn mitigate(freqs: [f64; 3], a: &ConfusionMatrix) -> Result<Mitigated> {
    let inv = a
        .to_na()
        .try_inverse()
        .ok_or_else(|| Error::numeric("confusion matrix is singular", f64::INFINITY))?;
    let raw_v = inv * Vector3::from(freqs);
    let raw = [raw_v[0], raw_v[1], raw_v[2]];
    let clipped = raw.map(|x| x.max(0.0));
    let s: f64 = clipped.iter().sum();
    let probs = if s > 0.0 {
        clipped.map(|x| x / s)
    } else {
        [1.0 / 3.0; 3]
    };
    let condition = a.condition_number();
    Ok(Mitigated {
        probs,
        raw,
        condition,
        ill_conditioned: condition > ILL_CONDITIONED,
    })
}
