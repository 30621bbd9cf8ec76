use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-outcome counts of a measured qutrit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShotCounts {
    pub counts: [u64; 3],
    pub shots: u64,
    pub seed: u64,
}

impl ShotCounts {
    pub fn frequencies(&self) -> [f64; 3] {
        if self.shots == 0 {
            return [0.0; 3];
        }
        self.counts.map(|n| n as f64 / self.shots as f64)
    }

    /// Element-wise sum; the seed of `self` is kept.
    pub fn merge(&self, other: &ShotCounts) -> ShotCounts {
        ShotCounts {
            counts: [
                self.counts[0] + other.counts[0],
                self.counts[1] + other.counts[1],
                self.counts[2] + other.counts[2],
            ],
            shots: self.shots + other.shots,
            seed: self.seed,
        }
    }
}

/// Checks that `p` is a probability vector (tolerance 1e-9) and returns it clipped and renormalised.
pub fn validate_simplex(p: [f64; 3]) -> Result<[f64; 3]> {
    let tol = 1e-9;
    if p.iter().any(|x| !x.is_finite() || *x < -tol) {
        return Err(Error::Invalid(format!("not a probability vector: {p:?}")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(Error::Invalid(format!("probabilities sum to {sum}, not 1")));
    }
    let clipped = p.map(|x| x.max(0.0));
    let s: f64 = clipped.iter().sum();
    Ok(clipped.map(|x| x / s))
}

/// Draws a multinomial sample with the given generator (sequential conditional binomials).
pub fn sample_counts_with<R: Rng + ?Sized>(probs: [f64; 3], shots: u64, rng: &mut R) -> Result<[u64; 3]> {
    let p = validate_simplex(probs)?;
    let mut out = [0u64; 3];
    let mut remaining = shots;
    let mut mass = 1.0;
    for i in 0..2 {
        if remaining == 0 {
            break;
        }
        let q = if mass > 0.0 { (p[i] / mass).clamp(0.0, 1.0) } else { 0.0 };
        let n = Binomial::new(remaining, q)
            .map_err(|e| Error::Invalid(format!("binomial: {e}")))?
            .sample(rng);
        out[i] = n;
        remaining -= n;
        mass -= p[i];
    }
    out[2] = remaining;
    Ok(out)
}

/// Reproducible multinomial draw of `shots` outcomes from `probs`.
pub fn sample_counts(probs: [f64; 3], shots: u64, seed: u64) -> Result<ShotCounts> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = sample_counts_with(probs, shots, &mut rng)?;
    Ok(ShotCounts { counts, shots, seed })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and a path of indices (e.g. point, repeat).
///
/// Independent of evaluation order, so parallel and serial sweeps draw identical streams.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &i| splitmix64(acc ^ splitmix64(i.wrapping_add(0x632B_E59B_D9B4_E019))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_hot_fills_one_bin() {
        let c = sample_counts([0.0, 1.0, 0.0], 8192, 7).unwrap();
        assert_eq!(c.counts, [0, 8192, 0]);
    }

    #[test]
    fn same_seed_same_counts() {
        let p = [0.2, 0.5, 0.3];
        assert_eq!(sample_counts(p, 8192, 11).unwrap(), sample_counts(p, 8192, 11).unwrap());
        assert_ne!(
            sample_counts(p, 8192, 11).unwrap().counts,
            sample_counts(p, 8192, 12).unwrap().counts
        );
    }

    #[test]
    fn zero_shots_give_empty_counts() {
        let c = sample_counts([0.3, 0.3, 0.4], 0, 1).unwrap();
        assert_eq!(c.counts, [0, 0, 0]);
        assert_eq!(c.frequencies(), [0.0; 3]);
    }

    #[test]
    fn frequencies_within_four_sigma() {
        let p = [0.15, 0.6, 0.25];
        let n = 8192u64;
        for seed in 0..50 {
            let f = sample_counts(p, n, seed).unwrap().frequencies();
            for i in 0..3 {
                let sigma = (p[i] * (1.0 - p[i]) / n as f64).sqrt();
                assert!((f[i] - p[i]).abs() < 4.0 * sigma);
            }
        }
    }

    #[test]
    fn rejects_non_simplex() {
        assert!(sample_counts([0.5, 0.6, 0.0], 10, 0).is_err());
        assert!(sample_counts([-0.1, 0.6, 0.5], 10, 0).is_err());
    }

    #[test]
    fn derived_seeds_differ_by_path() {
        let a = derive_seed(1, &[0, 0]);
        assert_ne!(a, derive_seed(1, &[0, 1]));
        assert_ne!(a, derive_seed(1, &[1, 0]));
        assert_ne!(a, derive_seed(2, &[0, 0]));
        assert_eq!(a, derive_seed(1, &[0, 0]));
    }
}
