use num_complex::Complex;
use num_traits::{One, Zero};

use super::matter::matter_effective_params;
use super::mixing::build_pmns;
use super::params::{Baseline, Flavor, OscillationParams};
use crate::error::Result;
use crate::matrix::ComplexMatrix3;
use crate::scalar::{cis, Real};

/// Subspace phases of the time operator `Λ = diag(1, e^{iΦ⁰¹}, e^{i(Φ⁰¹+Φ¹²)})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionPhases<T> {
    /// `Φ⁰¹ = −Δm²₂₁ L / 2E`
    pub phi01: T,
    /// `Φ¹² = −Δm²₃₂ L / 2E`
    pub phi12: T,
}

impl<T: Real> EvolutionPhases<T> {
    pub fn zero() -> Self {
        Self {
            phi01: T::zero(),
            phi12: T::zero(),
        }
    }

    /// `Λ` with the lightest state carrying phase 1.
    pub fn lambda(&self) -> ComplexMatrix3<T> {
        ComplexMatrix3::diagonal([Complex::one(), cis(self.phi01), cis(self.phi01 + self.phi12)])
    }
}

/// Evolution phases for the splittings in `p` (pass matter-effective parameters for the hatted phases).
pub fn evolution_phases<T: Real>(p: &OscillationParams<T>, baseline: &Baseline<T>) -> EvolutionPhases<T> {
    EvolutionPhases {
        phi01: -baseline.phase(p.dm2_21),
        phi12: -baseline.phase(p.dm2_32()),
    }
}

/// Flavor-basis propagator `U Λ U†`.
pub fn evolution_operator<T: Real>(p: &OscillationParams<T>, baseline: &Baseline<T>) -> ComplexMatrix3<T> {
    let u = build_pmns(p);
    u * evolution_phases(p, baseline).lambda() * u.adjoint()
}

/// Parameters that actually drive propagation: vacuum values for `vm == 0`, hatted ones otherwise.
pub fn propagation_params<T: Real>(p: &OscillationParams<T>, vm: T) -> Result<OscillationParams<T>> {
    if vm == T::zero() {
        p.validate()?;
        return Ok(*p);
    }
    Ok(matter_effective_params(p, vm)?.effective(p))
}

/// All nine transition probabilities, indexed `[initial][final]`.
pub fn probability_table<T: Real>(
    p: &OscillationParams<T>,
    vm: T,
    baseline: &Baseline<T>,
) -> Result<[[T; 3]; 3]> {
    let eff = propagation_params(p, vm)?;
    let u = build_pmns(&eff);
    let ph = evolution_phases(&eff, baseline);
    let masses = [Complex::one(), cis(ph.phi01), cis(ph.phi01 + ph.phi12)];
    let mut out = [[T::zero(); 3]; 3];
    for (alpha, row) in out.iter_mut().enumerate() {
        for (beta, slot) in row.iter_mut().enumerate() {
            // Σ_i U*_{αi} U_{βi} e^{-i m_i² L/2E}
            let amp = (0..3).fold(Complex::zero(), |acc, i| {
                acc + u.m[alpha][i].conj() * u.m[beta][i] * masses[i]
            });
            *slot = amp.norm_sqr();
        }
    }
    Ok(out)
}

/// `P(α → β)` at the given baseline; matter-effective parameters are used when `vm > 0`.
pub fn oscillation_probability<T: Real>(
    p: &OscillationParams<T>,
    vm: T,
    alpha: Flavor,
    beta: Flavor,
    baseline: &Baseline<T>,
) -> Result<T> {
    Ok(probability_table(p, vm, baseline)?[alpha.index()][beta.index()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_distance_gives_zero_phases() {
        let p = OscillationParams::<f64>::nufit();
        let b = Baseline::new(0.0, 1.0).unwrap();
        assert_eq!(evolution_phases(&p, &b), EvolutionPhases::zero());
        assert!((evolution_operator(&p, &b) - ComplexMatrix3::identity()).max_abs() < 1e-14);
    }

    #[test]
    fn full_solar_period_length() {
        let p = OscillationParams::<f64>::nufit();
        let l_over_e = 2.0 * PI / (2.0 * 1.26693 * p.dm2_21);
        let ph = evolution_phases(&p, &Baseline::from_l_over_e(l_over_e).unwrap());
        assert!((ph.phi01 + 2.0 * PI).abs() < 1e-12);
        assert!((l_over_e - 3.34e4).abs() / 3.34e4 < 1e-3);
    }

    #[test]
    fn phases_are_linear_in_distance() {
        let p = OscillationParams::<f64>::nufit();
        let a = evolution_phases(&p, &Baseline::new(100.0, 0.7).unwrap());
        let b = evolution_phases(&p, &Baseline::new(200.0, 0.7).unwrap());
        assert!((2.0 * a.phi01 - b.phi01).abs() < 1e-12);
        assert!((2.0 * a.phi12 - b.phi12).abs() < 1e-12);
    }

    #[test]
    fn zero_distance_probability_is_kronecker() {
        let p = OscillationParams::<f64>::nufit().with_delta(0.7);
        let b = Baseline::new(0.0, 1.0).unwrap();
        for vm in [0.0, 1e-3] {
            let t = probability_table(&p, vm, &b).unwrap();
            for a in 0..3 {
                for c in 0..3 {
                    let want = if a == c { 1.0 } else { 0.0 };
                    assert!((t[a][c] - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn t2k_appearance_first_maximum() {
        // frozen from an independent 30-digit evaluation of the Σ_i U*_{αi} U_{βi} e^{-i m_i² L/2E} sum
        let p = OscillationParams::<f64>::nufit().with_delta(-PI / 2.0);
        let b = Baseline::new(295.0, 0.6).unwrap();
        let pme = oscillation_probability(&p, 0.0, Flavor::Mu, Flavor::E, &b).unwrap();
        assert!((pme - 0.052_770_586_442_203_66).abs() < 1e-12, "{pme}");
        let p0 = oscillation_probability(&p.with_delta(0.0), 0.0, Flavor::Mu, Flavor::E, &b).unwrap();
        assert!((p0 - 0.040_887_936_518_218_42).abs() < 1e-12, "{p0}");
        let pp = oscillation_probability(&p.with_delta(PI / 2.0), 0.0, Flavor::Mu, Flavor::E, &b).unwrap();
        assert!((pp - 0.028_027_656_405_317_44).abs() < 1e-12, "{pp}");
    }

    #[test]
    fn real_mixing_is_time_reversal_symmetric() {
        let p = OscillationParams::<f64>::nufit();
        for l in [10.0, 295.0, 1300.0, 12000.0] {
            let b = Baseline::new(l, 0.8).unwrap();
            let me = oscillation_probability(&p, 0.0, Flavor::Mu, Flavor::E, &b).unwrap();
            let em = oscillation_probability(&p, 0.0, Flavor::E, Flavor::Mu, &b).unwrap();
            assert!((me - em).abs() < 1e-13);
        }
    }

    #[test]
    fn f32_tracks_f64() {
        let p = OscillationParams::<f32>::nufit().with_delta(1.0);
        let b = Baseline::new(295.0_f32, 0.6).unwrap();
        let t32 = probability_table(&p, 0.0, &b).unwrap();
        let t64 = probability_table(&p.cast::<f64>(), 0.0, &Baseline::new(295.0, 0.6).unwrap()).unwrap();
        for a in 0..3 {
            for c in 0..3 {
                assert!((t32[a][c] as f64 - t64[a][c]).abs() < 1e-5);
            }
        }
    }
}
