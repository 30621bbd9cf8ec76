//! Matter-effective ("hatted") mixing parameters from the zeroth-order rediagonalisation of the
//! constant-density Hamiltonian.

use super::params::OscillationParams;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest Wolfenstein potential (eV²) the approximation is accepted for.
pub const MAX_VALIDATED_VM: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatterParams<T> {
    pub vm: T,
    pub theta12_hat: T,
    pub theta13_hat: T,
    pub theta23_hat: T,
    pub dm2_21_hat: T,
    pub dm2_31_hat: T,
    pub dm2_ee: T,
    pub dm2_ee_hat: T,
    pub a12: T,
}

impl<T: Real> MatterParams<T> {
    /// Vacuum parameters with the hatted angles and splittings substituted; δ is carried over.
    pub fn effective(&self, vacuum: &OscillationParams<T>) -> OscillationParams<T> {
        OscillationParams {
            theta12: self.theta12_hat,
            theta23: self.theta23_hat,
            theta13: self.theta13_hat,
            delta: vacuum.delta,
            dm2_21: self.dm2_21_hat,
            dm2_31: self.dm2_31_hat,
        }
    }
}

fn clamped_sqrt<T: Real>(x: T, what: &str) -> Result<T> {
    let tol = T::lit(1e-12);
    if x < -tol {
        return Err(Error::domain(format!("negative square-root argument for {what}: {x}")));
    }
    Ok(x.max(T::zero()).sqrt())
}

fn asin_unit<T: Real>(x: T, what: &str) -> Result<T> {
    let tol = T::lit(1e-12);
    if x > T::one() + tol {
        return Err(Error::domain(format!("sine out of range for {what}: {x}")));
    }
    Ok(x.min(T::one()).asin())
}

/// Computes the matter-effective parameters for Wolfenstein potential `vm` (eV²).
///
/// `vm` must lie in `[0, 1e-2]` eV².
pub fn matter_effective_params<T: Real>(
    p: &OscillationParams<T>,
    vm: T,
) -> Result<MatterParams<T>> {
    p.validate()?;
    if !(vm >= T::zero() && vm <= T::lit(MAX_VALIDATED_VM)) {
        return Err(Error::domain(format!(
            "matter potential {vm} eV^2 outside validated window [0, {MAX_VALIDATED_VM}]"
        )));
    }
    if p.dm2_21 == T::zero() {
        return Err(Error::domain("dm2_21 must be nonzero"));
    }
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let cos2_12 = (two * p.theta12).cos();
    let sin2_12 = (two * p.theta12).sin();
    let cos2_13 = (two * p.theta13).cos();
    let sin2_13 = (two * p.theta13).sin();

    let dm2_ee = p.dm2_ee();
    let dm2_ee_hat = dm2_ee * ((cos2_13 - vm / dm2_ee).powi(2) + sin2_13 * sin2_13).sqrt();
    let s13_hat = clamped_sqrt(
        half - (dm2_ee * cos2_13 - vm) / (two * dm2_ee_hat),
        "sin(theta13_hat)",
    )?;
    let theta13_hat = asin_unit(s13_hat, "theta13_hat")?;

    let a12 = half * (vm + dm2_ee - dm2_ee_hat);
    let c13_diff = (p.theta13 - theta13_hat).cos();
    let dm2_21_hat = p.dm2_21
        * ((cos2_12 - a12 / p.dm2_21).powi(2) + c13_diff * c13_diff * sin2_12 * sin2_12).sqrt();
    let s12_hat = clamped_sqrt(
        half - (p.dm2_21 * cos2_12 - a12) / (two * dm2_21_hat),
        "sin(theta12_hat)",
    )?;
    let theta12_hat = asin_unit(s12_hat, "theta12_hat")?;

    let dm2_31_hat = p.dm2_31
        + T::lit(0.25) * vm
        + half * (dm2_21_hat - p.dm2_21)
        + T::lit(0.75) * (dm2_ee_hat - dm2_ee);

    Ok(MatterParams {
        vm,
        theta12_hat,
        theta13_hat,
        theta23_hat: p.theta23,
        dm2_21_hat,
        dm2_31_hat,
        dm2_ee,
        dm2_ee_hat,
        a12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fields(m: &MatterParams<f64>) -> [f64; 8] {
        [
            m.theta12_hat,
            m.theta13_hat,
            m.theta23_hat,
            m.dm2_21_hat,
            m.dm2_31_hat,
            m.dm2_ee,
            m.dm2_ee_hat,
            m.a12,
        ]
    }

    #[test]
    fn zero_potential_reproduces_vacuum() {
        let p = OscillationParams::<f64>::nufit();
        let m = matter_effective_params(&p, 0.0).unwrap();
        assert!((m.theta12_hat - p.theta12).abs() < 1e-12);
        assert!((m.theta13_hat - p.theta13).abs() < 1e-12);
        assert_eq!(m.theta23_hat, p.theta23);
        assert!((m.dm2_21_hat - p.dm2_21).abs() < 1e-18);
        assert!((m.dm2_31_hat - p.dm2_31).abs() < 1e-18);
        assert!(m.a12.abs() < 1e-18);
        assert!((m.dm2_ee_hat - m.dm2_ee).abs() < 1e-18);
    }

    #[test]
    fn effective_splitting_matches_direct_formula() {
        let p = OscillationParams::<f64>::nufit();
        let m = matter_effective_params(&p, 0.0).unwrap();
        let (s, c) = p.theta12.sin_cos();
        let direct = c * c * p.dm2_31 + s * s * (p.dm2_31 - p.dm2_21);
        assert!((m.dm2_ee - direct).abs() < 1e-18);
        assert!((m.dm2_ee - 2.487e-3).abs() < 1e-6);
    }

    #[test]
    fn small_potential_is_continuous() {
        let p = OscillationParams::<f64>::nufit();
        let a = fields(&matter_effective_params(&p, 0.0).unwrap());
        let b = fields(&matter_effective_params(&p, 1e-12).unwrap());
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).abs() < 1e-6, "{x} vs {y}");
        }
    }

    #[test]
    fn rejects_potential_outside_window() {
        let p = OscillationParams::<f64>::nufit();
        assert!(matter_effective_params(&p, -1e-6).is_err());
        assert!(matter_effective_params(&p, 2e-2).is_err());
        assert!(matter_effective_params(&p, f64::NAN).is_err());
        assert!(matter_effective_params(&p, 1e-2).is_ok());
    }

    #[test]
    fn theta23_is_untouched() {
        let p = OscillationParams::<f64>::nufit();
        for vm in [1e-5, 1e-4, 1e-3, 1e-2] {
            assert_eq!(matter_effective_params(&p, vm).unwrap().theta23_hat, p.theta23);
        }
    }

    #[test]
    fn generic_over_f32() {
        let p = OscillationParams::<f32>::nufit();
        let m = matter_effective_params(&p, 1e-4_f32).unwrap();
        let m64 = matter_effective_params(&p.cast::<f64>(), 1e-4).unwrap();
        assert!((m.theta12_hat as f64 - m64.theta12_hat).abs() < 1e-4);
    }
}
