use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Oscillation phase in radians per (eV² · km / GeV): `Δm² L / 2E = K · Δm²[eV²] · L[km] / E[GeV]`.
///
/// This is twice the familiar 1.26693 of `Δm² L / 4E`.
pub const PHASE_RAD_PER_EV2_KM_PER_GEV: f64 = 2.0 * 1.26693;

/// Neutrino flavor, mapped onto qutrit levels `|0⟩, |1⟩, |2⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    #[serde(alias = "nue", alias = "electron")]
    E,
    #[serde(alias = "numu", alias = "muon")]
    Mu,
    #[serde(alias = "nutau", alias = "tauon")]
    Tau,
}

impl Flavor {
    pub const ALL: [Flavor; 3] = [Flavor::E, Flavor::Mu, Flavor::Tau];

    /// Qutrit level encoding this flavor.
    pub fn index(self) -> usize {
        match self {
            Flavor::E => 0,
            Flavor::Mu => 1,
            Flavor::Tau => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            Flavor::E => "e",
            Flavor::Mu => "mu",
            Flavor::Tau => "tau",
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "e" | "nue" | "electron" | "0" => Ok(Flavor::E),
            "mu" | "numu" | "muon" | "1" => Ok(Flavor::Mu),
            "tau" | "nutau" | "tauon" | "2" => Ok(Flavor::Tau),
            other => Err(Error::Invalid(format!("unknown flavor {other:?}"))),
        }
    }
}

/// Mixing angles, CP phase and mass-squared splittings.
///
/// Angles and phase are in radians, splittings in eV². `dm2_31` may be negative (inverted ordering).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillationParams<T> {
    pub theta12: T,
    pub theta23: T,
    pub theta13: T,
    pub delta: T,
    pub dm2_21: T,
    pub dm2_31: T,
}

impl<T: Real> OscillationParams<T> {
    /// Normal-ordering global-fit values used throughout: θ₁₂ = 33.45°, θ₂₃ = 42.1°, θ₁₃ = 8.62°,
    /// Δm²₂₁ = 7.42e-5 eV², Δm²₃₁ = 2.510e-3 eV², δ = 0.
    pub fn nufit() -> Self {
        let deg = T::PI() / T::lit(180.0);
        Self {
            theta12: T::lit(33.45) * deg,
            theta23: T::lit(42.1) * deg,
            theta13: T::lit(8.62) * deg,
            delta: T::zero(),
            dm2_21: T::lit(7.42e-5),
            dm2_31: T::lit(2.510e-3),
        }
    }

    pub fn with_delta(mut self, delta: T) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_angles(mut self, theta12: T, theta23: T, theta13: T) -> Self {
        self.theta12 = theta12;
        self.theta23 = theta23;
        self.theta13 = theta13;
        self
    }

    /// `Δm²₃₂ = Δm²₃₁ − Δm²₂₁`.
    pub fn dm2_32(&self) -> T {
        self.dm2_31 - self.dm2_21
    }

    /// Effective splitting `Δm²_ee = c₁₂² Δm²₃₁ + s₁₂² Δm²₃₂`.
    pub fn dm2_ee(&self) -> T {
        let c = self.theta12.cos();
        let s = self.theta12.sin();
        c * c * self.dm2_31 + s * s * self.dm2_32()
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.theta12,
            self.theta23,
            self.theta13,
            self.delta,
            self.dm2_21,
            self.dm2_31,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("oscillation parameters must be finite"));
        }
        Ok(())
    }

    pub fn cast<U: Real>(&self) -> OscillationParams<U> {
        OscillationParams {
            theta12: U::lit(self.theta12.to_f64_lossy()),
            theta23: U::lit(self.theta23.to_f64_lossy()),
            theta13: U::lit(self.theta13.to_f64_lossy()),
            delta: U::lit(self.delta.to_f64_lossy()),
            dm2_21: U::lit(self.dm2_21.to_f64_lossy()),
            dm2_31: U::lit(self.dm2_31.to_f64_lossy()),
        }
    }
}

impl<T: Real> Default for OscillationParams<T> {
    fn default() -> Self {
        Self::nufit()
    }
}

/// On-disk parameter file. Angles in degrees; missing keys take the global-fit defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsFile {
    pub theta12_deg: f64,
    pub theta23_deg: f64,
    pub theta13_deg: f64,
    pub delta_deg: f64,
    pub dm2_21_ev2: f64,
    pub dm2_31_ev2: f64,
}

impl Default for ParamsFile {
    fn default() -> Self {
        Self {
            theta12_deg: 33.45,
            theta23_deg: 42.1,
            theta13_deg: 8.62,
            delta_deg: 0.0,
            dm2_21_ev2: 7.42e-5,
            dm2_31_ev2: 2.510e-3,
        }
    }
}

impl ParamsFile {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("params serialize")
    }

    pub fn to_params(&self) -> Result<OscillationParams<f64>> {
        let p = OscillationParams {
            theta12: self.theta12_deg.to_radians(),
            theta23: self.theta23_deg.to_radians(),
            theta13: self.theta13_deg.to_radians(),
            delta: self.delta_deg.to_radians(),
            dm2_21: self.dm2_21_ev2,
            dm2_31: self.dm2_31_ev2,
        };
        p.validate()?;
        Ok(p)
    }
}

impl From<&OscillationParams<f64>> for ParamsFile {
    fn from(p: &OscillationParams<f64>) -> Self {
        Self {
            theta12_deg: p.theta12.to_degrees(),
            theta23_deg: p.theta23.to_degrees(),
            theta13_deg: p.theta13.to_degrees(),
            delta_deg: p.delta.to_degrees(),
            dm2_21_ev2: p.dm2_21,
            dm2_31_ev2: p.dm2_31,
        }
    }
}

/// Propagation baseline: distance in km and energy in GeV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Baseline<T> {
    l_km: T,
    e_gev: T,
}

impl<T: Real> Baseline<T> {
    pub fn new(l_km: T, e_gev: T) -> Result<Self> {
        if !(e_gev > T::zero()) || !e_gev.is_finite() {
            return Err(Error::domain(format!("energy must be positive, got {e_gev}")));
        }
        if !(l_km >= T::zero()) || !l_km.is_finite() {
            return Err(Error::domain(format!("distance must be nonnegative, got {l_km}")));
        }
        Ok(Self { l_km, e_gev })
    }

    /// Baseline given directly as L/E in km/GeV (taken at E = 1 GeV).
    pub fn from_l_over_e(l_over_e: T) -> Result<Self> {
        Self::new(l_over_e, T::one())
    }

    pub fn l_km(&self) -> T {
        self.l_km
    }

    pub fn e_gev(&self) -> T {
        self.e_gev
    }

    pub fn l_over_e(&self) -> T {
        self.l_km / self.e_gev
    }

    /// Phase `Δm² L / 2E` in radians for a splitting in eV².
    pub fn phase(&self, dm2: T) -> T {
        T::lit(PHASE_RAD_PER_EV2_KM_PER_GEV) * dm2 * self.l_over_e()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flavor_round_trip() {
        for f in Flavor::ALL {
            assert_eq!(Flavor::from_index(f.index()), Some(f));
            assert_eq!(f.label().parse::<Flavor>().unwrap(), f);
        }
        assert!("x".parse::<Flavor>().is_err());
    }

    #[test]
    fn params_file_defaults_are_global_fit() {
        let p = ParamsFile::from_json("{}").unwrap().to_params().unwrap();
        let d = OscillationParams::<f64>::nufit();
        assert!((p.theta12 - d.theta12).abs() < 1e-15);
        assert!((p.theta23 - d.theta23).abs() < 1e-15);
        assert!((p.theta13 - d.theta13).abs() < 1e-15);
        assert_eq!(p.dm2_21, d.dm2_21);
        assert_eq!(p.dm2_31, d.dm2_31);
    }

    #[test]
    fn params_file_rejects_unknown_keys() {
        assert!(ParamsFile::from_json(r#"{"theta_12": 1.0}"#).is_err());
    }

    #[test]
    fn baseline_rejects_nonpositive_energy() {
        assert!(Baseline::new(10.0, 0.0).is_err());
        assert!(Baseline::new(10.0, -1.0).is_err());
        assert!(Baseline::new(-1.0, 1.0).is_err());
        assert!(Baseline::new(0.0, 1.0).is_ok());
    }
}
