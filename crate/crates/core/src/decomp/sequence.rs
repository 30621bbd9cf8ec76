use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::alphas::AlphaAngles;
use super::givens::{GivensGate, Subspace};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix3;
use crate::pmns::{EvolutionPhases, OscillationParams};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Vacuum,
    Matter,
    Cp,
}

impl Scenario {
    pub fn label(self) -> &'static str {
        match self {
            Scenario::Vacuum => "vacuum",
            Scenario::Matter => "matter",
            Scenario::Cp => "cp",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vacuum" => Ok(Scenario::Vacuum),
            "matter" => Ok(Scenario::Matter),
            "cp" => Ok(Scenario::Cp),
            other => Err(Error::Invalid(format!("unknown scenario {other:?}"))),
        }
    }
}

/// Compilation provenance carried alongside a gate list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceMeta<T> {
    pub alphas: Option<AlphaAngles<T>>,
    /// Parameters the angles were derived from (hatted ones for the matter scenario).
    pub params: Option<OscillationParams<T>>,
    pub vm: T,
    pub phases: Option<EvolutionPhases<T>>,
}

impl<T: Real> Default for SequenceMeta<T> {
    fn default() -> Self {
        Self {
            alphas: None,
            params: None,
            vm: T::zero(),
            phases: None,
        }
    }
}

/// Ordered Givens rotations, stored in application order: `gates[0]` acts first.
///
/// Operator products written left-to-right (rightmost acts first) go through
/// [`GateSequence::from_operator_product`], which reverses them.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSequence<T> {
    pub gates: Vec<GivensGate<T>>,
    pub scenario: Scenario,
    pub meta: SequenceMeta<T>,
}

impl<T: Real> GateSequence<T> {
    pub fn new(scenario: Scenario, gates: Vec<GivensGate<T>>) -> Self {
        Self {
            gates,
            scenario,
            meta: SequenceMeta::default(),
        }
    }

    pub fn empty(scenario: Scenario) -> Self {
        Self::new(scenario, Vec::new())
    }

    /// Builds a sequence from a product written as `G_k ⋯ G_2 G_1`.
    pub fn from_operator_product(scenario: Scenario, product: Vec<GivensGate<T>>) -> Self {
        let mut gates = product;
        gates.reverse();
        Self::new(scenario, gates)
    }

    /// Gates in written operator order (last-applied first).
    pub fn operator_product(&self) -> Vec<GivensGate<T>> {
        self.gates.iter().rev().copied().collect()
    }

    pub fn with_meta(mut self, meta: SequenceMeta<T>) -> Self {
        self.meta = meta;
        self
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Inverse sequence: reversed order, negated angles.
    pub fn inverse(&self) -> Self {
        let gates = self.gates.iter().rev().map(GivensGate::inverse).collect();
        Self {
            gates,
            scenario: self.scenario,
            meta: self.meta,
        }
    }

    pub fn cast<U: Real>(&self) -> GateSequence<U> {
        GateSequence::new(self.scenario, self.gates.iter().map(GivensGate::cast).collect())
    }
}

/// Matrix of a sequence: `G_n ⋯ G_2 G_1` for gates stored in application order.
pub fn reconstruct<T: Real>(seq: &GateSequence<T>) -> ComplexMatrix3<T> {
    seq.gates
        .iter()
        .fold(ComplexMatrix3::identity(), |acc, g| g.matrix() * acc)
}

/// Fuses neighbouring gates that share subspace and axis by adding their angles.
///
/// Gates with different axes never fuse. Axes are compared modulo 2π with tolerance `1e-12`.
pub fn merge_adjacent<T: Real>(gates: &[GivensGate<T>]) -> Vec<GivensGate<T>> {
    let tol = T::lit(1e-12);
    let mut out: Vec<GivensGate<T>> = Vec::with_capacity(gates.len());
    for g in gates {
        if let Some(last) = out.last_mut() {
            if last.subspace == g.subspace && (last.phi - g.phi).wrap_angle().abs() < tol {
                *last = GivensGate::new(last.subspace, last.phi, last.theta + g.theta);
                continue;
            }
        }
        out.push(*g);
    }
    out
}

// ---- stable on-disk form -------------------------------------------------------------------

pub const GATE_FILE_FORMAT: &str = "nuqutrit-gates/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateRecord {
    pub subspace: Subspace,
    pub phi_rad: f64,
    pub theta_rad: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SequenceMetaRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta12_rad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta23_rad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta13_rad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_rad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dm2_21_ev2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dm2_31_ev2: Option<f64>,
    pub vm_ev2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi01_rad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi12_rad: Option<f64>,
}

/// JSON gate-sequence file. `order` is always `"application"`: the first record acts first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSequenceFile {
    pub format: String,
    pub order: String,
    pub scenario: Scenario,
    pub metadata: SequenceMetaRecord,
    pub gates: Vec<GateRecord>,
}

impl GateSequence<f64> {
    pub fn to_file(&self) -> GateSequenceFile {
        let a = self.meta.alphas;
        let p = self.meta.params;
        let ph = self.meta.phases;
        GateSequenceFile {
            format: GATE_FILE_FORMAT.to_string(),
            order: "application".to_string(),
            scenario: self.scenario,
            metadata: SequenceMetaRecord {
                alpha1: a.map(|a| a.alpha1),
                alpha2: a.map(|a| a.alpha2),
                alpha3: a.map(|a| a.alpha3),
                theta12_rad: p.map(|p| p.theta12),
                theta23_rad: p.map(|p| p.theta23),
                theta13_rad: p.map(|p| p.theta13),
                delta_rad: p.map(|p| p.delta),
                dm2_21_ev2: p.map(|p| p.dm2_21),
                dm2_31_ev2: p.map(|p| p.dm2_31),
                vm_ev2: self.meta.vm,
                phi01_rad: ph.map(|p| p.phi01),
                phi12_rad: ph.map(|p| p.phi12),
            },
            gates: self
                .gates
                .iter()
                .map(|g| GateRecord {
                    subspace: g.subspace,
                    phi_rad: g.phi,
                    theta_rad: g.theta,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("gate file serialize")
    }

    pub fn from_file(f: &GateSequenceFile) -> Result<Self> {
        if f.format != GATE_FILE_FORMAT {
            return Err(Error::Invalid(format!("unsupported gate file format {:?}", f.format)));
        }
        let mut gates: Vec<GivensGate<f64>> = f
            .gates
            .iter()
            .map(|g| GivensGate::new(g.subspace, g.phi_rad, g.theta_rad))
            .collect();
        match f.order.as_str() {
            "application" => {}
            "operator" => gates.reverse(),
            other => return Err(Error::Invalid(format!("unknown gate order {other:?}"))),
        }
        let m = &f.metadata;
        let alphas = match (m.alpha1, m.alpha2, m.alpha3) {
            (Some(a1), Some(a2), Some(a3)) => Some(AlphaAngles::from_values(a1, a2, a3)),
            _ => None,
        };
        let params = match (
            m.theta12_rad,
            m.theta23_rad,
            m.theta13_rad,
            m.delta_rad,
            m.dm2_21_ev2,
            m.dm2_31_ev2,
        ) {
            (Some(t12), Some(t23), Some(t13), Some(d), Some(m21), Some(m31)) => {
                Some(OscillationParams {
                    theta12: t12,
                    theta23: t23,
                    theta13: t13,
                    delta: d,
                    dm2_21: m21,
                    dm2_31: m31,
                })
            }
            _ => None,
        };
        let phases = match (m.phi01_rad, m.phi12_rad) {
            (Some(phi01), Some(phi12)) => Some(EvolutionPhases { phi01, phi12 }),
            _ => None,
        };
        Ok(GateSequence {
            gates,
            scenario: f.scenario,
            meta: SequenceMeta {
                alphas,
                params,
                vm: m.vm_ev2,
                phases,
            },
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: GateSequenceFile = serde_json::from_str(s)?;
        Self::from_file(&f)
    }
}

/// Counts gates per subspace.
pub fn subspace_counts<T: Real>(seq: &GateSequence<T>) -> (usize, usize) {
    let n01 = seq.gates.iter().filter(|g| g.subspace == Subspace::S01).count();
    (n01, seq.gates.len() - n01)
}
