use super::givens::GivensGate;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix3;
use crate::pmns::{build_pmns, OscillationParams};
use crate::scalar::Real;

/// Below this the α₁/α₃ denominators vanish (θ₁₃ = θ₂₃ = 0) and those angles are set to zero.
const DEGENERATE_DENOMINATOR: f64 = 1e-12;

/// Rotation angles of the PMNS decomposition.
///
/// `negated[i]` records that the principal-branch value `2·arccos(cᵢ)` was flipped in sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaAngles<T> {
    pub alpha1: T,
    pub alpha2: T,
    pub alpha3: T,
    pub negated: [bool; 3],
}

impl<T: Real> AlphaAngles<T> {
    pub fn from_values(alpha1: T, alpha2: T, alpha3: T) -> Self {
        Self {
            alpha1,
            alpha2,
            alpha3,
            negated: [alpha1 < T::zero(), alpha2 < T::zero(), alpha3 < T::zero()],
        }
    }

    pub fn as_array(&self) -> [T; 3] {
        [self.alpha1, self.alpha2, self.alpha3]
    }

    /// `cos(αᵢ/2)` for the stored angles.
    pub fn half_cosines(&self) -> [T; 3] {
        let h = T::lit(0.5);
        [(self.alpha1 * h).cos(), (self.alpha2 * h).cos(), (self.alpha3 * h).cos()]
    }
}

fn clamp_unit<T: Real>(x: T, what: &str) -> Result<T> {
    if x.abs() > T::one() + T::lit(1e-9) || !x.is_finite() {
        return Err(Error::domain(format!("arccos argument for {what} out of range: {x}")));
    }
    Ok(x.max(-T::one()).min(T::one()))
}

/// Closed-form `cos(αᵢ/2)`:
///
/// ```text
/// cos(α₁/2) = −c₁₃ s₂₃ / √(1 − c₁₃² c₂₃²)
/// cos(α₂/2) =  c₁₃ c₂₃
/// cos(α₃/2) = −s₂₃ / √(1 − c₁₃² c₂₃²)
/// ```
///
/// Returns `None` for α₁ and α₃ when the denominator vanishes.
pub fn alpha_half_cosines<T: Real>(p: &OscillationParams<T>) -> Result<[Option<T>; 3]> {
    let (s23, c23) = p.theta23.sin_cos();
    let c13 = p.theta13.cos();
    let c2 = clamp_unit(c13 * c23, "alpha2")?;
    let den2 = T::one() - c13 * c13 * c23 * c23;
    if den2 < T::lit(DEGENERATE_DENOMINATOR) {
        return Ok([None, Some(c2), None]);
    }
    let den = den2.sqrt();
    let c1 = clamp_unit(-c13 * s23 / den, "alpha1")?;
    let c3 = clamp_unit(-s23 / den, "alpha3")?;
    Ok([Some(c1), Some(c2), Some(c3)])
}

/// `R = R⁰¹_{π/2+δ}(α₁) R¹²_{3π/2}(α₂) R⁰¹_{π/2+δ}(α₃) R⁰¹_{π/2}(−2θ₁₂)` in operator order.
pub(crate) fn pmns_operator_gates<T: Real>(
    a: &AlphaAngles<T>,
    theta12: T,
    delta: T,
) -> [GivensGate<T>; 4] {
    let half_pi = T::FRAC_PI_2();
    let three_half_pi = T::lit(3.0) * T::FRAC_PI_2();
    [
        GivensGate::r01(half_pi + delta, a.alpha1),
        GivensGate::r12(three_half_pi, a.alpha2),
        GivensGate::r01(half_pi + delta, a.alpha3),
        GivensGate::r01(half_pi, -T::lit(2.0) * theta12),
    ]
}

pub(crate) fn operator_product<T: Real>(gates: &[GivensGate<T>]) -> ComplexMatrix3<T> {
    gates
        .iter()
        .fold(ComplexMatrix3::identity(), |acc, g| acc * g.matrix())
}

/// Solves for the α angles of `p` (use hatted parameters for matter).
///
/// The arccos values fix `|αᵢ|`; the signs are chosen by trying all eight combinations
/// (all-positive first) and keeping the one whose gate product matches `build_pmns(p)` up to a
/// diagonal phase matrix. The δ axis offset takes part in the check, so the same branch serves
/// the CP template.
pub fn solve_alphas<T: Real>(p: &OscillationParams<T>) -> Result<AlphaAngles<T>> {
    p.validate()?;
    let cos = alpha_half_cosines(p)?;
    let two = T::lit(2.0);
    let principal = cos.map(|c| c.map_or(T::zero(), |c| two * c.acos()));
    let u = build_pmns(p);
    let mut best: Option<(T, AlphaAngles<T>)> = None;
    for mask in 0..8u8 {
        let negated = [mask & 1 != 0, mask & 2 != 0, mask & 4 != 0];
        if (0..3).any(|i| negated[i] && principal[i] == T::zero()) {
            continue;
        }
        let signed: Vec<T> = (0..3)
            .map(|i| if negated[i] { -principal[i] } else { principal[i] })
            .collect();
        let cand = AlphaAngles {
            alpha1: signed[0],
            alpha2: signed[1],
            alpha3: signed[2],
            negated,
        };
        let r = operator_product(&pmns_operator_gates(&cand, p.theta12, p.delta));
        let residual = (u * r.adjoint()).max_offdiag();
        if best.as_ref().map_or(true, |(b, _)| residual < *b) {
            best = Some((residual, cand));
        }
    }
    let (residual, alphas) = best.expect("at least one branch");
    if residual > T::epsilon().sqrt() {
        return Err(Error::numeric(
            "no sign branch reproduces the mixing matrix",
            residual.to_f64_lossy(),
        ));
    }
    Ok(alphas)
}
