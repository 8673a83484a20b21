//! Two-point stepsizes: the structured secant vector, the SSGM and BB
//! quotients, negative-curvature safeguards and the final clamp.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vecops::dot;

/// Default retard factor `δ` for [`SafeguardStrategy::Retard`].
pub const DEFAULT_RETARD: f64 = 0.5;
/// Default `β` for [`SafeguardStrategy::StructuredTau`].
pub const DEFAULT_BETA: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum StepsizeError {
    #[error("degenerate stepsize denominator")]
    DegenerateDenominator,
    #[error("zero displacement between iterates")]
    Stagnation,
    #[error("zero secant vector")]
    DegenerateSecant,
}

/// Displacement `s = xₖ − xₖ₋₁` paired with a secant vector, plus the
/// scalars every stepsize formula needs.
///
/// For the structured rules the secant vector is `z`; for the BB rules it is
/// the gradient difference `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepPair {
    s: Vec<f64>,
    z: Vec<f64>,
    s_dot_z: f64,
    s_sq: f64,
    z_sq: f64,
    s_norm: f64,
    z_norm: f64,
}

impl StepPair {
    pub fn new(s: Vec<f64>, z: Vec<f64>) -> Self {
        assert_eq!(s.len(), z.len(), "s and z must have equal length");
        let s_dot_z = dot(&s, &z);
        let s_sq = dot(&s, &s);
        let z_sq = dot(&z, &z);
        Self {
            s,
            z,
            s_dot_z,
            s_sq,
            z_sq,
            s_norm: s_sq.sqrt(),
            z_norm: z_sq.sqrt(),
        }
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn s_dot_z(&self) -> f64 {
        self.s_dot_z
    }

    pub fn s_norm(&self) -> f64 {
        self.s_norm
    }

    pub fn z_norm(&self) -> f64 {
        self.z_norm
    }

    /// `sᵀz ≤ 0` (NaN counts as non-positive).
    pub fn negative_curvature(&self) -> bool {
        !(self.s_dot_z > 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepsizeRule {
    /// `sᵀs / sᵀz`
    Ssgm1,
    /// `sᵀz / zᵀz`
    Ssgm2,
    /// `sᵀs / sᵀy`
    Bb1,
    /// `sᵀy / yᵀy`
    Bb2,
}

impl StepsizeRule {
    pub const ALL: [StepsizeRule; 4] = [Self::Ssgm1, Self::Ssgm2, Self::Bb1, Self::Bb2];

    /// Whether the rule consumes the structured vector `z` (as opposed to `y`).
    pub fn is_structured(self) -> bool {
        matches!(self, Self::Ssgm1 | Self::Ssgm2)
    }

    /// First-kind rules have `sᵀz` in the denominator.
    fn is_first_kind(self) -> bool {
        matches!(self, Self::Ssgm1 | Self::Bb1)
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Ssgm1 => "SSGM1",
            Self::Ssgm2 => "SSGM2",
            Self::Bb1 => "BB1",
            Self::Bb2 => "BB2",
        }
    }
}

impl fmt::Display for StepsizeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for StepsizeRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ssgm1" => Ok(Self::Ssgm1),
            "ssgm2" => Ok(Self::Ssgm2),
            "bb1" => Ok(Self::Bb1),
            "bb2" => Ok(Self::Bb2),
            other => Err(format!("unknown stepsize rule `{other}`")),
        }
    }
}

/// What to do when `sᵀz ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SafeguardStrategy {
    /// Jump to `λ_max` (variant A).
    ClassicalMax,
    /// `δ · α_prev` (variant B).
    Retard { delta: f64 },
    /// Replace the offending term by `τ = max(β α_prev, sᵀz + ‖s‖‖z‖)`
    /// (variant C).
    StructuredTau { beta: f64 },
}

impl SafeguardStrategy {
    pub fn retard() -> Self {
        Self::Retard {
            delta: DEFAULT_RETARD,
        }
    }

    pub fn tau() -> Self {
        Self::StructuredTau { beta: DEFAULT_BETA }
    }

    /// The three variants with default parameters, in A/B/C order.
    pub fn defaults() -> [SafeguardStrategy; 3] {
        [Self::ClassicalMax, Self::retard(), Self::tau()]
    }

    /// Single-letter suffix: A, B or C.
    pub fn letter(&self) -> char {
        match self {
            Self::ClassicalMax => 'A',
            Self::Retard { .. } => 'B',
            Self::StructuredTau { .. } => 'C',
        }
    }

    pub fn is_valid(&self) -> bool {
        match *self {
            Self::ClassicalMax => true,
            Self::Retard { delta } => delta > 0.0 && delta.is_finite(),
            Self::StructuredTau { beta } => beta > 0.0 && beta.is_finite(),
        }
    }
}

/// Structured secant vector `z = 2gₖ − rₖ − rₖ₋₁` where `rₖ = Jₖᵀ Fₖ₋₁` and
/// `rₖ₋₁ = Jₖ₋₁ᵀ Fₖ`.
pub fn build_structured_vector(g_k: &[f64], r_k: &[f64], r_km1: &[f64]) -> Vec<f64> {
    assert!(
        g_k.len() == r_k.len() && g_k.len() == r_km1.len(),
        "structured vector inputs must have equal length"
    );
    g_k.iter()
        .zip(r_k)
        .zip(r_km1)
        .map(|((g, a), b)| 2.0 * g - a - b)
        .collect()
}

/// The unsafeguarded quotient. May be negative or non-finite.
pub fn raw_stepsize(rule: StepsizeRule, pair: &StepPair) -> Result<f64, StepsizeError> {
    if rule.is_first_kind() {
        if pair.s_dot_z == 0.0 {
            return Err(StepsizeError::DegenerateDenominator);
        }
        Ok(pair.s_sq / pair.s_dot_z)
    } else {
        if pair.z_sq == 0.0 {
            return Err(StepsizeError::DegenerateDenominator);
        }
        Ok(pair.s_dot_z / pair.z_sq)
    }
}

/// `τ = max(β α_prev, sᵀz + ‖s‖‖z‖)`.
pub fn safeguard_tau(pair: &StepPair, alpha_prev: f64, beta: f64) -> f64 {
    (beta * alpha_prev).max(pair.s_dot_z + pair.s_norm * pair.z_norm)
}

/// Stepsize with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stepsize {
    /// Pre-clamp value; `+∞` under [`SafeguardStrategy::ClassicalMax`].
    pub alpha: f64,
    pub safeguard_fired: bool,
}

/// Positive stepsize for the next iteration, before clamping.
///
/// The raw quotient is used whenever `sᵀz > 0`; otherwise the strategy
/// supplies a replacement.
pub fn compute_stepsize(
    rule: StepsizeRule,
    strategy: SafeguardStrategy,
    pair: &StepPair,
    alpha_prev: f64,
) -> Result<Stepsize, StepsizeError> {
    if pair.s_sq == 0.0 {
        return Err(StepsizeError::Stagnation);
    }
    if !pair.negative_curvature() {
        // sᵀz > 0 implies z ≠ 0, so neither quotient divides by zero.
        let alpha = raw_stepsize(rule, pair)?;
        return Ok(Stepsize {
            alpha,
            safeguard_fired: false,
        });
    }
    let alpha = match strategy {
        SafeguardStrategy::ClassicalMax => f64::INFINITY,
        SafeguardStrategy::Retard { delta } => delta * alpha_prev,
        SafeguardStrategy::StructuredTau { beta } => {
            let tau = safeguard_tau(pair, alpha_prev, beta);
            if rule.is_first_kind() {
                pair.s_sq / tau
            } else {
                if pair.z_sq == 0.0 {
                    return Err(StepsizeError::DegenerateSecant);
                }
                tau / pair.z_sq
            }
        }
    };
    Ok(Stepsize {
        alpha,
        safeguard_fired: true,
    })
}

/// `min(max(α, λ_min), λ_max)`; NaN and `−∞` map to `λ_min`.
pub fn clamp_lambda(alpha: f64, lambda_min: f64, lambda_max: f64) -> f64 {
    debug_assert!(0.0 < lambda_min && lambda_min <= lambda_max);
    if alpha.is_nan() {
        return lambda_min;
    }
    alpha.max(lambda_min).min(lambda_max)
}
