//! TD errors and the (implicit) linear update.

use serde::{Deserialize, Serialize};

use super::projection::ParameterVector;
use super::schedule::effective_step_size;
use crate::error::{Error, Result};
use crate::features::FeatureVector;

/// Standard updates move by `β δ φ`; implicit updates evaluate the current
/// value at the next iterate, which works out to a move by `β̃ δ φ` with
/// `β̃ = β / (1 + β‖φ‖²)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateMode {
    Standard,
    Implicit,
}

impl UpdateMode {
    pub fn as_str(self) -> &'static str {
        match self {
            UpdateMode::Standard => "standard",
            UpdateMode::Implicit => "implicit",
        }
    }
}

fn check_dim(theta: &ParameterVector, phi: &FeatureVector, what: &str) -> Result<()> {
    if phi.len() != theta.len() {
        Err(Error::domain(format!(
            "{what} has dimension {}, weights have {}",
            phi.len(),
            theta.len()
        )))
    } else {
        Ok(())
    }
}

/// `R + γ max_a φ(S', a)ᵀθ`. An empty `next_features` marks a terminal
/// transition and drops the bootstrap term.
pub fn q_target(
    theta: &ParameterVector,
    reward: f64,
    next_features: &[FeatureVector],
    gamma: f64,
) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for phi in next_features {
        check_dim(theta, phi, "next-state feature")?;
        best = best.max(theta.dot(phi));
    }
    Ok(if next_features.is_empty() {
        reward
    } else {
        reward + gamma * best
    })
}

/// `δ^Q = R + γ max_a φ(S', a)ᵀθ − φ_tᵀθ`.
pub fn q_td_error(
    theta: &ParameterVector,
    phi_t: &FeatureVector,
    reward: f64,
    next_features: &[FeatureVector],
    gamma: f64,
) -> Result<f64> {
    check_dim(theta, phi_t, "current feature")?;
    Ok(q_target(theta, reward, next_features, gamma)? - theta.dot(phi_t))
}

/// `R + γ φ_{t+1}ᵀθ`.
pub fn sarsa_target(
    theta: &ParameterVector,
    reward: f64,
    phi_next: &FeatureVector,
    gamma: f64,
) -> Result<f64> {
    check_dim(theta, phi_next, "next feature")?;
    Ok(reward + gamma * theta.dot(phi_next))
}

/// `δ^S = R + γ φ_{t+1}ᵀθ − φ_tᵀθ`; pass a zero `phi_next` at terminal transitions.
pub fn sarsa_td_error(
    theta: &ParameterVector,
    phi_t: &FeatureVector,
    reward: f64,
    phi_next: &FeatureVector,
    gamma: f64,
) -> Result<f64> {
    check_dim(theta, phi_t, "current feature")?;
    Ok(sarsa_target(theta, reward, phi_next, gamma)? - theta.dot(phi_t))
}

/// In-place `θ ← Π_r[θ + α δ φ_t]` where `α = β` (standard) or `β̃` (implicit).
///
/// `delta` must have been computed from the same `θ`. Returns the step size `α`
/// actually applied.
pub fn apply_update_in_place(
    theta: &mut ParameterVector,
    phi_t: &FeatureVector,
    delta: f64,
    beta: f64,
    mode: UpdateMode,
    radius: f64,
) -> Result<f64> {
    check_dim(theta, phi_t, "current feature")?;
    if !delta.is_finite() {
        return Err(Error::numeric(format!("TD error {delta} is not finite")));
    }
    if !(beta > 0.0) {
        return Err(Error::domain(format!("step size {beta} must be positive")));
    }
    let alpha = match mode {
        UpdateMode::Standard => beta,
        UpdateMode::Implicit => effective_step_size(beta, phi_t),
    };
    theta.add_scaled(alpha * delta, phi_t);
    theta.project_in_place(radius)?;
    Ok(alpha)
}

/// Pure form of [`apply_update_in_place`].
pub fn apply_update(
    theta: &ParameterVector,
    phi_t: &FeatureVector,
    delta: f64,
    beta: f64,
    mode: UpdateMode,
    radius: f64,
) -> Result<ParameterVector> {
    let mut out = theta.clone();
    apply_update_in_place(&mut out, phi_t, delta, beta, mode, radius)?;
    Ok(out)
}
