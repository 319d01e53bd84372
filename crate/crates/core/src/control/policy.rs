use rand::Rng;
use serde::{Deserialize, Serialize};

use super::projection::ParameterVector;
use crate::error::{Error, Result};
use crate::features::FeatureVector;

/// `φ(s, a)ᵀθ` for every action.
pub fn q_values(theta: &ParameterVector, features_per_action: &[FeatureVector]) -> Vec<f64> {
    features_per_action.iter().map(|phi| theta.dot(phi)).collect()
}

fn argmax(q: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in q.iter().enumerate().skip(1) {
        if *v > q[best] {
            best = i;
        }
    }
    best
}

/// `argmax_a φ(s, a)ᵀθ`, lowest index on ties.
pub fn greedy_action(theta: &ParameterVector, features_per_action: &[FeatureVector]) -> Result<usize> {
    if features_per_action.is_empty() {
        return Err(Error::domain("greedy action over an empty action set"));
    }
    Ok(argmax(&q_values(theta, features_per_action)))
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if (0.0..=1.0).contains(&epsilon) {
        Ok(())
    } else {
        Err(Error::domain(format!("epsilon {epsilon} is outside [0, 1]")))
    }
}

/// Uniform action with probability `ε`, greedy action otherwise.
pub fn sample_epsilon_greedy<R: Rng + ?Sized>(rng: &mut R, epsilon: f64, q_values: &[f64]) -> Result<usize> {
    check_epsilon(epsilon)?;
    if q_values.is_empty() {
        return Err(Error::domain("cannot sample from an empty action set"));
    }
    if epsilon > 0.0 && rng.random::<f64>() < epsilon {
        Ok(rng.random_range(0..q_values.len()))
    } else {
        Ok(argmax(q_values))
    }
}

/// `ε/|A| + (1 − ε)·softmax(q/ι)`.
pub fn epsilon_softmax_probabilities(epsilon: f64, iota: f64, q_values: &[f64]) -> Result<Vec<f64>> {
    check_epsilon(epsilon)?;
    if !(iota > 0.0) {
        return Err(Error::domain(format!("temperature {iota} must be positive")));
    }
    if q_values.is_empty() {
        return Err(Error::domain("cannot sample from an empty action set"));
    }
    if q_values.iter().any(|q| !q.is_finite()) {
        return Err(Error::numeric("action values are not finite"));
    }
    let max = q_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = q_values.iter().map(|q| ((q - max) / iota).exp()).collect();
    let total: f64 = weights.iter().sum();
    let uniform = epsilon / q_values.len() as f64;
    Ok(weights
        .into_iter()
        .map(|w| uniform + (1.0 - epsilon) * w / total)
        .collect())
}

/// Draws from [`epsilon_softmax_probabilities`] by inverse CDF.
pub fn sample_epsilon_softmax<R: Rng + ?Sized>(
    rng: &mut R,
    epsilon: f64,
    iota: f64,
    q_values: &[f64],
) -> Result<usize> {
    let probs = epsilon_softmax_probabilities(epsilon, iota, q_values)?;
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return Ok(i);
        }
    }
    Ok(probs.len() - 1)
}

/// Linear exploration decay over episodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonDecay {
    pub start: f64,
    pub end: f64,
    pub total_episodes: u64,
}

/// `start + (end − start)·min(episode/total, 1)`.
pub fn epsilon_at(episode: u64, decay: &EpsilonDecay) -> f64 {
    let frac = (episode as f64 / decay.total_episodes.max(1) as f64).min(1.0);
    decay.start + (decay.end - decay.start) * frac
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    EpsilonGreedy,
    EpsilonSoftmax,
}

/// Behaviour policy. When `decay` is set it overrides `epsilon` per episode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default)]
    pub decay: Option<EpsilonDecay>,
}

fn default_temperature() -> f64 {
    0.05
}

impl PolicyConfig {
    pub fn epsilon_greedy(epsilon: f64) -> Self {
        PolicyConfig {
            kind: PolicyKind::EpsilonGreedy,
            epsilon,
            temperature: default_temperature(),
            decay: None,
        }
    }

    pub fn epsilon_softmax(epsilon: f64, temperature: f64) -> Self {
        PolicyConfig {
            kind: PolicyKind::EpsilonSoftmax,
            epsilon,
            temperature,
            decay: None,
        }
    }

    pub fn with_decay(mut self, start: f64, end: f64, total_episodes: u64) -> Self {
        self.decay = Some(EpsilonDecay {
            start,
            end,
            total_episodes,
        });
        self
    }

    pub fn validate(&self) -> Result<()> {
        let eps = [Some(self.epsilon), self.decay.map(|d| d.start), self.decay.map(|d| d.end)];
        for e in eps.into_iter().flatten() {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::config(format!("epsilon {e} is outside [0, 1]")));
            }
        }
        if let Some(d) = self.decay {
            if d.total_episodes == 0 {
                return Err(Error::config("epsilon decay needs total_episodes > 0"));
            }
        }
        if self.kind == PolicyKind::EpsilonSoftmax && !(self.temperature > 0.0) {
            return Err(Error::config(format!(
                "softmax temperature {} must be positive",
                self.temperature
            )));
        }
        Ok(())
    }

    pub fn epsilon_for_episode(&self, episode: u64) -> f64 {
        match &self.decay {
            Some(d) => epsilon_at(episode, d),
            None => self.epsilon,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, epsilon: f64, q_values: &[f64]) -> Result<usize> {
        match self.kind {
            PolicyKind::EpsilonGreedy => sample_epsilon_greedy(rng, epsilon, q_values),
            PolicyKind::EpsilonSoftmax => sample_epsilon_softmax(rng, epsilon, self.temperature, q_values),
        }
    }
}
