use rand::Rng;
use serde::{Deserialize, Serialize};

use super::policy::{q_values, PolicyConfig};
use super::projection::ParameterVector;
use super::schedule::{step_size, ScheduleClock, StepSizeSchedule};
use super::td::{apply_update_in_place, q_td_error, sarsa_td_error, UpdateMode};
use crate::envs::Environment;
use crate::error::{Error, Result};
use crate::features::{FeatureMap, FeatureVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    QLearning,
    Sarsa,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::QLearning => "q_learning",
            Algorithm::Sarsa => "sarsa",
        }
    }
}

fn default_radius() -> f64 {
    f64::INFINITY
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    pub algorithm: Algorithm,
    pub mode: UpdateMode,
    pub schedule: StepSizeSchedule,
    pub gamma: f64,
    /// Projection radius; `inf` disables projection.
    #[serde(default = "default_radius")]
    pub radius: f64,
    pub policy: PolicyConfig,
    #[serde(default)]
    pub clock: ScheduleClock,
    /// Every weight starts at this value.
    #[serde(default)]
    pub initial_weight: f64,
}

impl AgentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::config(format!("gamma {} must lie in [0, 1)", self.gamma)));
        }
        if !(self.radius > 0.0) {
            return Err(Error::config(format!(
                "projection radius {} must be positive",
                self.radius
            )));
        }
        if !self.initial_weight.is_finite() {
            return Err(Error::config("initial weight must be finite"));
        }
        self.schedule.validate()?;
        self.policy.validate()
    }

    pub fn initial_parameters(&self, dim: usize) -> ParameterVector {
        ParameterVector::from_vec(vec![self.initial_weight; dim])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpisodeRecord {
    pub cumulative_reward: f64,
    pub length: usize,
    /// The weights became non-finite; the episode stopped at that step.
    pub diverged: bool,
    pub terminated: bool,
}

/// What an observer sees after every update.
#[derive(Debug)]
pub struct StepInfo<'a> {
    pub episode: u64,
    /// Step index within the episode.
    pub step: usize,
    /// Step index within the run.
    pub global_step: u64,
    pub beta: f64,
    /// Step size actually applied: `β` or `β̃`.
    pub applied_step_size: f64,
    pub reward: f64,
    pub delta: f64,
    pub terminal: bool,
    pub theta: &'a ParameterVector,
}

pub trait StepObserver {
    fn on_step(&mut self, info: &StepInfo<'_>);
}

impl StepObserver for () {
    fn on_step(&mut self, _: &StepInfo<'_>) {}
}

impl<F: FnMut(&StepInfo<'_>)> StepObserver for F {
    fn on_step(&mut self, info: &StepInfo<'_>) {
        self(info)
    }
}

/// Runs one episode of projected (implicit) Q-learning or SARSA, updating
/// `theta` in place.
///
/// Terminal transitions use a zero bootstrap; hitting `max_steps` does not.
/// `global_step` counts environment steps across episodes of the run. A
/// non-finite iterate ends the episode with `diverged` set instead of an error.
#[allow(clippy::too_many_arguments)]
pub fn run_episode<R: Rng, O: StepObserver + ?Sized>(
    agent: &AgentConfig,
    theta: &mut ParameterVector,
    env: &mut dyn Environment,
    features: &FeatureMap,
    rng: &mut R,
    global_step: &mut u64,
    episode: u64,
    max_steps: usize,
    observer: &mut O,
) -> Result<EpisodeRecord> {
    if theta.len() != features.dimension() {
        return Err(Error::domain(format!(
            "weights have dimension {}, features have {}",
            theta.len(),
            features.dimension()
        )));
    }
    if env.n_actions() != features.n_actions() {
        return Err(Error::domain(format!(
            "environment has {} actions, feature map has {}",
            env.n_actions(),
            features.n_actions()
        )));
    }
    let epsilon = agent.policy.epsilon_for_episode(episode);
    let mut record = EpisodeRecord {
        cumulative_reward: 0.0,
        length: 0,
        diverged: false,
        terminated: false,
    };

    let state = env.reset(rng);
    let mut feats = features.features_all_actions(&state)?;
    let mut action = match agent.algorithm {
        Algorithm::Sarsa => Some(agent.policy.sample(rng, epsilon, &q_values(theta, &feats))?),
        Algorithm::QLearning => None,
    };

    for step in 0..max_steps {
        let a = match action {
            Some(a) => a,
            None => agent.policy.sample(rng, epsilon, &q_values(theta, &feats))?,
        };
        let tr = env.step(a)?;
        let next_feats = if tr.terminal {
            Vec::new()
        } else {
            features.features_all_actions(&tr.next_state)?
        };

        let delta = match agent.algorithm {
            Algorithm::QLearning => q_td_error(theta, &feats[a], tr.reward, &next_feats, agent.gamma)?,
            Algorithm::Sarsa => {
                // Next action from the policy induced by the current iterate.
                if tr.terminal {
                    action = None;
                    let zero = FeatureVector::zeros(theta.len());
                    sarsa_td_error(theta, &feats[a], tr.reward, &zero, agent.gamma)?
                } else {
                    let q_next = q_values(theta, &next_feats);
                    let next = if q_next.iter().all(|q| q.is_finite()) {
                        agent.policy.sample(rng, epsilon, &q_next)?
                    } else {
                        0
                    };
                    action = Some(next);
                    sarsa_td_error(theta, &feats[a], tr.reward, &next_feats[next], agent.gamma)?
                }
            }
        };

        let t = match agent.clock {
            ScheduleClock::PerEpisode => step as u64,
            ScheduleClock::Global => *global_step,
        };
        let beta = step_size(&agent.schedule, t);
        record.cumulative_reward += tr.reward;
        record.length += 1;
        *global_step += 1;

        let applied = match apply_update_in_place(theta, &feats[a], delta, beta, agent.mode, agent.radius) {
            Ok(alpha) => alpha,
            Err(Error::Numeric(_)) => {
                record.diverged = true;
                return Ok(record);
            }
            Err(e) => return Err(e),
        };
        observer.on_step(&StepInfo {
            episode,
            step,
            global_step: *global_step - 1,
            beta,
            applied_step_size: applied,
            reward: tr.reward,
            delta,
            terminal: tr.terminal,
            theta,
        });
        if tr.terminal {
            record.terminated = true;
            break;
        }
        feats = next_feats;
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{build_random_mdp, CliffWalking, MdpEnv, TabularMDP};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn agent(algorithm: Algorithm, mode: UpdateMode, beta: f64, gamma: f64) -> AgentConfig {
        AgentConfig {
            algorithm,
            mode,
            schedule: StepSizeSchedule::constant(beta).unwrap(),
            gamma,
            radius: f64::INFINITY,
            policy: PolicyConfig::epsilon_greedy(0.5),
            clock: ScheduleClock::PerEpisode,
            initial_weight: 0.0,
        }
    }

    #[test]
    fn myopic_values_converge_to_rewards() {
        let mdp = build_random_mdp(3, 2, 1.0, 11).unwrap();
        let rewards: Vec<f64> = (0..3).flat_map(|s| (0..2).map(move |a| (s, a))).map(|(s, a)| mdp.reward(s, a)).collect();
        let mut env = MdpEnv::new(mdp);
        let fm = FeatureMap::one_hot(3, 2);
        let cfg = agent(Algorithm::QLearning, UpdateMode::Standard, 0.5, 0.0);
        let mut theta = ParameterVector::zeros(6);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut g = 0;
        run_episode(&cfg, &mut theta, &mut env, &fm, &mut rng, &mut g, 0, 5000, &mut ()).unwrap();
        for (w, r) in theta.as_slice().iter().zip(&rewards) {
            assert!((w - r).abs() < 1e-9, "{w} vs {r}");
        }
    }

    #[test]
    fn implicit_huge_step_stays_finite() {
        let mdp = TabularMDP::new(
            vec![vec![vec![0.5, 0.5]; 2]; 2],
            vec![vec![-100.0, 100.0]; 2],
        )
        .unwrap();
        let mut env = MdpEnv::new(mdp);
        let fm = FeatureMap::one_hot(2, 2);
        for algorithm in [Algorithm::QLearning, Algorithm::Sarsa] {
            let cfg = agent(algorithm, UpdateMode::Implicit, 1e6, 0.99);
            let mut theta = ParameterVector::zeros(4);
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            let mut g = 0;
            let mut max_alpha: f64 = 0.0;
            let mut obs = |i: &StepInfo<'_>| max_alpha = max_alpha.max(i.applied_step_size);
            let rec = run_episode(&cfg, &mut theta, &mut env, &fm, &mut rng, &mut g, 0, 2000, &mut obs).unwrap();
            assert!(!rec.diverged);
            assert!(theta.is_finite());
            assert!(max_alpha < 1.0);
        }
    }

    #[test]
    fn standard_huge_step_is_reported_as_divergence() {
        let mdp = TabularMDP::new(vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]; 2], vec![vec![1.0, 1.0]; 2]).unwrap();
        let mut env = MdpEnv::new(mdp);
        let fm = FeatureMap::one_hot(2, 2);
        let cfg = agent(Algorithm::QLearning, UpdateMode::Standard, 1e200, 0.99);
        let mut theta = ParameterVector::zeros(4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut g = 0;
        let rec = run_episode(&cfg, &mut theta, &mut env, &fm, &mut rng, &mut g, 0, 10_000, &mut ()).unwrap();
        assert!(rec.diverged);
        assert!(rec.length < 10_000);
    }

    #[test]
    fn global_clock_counts_across_episodes() {
        let mut env = CliffWalking::new();
        let fm = FeatureMap::one_hot(48, 4);
        let mut cfg = agent(Algorithm::Sarsa, UpdateMode::Implicit, 1.0, 0.9);
        cfg.schedule = StepSizeSchedule::polynomial(1.0, 0.5).unwrap();
        cfg.clock = ScheduleClock::Global;
        let mut theta = ParameterVector::zeros(fm.dimension());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut g = 0;
        let mut first_betas = Vec::new();
        let mut lengths = Vec::new();
        for ep in 0..3 {
            let mut seen_first = false;
            let mut obs = |i: &StepInfo<'_>| {
                if !seen_first {
                    first_betas.push(i.beta);
                    seen_first = true;
                }
            };
            let rec = run_episode(&cfg, &mut theta, &mut env, &fm, &mut rng, &mut g, ep, 100, &mut obs).unwrap();
            lengths.push(rec.length as u64);
        }
        assert_eq!(g, lengths.iter().sum::<u64>());
        assert_eq!(first_betas[0], 1.0);
        let expected = 1.0 / ((lengths[0] + 1) as f64).sqrt();
        assert!((first_betas[1] - expected).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let mut env = CliffWalking::new();
        let fm = FeatureMap::one_hot(48, 4);
        let cfg = agent(Algorithm::QLearning, UpdateMode::Standard, 0.5, 0.9);
        let mut theta = ParameterVector::zeros(3);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut g = 0;
        assert!(matches!(
            run_episode(&cfg, &mut theta, &mut env, &fm, &mut rng, &mut g, 0, 10, &mut ()),
            Err(Error::Domain(_))
        ));
    }
}
