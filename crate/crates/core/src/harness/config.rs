use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::control::AgentConfig;
use crate::envs::EnvKind;
use crate::error::{Error, Result};
use crate::features::{build_rbf_map, FeatureMap, RbfSpec};

/// Random-feature settings for continuous environments. Bounds, dimension and
/// action count come from the environment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub length_scales: Vec<f64>,
    pub components_per_scale: usize,
    /// Fixed feature seed shared by all runs; when absent each run index draws
    /// its own features (the same draw for every algorithm).
    #[serde(default)]
    pub seed: Option<u64>,
}

/// One experiment: `n_runs` independent runs of `n_episodes` episodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub env: EnvKind,
    pub n_runs: usize,
    pub n_episodes: usize,
    /// Defaults to the environment's own limit.
    #[serde(default)]
    pub max_steps: Option<usize>,
    #[serde(default)]
    pub master_seed: u64,
    /// Report the cumulative reward over the first `checkpoint` steps of each run.
    #[serde(default)]
    pub checkpoint: Option<u64>,
    pub agent: AgentConfig,
    #[serde(default)]
    pub features: Option<FeatureConfig>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("experiment configs serialize")
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps
            .unwrap_or_else(|| self.env.make().default_max_steps())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_runs == 0 {
            return Err(Error::config("n_runs must be at least 1"));
        }
        if self.n_episodes == 0 {
            return Err(Error::config("n_episodes must be at least 1"));
        }
        if self.max_steps == Some(0) {
            return Err(Error::config("max_steps must be at least 1"));
        }
        self.agent.validate()?;
        if let Some(c) = self.checkpoint {
            let budget = (self.n_episodes as u128) * (self.max_steps() as u128);
            if c == 0 || c as u128 > budget {
                return Err(Error::config(format!(
                    "checkpoint {c} must lie in [1, n_episodes * max_steps = {budget}]"
                )));
            }
        }
        match (self.env.is_discrete(), &self.features) {
            (true, Some(_)) => Err(Error::config(format!(
                "{} uses one-hot features; remove the [features] table",
                self.env
            ))),
            (false, None) => Err(Error::config(format!(
                "{} needs a [features] table",
                self.env
            ))),
            (false, Some(f)) => {
                self.feature_map(0).map_err(|e| Error::config(format!("invalid features: {e}")))?;
                if f.components_per_scale == 0 {
                    return Err(Error::config("components_per_scale must be positive"));
                }
                Ok(())
            }
            (true, None) => Ok(()),
        }
    }

    /// Feature map for a run; `run_feature_seed` is used when no fixed seed is configured.
    pub fn feature_map(&self, run_feature_seed: u64) -> Result<FeatureMap> {
        let env = self.env.make();
        match &self.features {
            None => {
                let n_states = env.n_states().ok_or_else(|| {
                    Error::config(format!("{} has no finite state set", self.env))
                })?;
                Ok(FeatureMap::one_hot(n_states, env.n_actions()))
            }
            Some(f) => {
                let bounds = env.observation_bounds().ok_or_else(|| {
                    Error::config(format!("{} has no observation bounds", self.env))
                })?;
                build_rbf_map(RbfSpec {
                    length_scales: f.length_scales.clone(),
                    components_per_scale: f.components_per_scale,
                    state_dimension: bounds.len(),
                    state_bounds: bounds,
                    n_actions: env.n_actions(),
                    seed: f.seed.unwrap_or(run_feature_seed),
                })
            }
        }
    }

    /// Display name: `name` if set, else `<env>_<algorithm>_<mode>`.
    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            format!(
                "{}_{}_{}",
                self.env,
                self.agent.algorithm.as_str(),
                self.agent.mode.as_str()
            )
        })
    }
}
