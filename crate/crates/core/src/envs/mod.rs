//! Benchmark environments and synthetic tabular MDPs.
//!
//! The four benchmark simulators reproduce the standard dynamics of the
//! gymnasium `CliffWalking-v1`, `Taxi-v4`, `MountainCar-v0` and `Acrobot-v1`
//! environments. Dynamics are deterministic; the random generator passed to
//! [`Environment::reset`] only drives the initial state.

mod acrobot;
mod cliff_walking;
mod mountain_car;
mod tabular;
mod taxi;
pub mod trajectory;

pub use acrobot::Acrobot;
pub use cliff_walking::CliffWalking;
pub use mountain_car::MountainCar;
pub use tabular::{build_random_mdp, MdpEnv, TabularMDP};
pub use taxi::Taxi;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An environment state as seen by the learner.
#[derive(Clone, Debug, PartialEq)]
pub enum State {
    /// Flattened index, `< n_states`.
    Discrete(usize),
    /// Observation vector.
    Continuous(Vec<f64>),
}

impl State {
    pub fn index(&self) -> Option<usize> {
        match self {
            State::Discrete(i) => Some(*i),
            State::Continuous(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub state: State,
    pub action: usize,
    pub reward: f64,
    pub next_state: State,
    pub terminal: bool,
}

/// A stateful episodic simulator.
pub trait Environment: Send {
    fn name(&self) -> &'static str;

    fn n_actions(&self) -> usize;

    /// Number of discrete states, `None` for continuous environments.
    fn n_states(&self) -> Option<usize>;

    /// Per-coordinate observation bounds of a continuous environment.
    fn observation_bounds(&self) -> Option<Vec<(f64, f64)>>;

    /// Upper bound on `|reward|`.
    fn reward_bound(&self) -> f64;

    /// Step limit applied by the harness when none is configured.
    fn default_max_steps(&self) -> usize;

    fn reset(&mut self, rng: &mut dyn RngCore) -> State;

    fn state(&self) -> State;

    fn step(&mut self, action: usize) -> Result<Transition>;
}

pub(crate) fn check_action(action: usize, n_actions: usize) -> Result<()> {
    if action >= n_actions {
        Err(Error::domain(format!(
            "action {action} is not in the action set of size {n_actions}"
        )))
    } else {
        Ok(())
    }
}

/// The benchmark environments, by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvKind {
    CliffWalking,
    Taxi,
    MountainCar,
    Acrobot,
}

impl EnvKind {
    pub const ALL: [EnvKind; 4] = [
        EnvKind::CliffWalking,
        EnvKind::Taxi,
        EnvKind::MountainCar,
        EnvKind::Acrobot,
    ];

    pub fn make(self) -> Box<dyn Environment> {
        match self {
            EnvKind::CliffWalking => Box::new(CliffWalking::new()),
            EnvKind::Taxi => Box::new(Taxi::new()),
            EnvKind::MountainCar => Box::new(MountainCar::new()),
            EnvKind::Acrobot => Box::new(Acrobot::new()),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EnvKind::CliffWalking => "cliff_walking",
            EnvKind::Taxi => "taxi",
            EnvKind::MountainCar => "mountain_car",
            EnvKind::Acrobot => "acrobot",
        }
    }

    pub fn is_discrete(self) -> bool {
        matches!(self, EnvKind::CliffWalking | EnvKind::Taxi)
    }
}

impl std::fmt::Display for EnvKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for EnvKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EnvKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::config(format!("unknown environment {s:?}")))
    }
}
