use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_action, Environment, State, Transition};
use crate::error::{Error, Result};

/// A finite MDP given by its transition kernel and reward table.
#[derive(Clone, Debug, PartialEq)]
pub struct TabularMDP {
    n_states: usize,
    n_actions: usize,
    /// `P[s][a][s']`, flattened.
    transitions: Vec<f64>,
    /// `R[s][a]`, flattened.
    rewards: Vec<f64>,
}

impl TabularMDP {
    /// Builds an MDP from `P[s][a]` rows and `R[s][a]`, validating that each row is
    /// a probability vector to within `1e-12`.
    pub fn new(transitions: Vec<Vec<Vec<f64>>>, rewards: Vec<Vec<f64>>) -> Result<Self> {
        let n_states = transitions.len();
        if n_states == 0 || rewards.len() != n_states {
            return Err(Error::domain("transition and reward tables must cover the same nonempty state set"));
        }
        let n_actions = transitions[0].len();
        if n_actions == 0 {
            return Err(Error::domain("at least one action is required"));
        }
        let mut flat = Vec::with_capacity(n_states * n_actions * n_states);
        for (s, rows) in transitions.iter().enumerate() {
            if rows.len() != n_actions || rewards[s].len() != n_actions {
                return Err(Error::domain(format!("state {s} has the wrong number of actions")));
            }
            for (a, row) in rows.iter().enumerate() {
                if row.len() != n_states {
                    return Err(Error::domain(format!("P[{s}][{a}] has length {}", row.len())));
                }
                if row.iter().any(|p| !(*p >= 0.0)) {
                    return Err(Error::domain(format!("P[{s}][{a}] has a negative entry")));
                }
                let total: f64 = row.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::domain(format!("P[{s}][{a}] sums to {total}")));
                }
                flat.extend_from_slice(row);
            }
        }
        Ok(TabularMDP {
            n_states,
            n_actions,
            transitions: flat,
            rewards: rewards.into_iter().flatten().collect(),
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    /// The distribution over next states from `(s, a)`.
    pub fn transition_row(&self, s: usize, a: usize) -> &[f64] {
        let start = (s * self.n_actions + a) * self.n_states;
        &self.transitions[start..start + self.n_states]
    }

    pub fn reward(&self, s: usize, a: usize) -> f64 {
        self.rewards[s * self.n_actions + a]
    }

    pub fn max_abs_reward(&self) -> f64 {
        self.rewards.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// State transition matrix of the chain induced by `policy[s][a]`, row-major.
    pub fn policy_transition_matrix(&self, policy: &[Vec<f64>]) -> Vec<f64> {
        let n = self.n_states;
        let mut p = vec![0.0; n * n];
        for s in 0..n {
            for (a, &w) in policy[s].iter().enumerate().take(self.n_actions) {
                if w == 0.0 {
                    continue;
                }
                for (dst, q) in p[s * n..(s + 1) * n].iter_mut().zip(self.transition_row(s, a)) {
                    *dst += w * q;
                }
            }
        }
        p
    }
}

/// Random MDP whose transition rows are normalized i.i.d. uniforms (so every
/// entry is strictly positive) and whose rewards are uniform on `[0, b]`.
pub fn build_random_mdp(
    n_states: usize,
    n_actions: usize,
    reward_bound: f64,
    seed: u64,
) -> Result<TabularMDP> {
    if n_states < 2 {
        return Err(Error::domain("a random MDP needs at least two states"));
    }
    if n_actions == 0 {
        return Err(Error::domain("a random MDP needs at least one action"));
    }
    if !(reward_bound > 0.0) {
        return Err(Error::domain("reward bound must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut transitions = Vec::with_capacity(n_states * n_actions * n_states);
    for _ in 0..n_states * n_actions {
        // Open interval keeps every entry strictly positive.
        let row: Vec<f64> = (0..n_states).map(|_| 1.0 - rng.random::<f64>()).collect();
        let total: f64 = row.iter().sum();
        transitions.extend(row.into_iter().map(|x| x / total));
    }
    let rewards = (0..n_states * n_actions)
        .map(|_| rng.random_range(0.0..=reward_bound))
        .collect();
    Ok(TabularMDP {
        n_states,
        n_actions,
        transitions,
        rewards,
    })
}

/// A continuing environment that samples a [`TabularMDP`].
///
/// The chain never terminates. The sampling stream is reseeded from the
/// generator passed to `reset`, so runs stay reproducible.
#[derive(Clone, Debug)]
pub struct MdpEnv {
    mdp: TabularMDP,
    state: usize,
    rng: ChaCha8Rng,
}

impl MdpEnv {
    pub fn new(mdp: TabularMDP) -> Self {
        MdpEnv {
            mdp,
            state: 0,
            rng: ChaCha8Rng::seed_from_u64(0),
        }
    }

    pub fn mdp(&self) -> &TabularMDP {
        &self.mdp
    }
}

impl Environment for MdpEnv {
    fn name(&self) -> &'static str {
        "random_mdp"
    }

    fn n_actions(&self) -> usize {
        self.mdp.n_actions
    }

    fn n_states(&self) -> Option<usize> {
        Some(self.mdp.n_states)
    }

    fn observation_bounds(&self) -> Option<Vec<(f64, f64)>> {
        None
    }

    fn reward_bound(&self) -> f64 {
        self.mdp.max_abs_reward()
    }

    fn default_max_steps(&self) -> usize {
        usize::MAX
    }

    fn reset(&mut self, rng: &mut dyn RngCore) -> State {
        self.rng = ChaCha8Rng::seed_from_u64(rng.next_u64());
        self.state = self.rng.random_range(0..self.mdp.n_states);
        State::Discrete(self.state)
    }

    fn state(&self) -> State {
        State::Discrete(self.state)
    }

    fn step(&mut self, action: usize) -> Result<Transition> {
        check_action(action, self.mdp.n_actions)?;
        let s = self.state;
        let row = self.mdp.transition_row(s, action);
        let u: f64 = self.rng.random();
        let mut acc = 0.0;
        let mut next = row.len() - 1;
        for (i, p) in row.iter().enumerate() {
            acc += p;
            if u < acc {
                next = i;
                break;
            }
        }
        self.state = next;
        Ok(Transition {
            state: State::Discrete(s),
            action,
            reward: self.mdp.reward(s, action),
            next_state: State::Discrete(next),
            terminal: false,
        })
    }
}
