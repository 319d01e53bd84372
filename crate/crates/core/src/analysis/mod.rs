//! Independent oracles, theory constants and convergence diagnostics.

mod drift;
mod fixed_point;
mod tabular;
mod theory;
pub mod verify;

pub use drift::{drift_matrices, epsilon_greedy_table, estimate_w_q, w_s, DriftMatrices, WqEstimate};
pub use fixed_point::solve_fixed_point_direct;
pub use tabular::{bellman_residual, stationary_distribution, value_iteration, QTable};
pub use theory::{mixing_time, theory_constants, ErgodicityParams, TheoryConstants};
pub use verify::{run_verification_suite, Check, VerificationReport};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::control::{run_episode, AgentConfig, ParameterVector, StepInfo};
use crate::envs::{MdpEnv, TabularMDP};
use crate::error::{Error, Result};
use crate::features::FeatureMap;

/// `‖θ̂_t − θ*‖₂²` for each iterate in `trace`.
pub fn empirical_error_curve(trace: &[ParameterVector], theta_star: &ParameterVector) -> Result<Vec<f64>> {
    trace
        .iter()
        .map(|theta| {
            if theta.len() != theta_star.len() {
                return Err(Error::domain(format!(
                    "iterate has dimension {}, reference has {}",
                    theta.len(),
                    theta_star.len()
                )));
            }
            Ok(theta
                .as_slice()
                .iter()
                .zip(theta_star.as_slice())
                .map(|(a, b)| (a - b) * (a - b))
                .sum())
        })
        .collect()
}

/// Outcome of one tabular run against the value-iteration oracle.
#[derive(Clone, Debug)]
pub struct TabularConvergence {
    pub q_star: QTable,
    pub theta: ParameterVector,
    pub max_abs_error: f64,
    /// `max_abs_error / range(Q*)`.
    pub relative_error: f64,
    /// Squared distance to `Q*` at steps `0, every, 2·every, …`.
    pub error_curve: Vec<f64>,
}

/// Runs `agent` with one-hot features for `steps` steps of the continuing
/// chain `mdp` and compares the learned table to `Q*` (value iteration at `1e-10`).
pub fn tabular_convergence(
    mdp: &TabularMDP,
    agent: &AgentConfig,
    steps: usize,
    seed: u64,
    record_every: usize,
) -> Result<TabularConvergence> {
    let q_star = value_iteration(mdp, agent.gamma, 1e-10)?;
    let theta_star = ParameterVector::from_vec(q_star.values.clone());
    let fm = FeatureMap::one_hot(mdp.n_states(), mdp.n_actions());
    let mut theta = agent.initial_parameters(fm.dimension());
    let mut env = MdpEnv::new(mdp.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let every = record_every.max(1) as u64;
    let mut curve = empirical_error_curve(std::slice::from_ref(&theta), &theta_star)?;
    let mut obs = |info: &StepInfo<'_>| {
        if (info.global_step + 1).is_multiple_of(every) {
            if let Ok(d) = empirical_error_curve(std::slice::from_ref(info.theta), &theta_star) {
                curve.extend(d);
            }
        }
    };
    let mut global = 0;
    run_episode(agent, &mut theta, &mut env, &fm, &mut rng, &mut global, 0, steps, &mut obs)?;
    let max_abs_error = theta
        .as_slice()
        .iter()
        .zip(&q_star.values)
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    let range = q_star.range();
    Ok(TabularConvergence {
        relative_error: max_abs_error / range,
        max_abs_error,
        theta,
        q_star,
        error_curve: curve,
    })
}
