//! Projected standard and implicit linear Q-learning and SARSA.

mod agent;
mod policy;
mod projection;
mod schedule;
mod td;

pub use agent::{run_episode, AgentConfig, Algorithm, EpisodeRecord, StepInfo, StepObserver};
pub use policy::{
    epsilon_at, epsilon_softmax_probabilities, greedy_action, q_values, sample_epsilon_greedy,
    sample_epsilon_softmax, EpsilonDecay, PolicyConfig, PolicyKind,
};
pub use projection::{project, ParameterVector};
pub use schedule::{effective_step_size, step_size, ScheduleClock, StepSizeSchedule};
pub use td::{
    apply_update, apply_update_in_place, q_target, q_td_error, sarsa_target, sarsa_td_error,
    UpdateMode,
};
