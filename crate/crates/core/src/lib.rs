//! Projected linear Q-learning and SARSA with implicit (fixed-point) updates,
//! benchmark environments, verification oracles and an experiment harness.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod control;
pub mod envs;
pub mod error;
pub mod features;
pub mod fmt;
pub mod harness;

pub use control::{AgentConfig, Algorithm, ParameterVector, PolicyConfig, StepSizeSchedule, UpdateMode};
pub use envs::{EnvKind, Environment, State, TabularMDP};
pub use error::{Error, Result};
pub use features::{FeatureMap, FeatureVector, RbfSpec};
