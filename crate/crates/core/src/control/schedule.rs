use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureVector;

/// Step-size sequence `β_t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepSizeSchedule {
    Constant { beta0: f64 },
    /// `β₀ / (t + 1)^s` with `s ∈ (0, 1)`.
    Polynomial { beta0: f64, exponent: f64 },
}

impl StepSizeSchedule {
    pub fn constant(beta0: f64) -> Result<Self> {
        let s = StepSizeSchedule::Constant { beta0 };
        s.validate()?;
        Ok(s)
    }

    pub fn polynomial(beta0: f64, exponent: f64) -> Result<Self> {
        let s = StepSizeSchedule::Polynomial { beta0, exponent };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let beta0 = self.beta0();
        if !(beta0.is_finite() && beta0 > 0.0) {
            return Err(Error::config(format!("beta0 = {beta0} must be positive")));
        }
        if let StepSizeSchedule::Polynomial { exponent, .. } = *self {
            if !(exponent > 0.0 && exponent < 1.0) {
                return Err(Error::config(format!(
                    "schedule exponent {exponent} must lie in (0, 1)"
                )));
            }
        }
        Ok(())
    }

    pub fn beta0(&self) -> f64 {
        match *self {
            StepSizeSchedule::Constant { beta0 } | StepSizeSchedule::Polynomial { beta0, .. } => {
                beta0
            }
        }
    }

    /// Decay exponent; 0 for a constant schedule.
    pub fn exponent(&self) -> f64 {
        match *self {
            StepSizeSchedule::Constant { .. } => 0.0,
            StepSizeSchedule::Polynomial { exponent, .. } => exponent,
        }
    }

    pub fn with_beta0(self, beta0: f64) -> Self {
        match self {
            StepSizeSchedule::Constant { .. } => StepSizeSchedule::Constant { beta0 },
            StepSizeSchedule::Polynomial { exponent, .. } => {
                StepSizeSchedule::Polynomial { beta0, exponent }
            }
        }
    }
}

/// `β_t` for schedule step `t`.
pub fn step_size(schedule: &StepSizeSchedule, t: u64) -> f64 {
    match *schedule {
        StepSizeSchedule::Constant { beta0 } => beta0,
        StepSizeSchedule::Polynomial { beta0, exponent } => beta0 / ((t as f64) + 1.0).powf(exponent),
    }
}

/// `β̃ = β / (1 + β‖φ‖²)`.
pub fn effective_step_size(beta: f64, phi: &FeatureVector) -> f64 {
    beta / (1.0 + beta * phi.norm_sq())
}

/// Which counter drives the schedule index `t`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleClock {
    /// Reset to 0 at the start of every episode.
    #[default]
    PerEpisode,
    /// Count every environment step of the run.
    Global,
}
