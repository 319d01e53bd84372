use rand::{Rng, RngCore};

use super::{check_action, Environment, State, Transition};
use crate::error::Result;

pub const MIN_POSITION: f64 = -1.2;
pub const MAX_POSITION: f64 = 0.6;
pub const MAX_SPEED: f64 = 0.07;
pub const GOAL_POSITION: f64 = 0.5;
const FORCE: f64 = 0.001;
const GRAVITY: f64 = 0.0025;

/// Mountain car with the discrete action set {push left, no push, push right}.
///
/// State is `[position, velocity]`; every step costs −1 and the episode ends once
/// the car reaches position 0.5.
#[derive(Clone, Debug)]
pub struct MountainCar {
    position: f64,
    velocity: f64,
}

impl MountainCar {
    pub const N_ACTIONS: usize = 3;

    pub fn new() -> Self {
        MountainCar {
            position: -0.5,
            velocity: 0.0,
        }
    }

    pub fn set_state(&mut self, position: f64, velocity: f64) {
        self.position = position;
        self.velocity = velocity;
    }

    pub fn raw_state(&self) -> [f64; 2] {
        [self.position, self.velocity]
    }
}

impl Default for MountainCar {
    fn default() -> Self {
        Self::new()
    }
}

impl Environment for MountainCar {
    fn name(&self) -> &'static str {
        "mountain_car"
    }

    fn n_actions(&self) -> usize {
        Self::N_ACTIONS
    }

    fn n_states(&self) -> Option<usize> {
        None
    }

    fn observation_bounds(&self) -> Option<Vec<(f64, f64)>> {
        Some(vec![(MIN_POSITION, MAX_POSITION), (-MAX_SPEED, MAX_SPEED)])
    }

    fn reward_bound(&self) -> f64 {
        1.0
    }

    fn default_max_steps(&self) -> usize {
        200
    }

    fn reset(&mut self, rng: &mut dyn RngCore) -> State {
        self.position = rng.random_range(-0.6..-0.4);
        self.velocity = 0.0;
        self.state()
    }

    fn state(&self) -> State {
        State::Continuous(vec![self.position, self.velocity])
    }

    fn step(&mut self, action: usize) -> Result<Transition> {
        check_action(action, Self::N_ACTIONS)?;
        let state = self.state();
        let mut velocity = self.velocity;
        velocity += (action as f64 - 1.0) * FORCE + (3.0 * self.position).cos() * (-GRAVITY);
        velocity = velocity.clamp(-MAX_SPEED, MAX_SPEED);
        let mut position = self.position + velocity;
        position = position.clamp(MIN_POSITION, MAX_POSITION);
        if position == MIN_POSITION && velocity < 0.0 {
            velocity = 0.0;
        }
        self.position = position;
        self.velocity = velocity;
        Ok(Transition {
            state,
            action,
            reward: -1.0,
            next_state: self.state(),
            terminal: position >= GOAL_POSITION && velocity >= 0.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn reset_has_zero_velocity() {
        let mut env = MountainCar::new();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let State::Continuous(s) = env.reset(&mut rng) else {
                unreachable!()
            };
            assert_eq!(s[1], 0.0);
            assert!((-0.6..-0.4).contains(&s[0]));
        }
    }

    #[test]
    fn push_right_from_rest() {
        let mut env = MountainCar::new();
        env.set_state(-0.5, 0.0);
        let t = env.step(2).unwrap();
        let expected_v = 0.0 + 0.001 - 0.0025 * (-1.5f64).cos();
        let State::Continuous(s) = t.next_state else {
            unreachable!()
        };
        assert_eq!(s[1], expected_v);
        assert_eq!(s[0], -0.5 + expected_v);
        assert_eq!(t.reward, -1.0);
        assert!(!t.terminal);
    }

    #[test]
    fn left_wall_stops_the_car() {
        let mut env = MountainCar::new();
        env.set_state(-1.19, -0.05);
        let State::Continuous(s) = env.step(0).unwrap().next_state else {
            unreachable!()
        };
        assert_eq!(s, vec![MIN_POSITION, 0.0]);
    }

    #[test]
    fn goal_terminates() {
        let mut env = MountainCar::new();
        env.set_state(0.49, 0.05);
        assert!(env.step(1).unwrap().terminal);
    }
}
