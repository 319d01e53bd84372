use rand::RngCore;

use super::{check_action, Environment, State, Transition};
use crate::error::Result;

const ROWS: usize = 4;
const COLS: usize = 12;
const START: usize = 3 * COLS;
const GOAL: usize = 3 * COLS + COLS - 1;

/// 4×12 cliff-walking grid.
///
/// Actions: 0 up, 1 right, 2 down, 3 left. Each move costs −1; stepping onto
/// the cliff (bottom row, columns 1–10) costs −100 and returns the agent to
/// the start without ending the episode. Reaching the bottom-right goal ends it.
#[derive(Clone, Debug)]
pub struct CliffWalking {
    position: usize,
}

impl CliffWalking {
    pub const N_STATES: usize = ROWS * COLS;
    pub const N_ACTIONS: usize = 4;
    pub const START: usize = START;

    pub fn new() -> Self {
        CliffWalking { position: START }
    }

    pub fn set_state(&mut self, index: usize) {
        assert!(index < Self::N_STATES);
        self.position = index;
    }

    fn is_cliff(row: usize, col: usize) -> bool {
        row == ROWS - 1 && (1..COLS - 1).contains(&col)
    }
}

impl Default for CliffWalking {
    fn default() -> Self {
        Self::new()
    }
}

impl Environment for CliffWalking {
    fn name(&self) -> &'static str {
        "cliff_walking"
    }

    fn n_actions(&self) -> usize {
        Self::N_ACTIONS
    }

    fn n_states(&self) -> Option<usize> {
        Some(Self::N_STATES)
    }

    fn observation_bounds(&self) -> Option<Vec<(f64, f64)>> {
        None
    }

    fn reward_bound(&self) -> f64 {
        100.0
    }

    fn default_max_steps(&self) -> usize {
        10_000
    }

    fn reset(&mut self, _rng: &mut dyn RngCore) -> State {
        self.position = START;
        State::Discrete(START)
    }

    fn state(&self) -> State {
        State::Discrete(self.position)
    }

    fn step(&mut self, action: usize) -> Result<Transition> {
        check_action(action, Self::N_ACTIONS)?;
        let state = self.position;
        let (row, col) = (state / COLS, state % COLS);
        let (row, col) = match action {
            0 => (row.saturating_sub(1), col),
            1 => (row, (col + 1).min(COLS - 1)),
            2 => ((row + 1).min(ROWS - 1), col),
            _ => (row, col.saturating_sub(1)),
        };
        let (next, reward, terminal) = if Self::is_cliff(row, col) {
            (START, -100.0, false)
        } else {
            let next = row * COLS + col;
            (next, -1.0, next == GOAL)
        };
        self.position = next;
        Ok(Transition {
            state: State::Discrete(state),
            action,
            reward,
            next_state: State::Discrete(next),
            terminal,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn reset_is_start_cell() {
        let mut env = CliffWalking::new();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        env.set_state(5);
        assert_eq!(env.reset(&mut rng), State::Discrete(36));
    }

    #[test]
    fn stepping_right_from_start_falls_off_cliff() {
        let mut env = CliffWalking::new();
        let t = env.step(1).unwrap();
        assert_eq!(t.reward, -100.0);
        assert_eq!(t.next_state, State::Discrete(36));
        assert!(!t.terminal);
    }

    #[test]
    fn reaching_goal_terminates() {
        let mut env = CliffWalking::new();
        env.set_state(35);
        let t = env.step(2).unwrap();
        assert_eq!(t.next_state, State::Discrete(47));
        assert_eq!(t.reward, -1.0);
        assert!(t.terminal);
    }

    #[test]
    fn walls_clamp_and_invalid_actions_fail() {
        let mut env = CliffWalking::new();
        env.set_state(0);
        assert_eq!(env.step(0).unwrap().next_state, State::Discrete(0));
        assert_eq!(env.step(3).unwrap().next_state, State::Discrete(0));
        assert!(env.step(4).is_err());
    }
}
