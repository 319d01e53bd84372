use rand::{Rng, RngCore};

use super::{check_action, Environment, State, Transition};
use crate::error::Result;

const MAP: [&[u8; 11]; 7] = [
    b"+---------+",
    b"|R: | : :G|",
    b"| : | : : |",
    b"| : : : : |",
    b"| | : | : |",
    b"|Y| : |B: |",
    b"+---------+",
];

const LOCS: [(usize, usize); 4] = [(0, 0), (0, 4), (4, 0), (4, 3)];
const IN_TAXI: usize = 4;
const MAX_ROW: usize = 4;
const MAX_COL: usize = 4;

/// The 5×5 taxi domain.
///
/// State index encodes `((row * 5 + col) * 5 + passenger) * 4 + destination`,
/// with passenger 4 meaning "in the taxi". Actions: 0 south, 1 north,
/// 2 east, 3 west, 4 pickup, 5 dropoff.
#[derive(Clone, Debug)]
pub struct Taxi {
    state: usize,
}

/// Decoded taxi state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TaxiState {
    pub row: usize,
    pub col: usize,
    pub passenger: usize,
    pub destination: usize,
}

impl TaxiState {
    pub fn encode(&self) -> usize {
        ((self.row * 5 + self.col) * 5 + self.passenger) * 4 + self.destination
    }

    pub fn decode(index: usize) -> Self {
        let destination = index % 4;
        let i = index / 4;
        let passenger = i % 5;
        let i = i / 5;
        TaxiState {
            row: i / 5,
            col: i % 5,
            passenger,
            destination,
        }
    }
}

impl Taxi {
    pub const N_STATES: usize = 500;
    pub const N_ACTIONS: usize = 6;

    pub fn new() -> Self {
        Taxi {
            state: TaxiState {
                row: 0,
                col: 0,
                passenger: 1,
                destination: 0,
            }
            .encode(),
        }
    }

    pub fn set_state(&mut self, index: usize) {
        assert!(index < Self::N_STATES);
        self.state = index;
    }

    fn initial_states() -> impl Iterator<Item = usize> {
        (0..Self::N_STATES).filter(|&s| {
            let d = TaxiState::decode(s);
            d.passenger < 4 && d.passenger != d.destination
        })
    }
}

impl Default for Taxi {
    fn default() -> Self {
        Self::new()
    }
}

impl Environment for Taxi {
    fn name(&self) -> &'static str {
        "taxi"
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
        20.0
    }

    fn default_max_steps(&self) -> usize {
        10_000
    }

    fn reset(&mut self, rng: &mut dyn RngCore) -> State {
        let candidates: Vec<usize> = Self::initial_states().collect();
        self.state = candidates[rng.random_range(0..candidates.len())];
        State::Discrete(self.state)
    }

    fn state(&self) -> State {
        State::Discrete(self.state)
    }

    fn step(&mut self, action: usize) -> Result<Transition> {
        check_action(action, Self::N_ACTIONS)?;
        let s = TaxiState::decode(self.state);
        let taxi_loc = (s.row, s.col);
        let mut next = s;
        let mut reward = -1.0;
        let mut terminal = false;
        match action {
            0 => next.row = (s.row + 1).min(MAX_ROW),
            1 => next.row = s.row.saturating_sub(1),
            2 if MAP[1 + s.row][2 * s.col + 2] == b':' => next.col = (s.col + 1).min(MAX_COL),
            3 if MAP[1 + s.row][2 * s.col] == b':' => next.col = s.col.saturating_sub(1),
            4 => {
                if s.passenger < IN_TAXI && taxi_loc == LOCS[s.passenger] {
                    next.passenger = IN_TAXI;
                } else {
                    reward = -10.0;
                }
            }
            5 => {
                if s.passenger == IN_TAXI && taxi_loc == LOCS[s.destination] {
                    next.passenger = s.destination;
                    terminal = true;
                    reward = 20.0;
                } else if s.passenger == IN_TAXI && LOCS.contains(&taxi_loc) {
                    next.passenger = LOCS.iter().position(|l| *l == taxi_loc).unwrap();
                } else {
                    reward = -10.0;
                }
            }
            // Blocked by a wall.
            _ => {}
        }
        let next_index = next.encode();
        let state = self.state;
        self.state = next_index;
        Ok(Transition {
            state: State::Discrete(state),
            action,
            reward,
            next_state: State::Discrete(next_index),
            terminal,
        })
    }
}
