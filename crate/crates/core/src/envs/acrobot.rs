use std::f64::consts::PI;

use rand::{Rng, RngCore};

use super::{check_action, Environment, State, Transition};
use crate::error::Result;

const DT: f64 = 0.2;
const LINK_LENGTH_1: f64 = 1.0;
const LINK_MASS_1: f64 = 1.0;
const LINK_MASS_2: f64 = 1.0;
const LINK_COM_POS_1: f64 = 0.5;
const LINK_COM_POS_2: f64 = 0.5;
const LINK_MOI: f64 = 1.0;
const GRAVITY: f64 = 9.8;
pub const MAX_VEL_1: f64 = 4.0 * PI;
pub const MAX_VEL_2: f64 = 9.0 * PI;
const TORQUES: [f64; 3] = [-1.0, 0.0, 1.0];

/// Two-link acrobot with torque on the second joint, integrated with a single
/// RK4 step of 0.2 s using the book dynamics.
///
/// Internal state is `[θ₁, θ₂, θ̇₁, θ̇₂]`; the learner sees
/// `[cos θ₁, sin θ₁, cos θ₂, sin θ₂, θ̇₁, θ̇₂]`. Non-terminal steps cost −1 and
/// the terminal step pays 0, as in the reference implementation.
#[derive(Clone, Debug)]
pub struct Acrobot {
    state: [f64; 4],
}

impl Acrobot {
    pub const N_ACTIONS: usize = 3;

    pub fn new() -> Self {
        Acrobot { state: [0.0; 4] }
    }

    pub fn set_state(&mut self, state: [f64; 4]) {
        self.state = state;
    }

    pub fn raw_state(&self) -> [f64; 4] {
        self.state
    }

    fn observation(&self) -> Vec<f64> {
        let [t1, t2, d1, d2] = self.state;
        vec![t1.cos(), t1.sin(), t2.cos(), t2.sin(), d1, d2]
    }

    fn is_terminal(&self) -> bool {
        let [t1, t2, ..] = self.state;
        -t1.cos() - (t2 + t1).cos() > 1.0
    }
}

impl Default for Acrobot {
    fn default() -> Self {
        Self::new()
    }
}

/// Time derivative of `[θ₁, θ₂, θ̇₁, θ̇₂, torque]`.
///
/// Operation order follows the reference so results agree to rounding.
fn dsdt(s: &[f64; 5]) -> [f64; 5] {
    let m1 = LINK_MASS_1;
    let m2 = LINK_MASS_2;
    let l1 = LINK_LENGTH_1;
    let lc1 = LINK_COM_POS_1;
    let lc2 = LINK_COM_POS_2;
    let i1 = LINK_MOI;
    let i2 = LINK_MOI;
    let g = GRAVITY;
    let [theta1, theta2, dtheta1, dtheta2, a] = *s;
    let d1 = m1 * (lc1 * lc1)
        + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * theta2.cos())
        + i1
        + i2;
    let d2 = m2 * (lc2 * lc2 + l1 * lc2 * theta2.cos()) + i2;
    let phi2 = m2 * lc2 * g * (theta1 + theta2 - PI / 2.0).cos();
    let phi1 = -m2 * l1 * lc2 * (dtheta2 * dtheta2) * theta2.sin()
        - 2.0 * m2 * l1 * lc2 * dtheta2 * dtheta1 * theta2.sin()
        + (m1 * lc1 + m2 * l1) * g * (theta1 - PI / 2.0).cos()
        + phi2;
    let ddtheta2 = (a + d2 / d1 * phi1 - m2 * l1 * lc2 * (dtheta1 * dtheta1) * theta2.sin() - phi2)
        / (m2 * (lc2 * lc2) + i2 - (d2 * d2) / d1);
    let ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
    [dtheta1, dtheta2, ddtheta1, ddtheta2, 0.0]
}

fn rk4_step(y0: [f64; 5], dt: f64) -> [f64; 5] {
    let dt2 = dt / 2.0;
    let offset = |k: &[f64; 5], h: f64| -> [f64; 5] { std::array::from_fn(|i| y0[i] + h * k[i]) };
    let k1 = dsdt(&y0);
    let k2 = dsdt(&offset(&k1, dt2));
    let k3 = dsdt(&offset(&k2, dt2));
    let k4 = dsdt(&offset(&k3, dt));
    std::array::from_fn(|i| y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

fn wrap(mut x: f64, lo: f64, hi: f64) -> f64 {
    let diff = hi - lo;
    while x > hi {
        x -= diff;
    }
    while x < lo {
        x += diff;
    }
    x
}

impl Environment for Acrobot {
    fn name(&self) -> &'static str {
        "acrobot"
    }

    fn n_actions(&self) -> usize {
        Self::N_ACTIONS
    }

    fn n_states(&self) -> Option<usize> {
        None
    }

    fn observation_bounds(&self) -> Option<Vec<(f64, f64)>> {
        Some(vec![
            (-1.0, 1.0),
            (-1.0, 1.0),
            (-1.0, 1.0),
            (-1.0, 1.0),
            (-MAX_VEL_1, MAX_VEL_1),
            (-MAX_VEL_2, MAX_VEL_2),
        ])
    }

    fn reward_bound(&self) -> f64 {
        1.0
    }

    fn default_max_steps(&self) -> usize {
        500
    }

    fn reset(&mut self, rng: &mut dyn RngCore) -> State {
        // The reference stores the initial state in single precision.
        self.state = std::array::from_fn(|_| rng.random_range(-0.1f64..0.1) as f32 as f64);
        self.state()
    }

    fn state(&self) -> State {
        State::Continuous(self.observation())
    }

    fn step(&mut self, action: usize) -> Result<Transition> {
        check_action(action, Self::N_ACTIONS)?;
        let before = self.state();
        let [t1, t2, d1, d2] = self.state;
        let ns = rk4_step([t1, t2, d1, d2, TORQUES[action]], DT);
        self.state = [
            wrap(ns[0], -PI, PI),
            wrap(ns[1], -PI, PI),
            ns[2].clamp(-MAX_VEL_1, MAX_VEL_1),
            ns[3].clamp(-MAX_VEL_2, MAX_VEL_2),
        ];
        let terminal = self.is_terminal();
        Ok(Transition {
            state: before,
            action,
            reward: if terminal { 0.0 } else { -1.0 },
            next_state: self.state(),
            terminal,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn reset_is_small_perturbation_of_hanging_rest() {
        let mut env = Acrobot::new();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            env.reset(&mut rng);
            assert!(env.raw_state().iter().all(|x| x.abs() <= 0.1));
        }
    }

    #[test]
    fn hanging_at_rest_without_torque_stays_put() {
        let mut env = Acrobot::new();
        let t = env.step(1).unwrap();
        assert!(env.raw_state().iter().all(|x| x.abs() < 1e-12));
        assert_eq!(t.reward, -1.0);
        assert!(!t.terminal);
    }

    #[test]
    fn observation_is_trig_encoding() {
        let mut env = Acrobot::new();
        env.set_state([0.3, -1.0, 0.5, -0.25]);
        let State::Continuous(o) = env.state() else {
            unreachable!()
        };
        assert_eq!(o.len(), 6);
        assert_eq!(o[0], 0.3f64.cos());
        assert_eq!(o[3], (-1.0f64).sin());
        assert_eq!(o[5], -0.25);
    }

    #[test]
    fn upright_configuration_is_terminal() {
        let mut env = Acrobot::new();
        env.set_state([PI, 0.0, 0.0, 0.0]);
        assert!(env.is_terminal());
    }

    #[test]
    fn wrap_handles_multiple_turns() {
        assert!((wrap(3.0 * PI + 0.1, -PI, PI) - (-PI + 0.1)).abs() < 1e-12);
        assert_eq!(wrap(0.5, -PI, PI), 0.5);
    }
}
