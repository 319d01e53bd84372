use crate::envs::TabularMDP;
use crate::error::{Error, Result};

/// Action values `Q[s][a]`, row-major by state.
#[derive(Clone, Debug, PartialEq)]
pub struct QTable {
    pub n_states: usize,
    pub n_actions: usize,
    pub values: Vec<f64>,
}

impl QTable {
    pub fn get(&self, s: usize, a: usize) -> f64 {
        self.values[s * self.n_actions + a]
    }

    /// `max Q − min Q`.
    pub fn range(&self) -> f64 {
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
        hi - lo
    }

    fn state_max(&self, s: usize) -> f64 {
        self.values[s * self.n_actions..(s + 1) * self.n_actions]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn bellman_optimality(mdp: &TabularMDP, gamma: f64, q: &QTable) -> Vec<f64> {
    let v: Vec<f64> = (0..mdp.n_states()).map(|s| q.state_max(s)).collect();
    let mut out = Vec::with_capacity(q.values.len());
    for s in 0..mdp.n_states() {
        for a in 0..mdp.n_actions() {
            let ev: f64 = mdp.transition_row(s, a).iter().zip(&v).map(|(p, v)| p * v).sum();
            out.push(mdp.reward(s, a) + gamma * ev);
        }
    }
    out
}

/// `‖Q − (R + γ P max Q)‖_∞`.
pub fn bellman_residual(mdp: &TabularMDP, gamma: f64, q: &QTable) -> f64 {
    bellman_optimality(mdp, gamma, q)
        .iter()
        .zip(&q.values)
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
}

/// Iterates `Q ← R + γ P max_a Q` from zero until the sup-norm change drops below `tol`.
pub fn value_iteration(mdp: &TabularMDP, gamma: f64, tol: f64) -> Result<QTable> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::domain(format!("gamma {gamma} must lie in [0, 1)")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let mut q = QTable {
        n_states: mdp.n_states(),
        n_actions: mdp.n_actions(),
        values: vec![0.0; mdp.n_states() * mdp.n_actions()],
    };
    loop {
        let next = bellman_optimality(mdp, gamma, &q);
        let change = next
            .iter()
            .zip(&q.values)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        q.values = next;
        if change < tol {
            return Ok(q);
        }
    }
}

/// Stationary distribution of the chain induced by `policy[s][a]`, by power
/// iteration from the uniform distribution until the ℓ₁ change is below `tol`.
pub fn stationary_distribution(mdp: &TabularMDP, policy: &[Vec<f64>], tol: f64) -> Result<Vec<f64>> {
    let n = mdp.n_states();
    if policy.len() != n || policy.iter().any(|p| p.len() != mdp.n_actions()) {
        return Err(Error::domain("policy table does not match the MDP"));
    }
    for (s, p) in policy.iter().enumerate() {
        if p.iter().any(|x| !(*x >= 0.0)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::domain(format!("policy row {s} is not a distribution")));
        }
    }
    let p = mdp.policy_transition_matrix(policy);
    let mut mu = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    for _ in 0..1_000_000 {
        next.iter_mut().for_each(|x| *x = 0.0);
        for i in 0..n {
            let w = mu[i];
            for (dst, pij) in next.iter_mut().zip(&p[i * n..(i + 1) * n]) {
                *dst += w * pij;
            }
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let change: f64 = next.iter().zip(&mu).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut mu, &mut next);
        if change < tol {
            return Ok(mu);
        }
    }
    Err(Error::numeric("power iteration did not converge; the chain may be reducible or periodic"))
}
