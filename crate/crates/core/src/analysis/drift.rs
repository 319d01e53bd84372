use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::tabular::stationary_distribution;
use crate::control::{greedy_action, ParameterVector};
use crate::envs::{State, TabularMDP};
use crate::error::{Error, Result};
use crate::features::FeatureMap;

/// Exact feature moment matrices of a tabular MDP under a behaviour policy.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftMatrices {
    /// `Σ^{μπ} = E[φ(S, A) φ(S, A)ᵀ]` with `S ~ μ`, `A ~ π(·|S)`.
    pub sigma_mu: DMatrix<f64>,
    /// `Σ*(θ) = E[φ(S, a_S^θ) φ(S, a_S^θ)ᵀ]` with `a_s^θ` greedy for `θ`.
    pub sigma_star: DMatrix<f64>,
    /// `A^θ = E[φ(S, A)(γ φ(S', A') − φ(S, A))ᵀ]`, `A'` drawn from the same policy.
    pub a_theta: DMatrix<f64>,
    /// Stationary state distribution used for the expectations.
    pub mu: Vec<f64>,
}

impl DriftMatrices {
    /// `λ_min(Σ^{μπ} − γ² Σ*(θ))`.
    pub fn q_margin(&self, gamma: f64) -> f64 {
        min_eigenvalue(&(&self.sigma_mu - &self.sigma_star * (gamma * gamma)))
    }
}

pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().min()
}

fn dense_features(fm: &FeatureMap, s: usize, a: usize) -> Result<DVector<f64>> {
    Ok(DVector::from_vec(fm.features(&State::Discrete(s), a)?.to_dense()))
}

/// Computes the drift matrices by exact enumeration over `(s, a, s', a')`.
pub fn drift_matrices(
    mdp: &TabularMDP,
    behavior: &[Vec<f64>],
    theta: &ParameterVector,
    gamma: f64,
    fm: &FeatureMap,
) -> Result<DriftMatrices> {
    let (ns, na) = (mdp.n_states(), mdp.n_actions());
    if ns * na > 10_000 {
        return Err(Error::domain("exact enumeration is limited to 10^4 state-action pairs"));
    }
    if fm.n_actions() != na || theta.len() != fm.dimension() {
        return Err(Error::domain("feature map, weights and MDP disagree in dimension"));
    }
    let mu = stationary_distribution(mdp, behavior, 1e-13)?;
    let dim = fm.dimension();
    let phi: Vec<Vec<DVector<f64>>> = (0..ns)
        .map(|s| (0..na).map(|a| dense_features(fm, s, a)).collect())
        .collect::<Result<_>>()?;

    // E[φ(S', A') | S = s] under the behaviour policy, indexed by s'.
    let next_mean: Vec<DVector<f64>> = (0..ns)
        .map(|s2| {
            let mut v = DVector::zeros(dim);
            for a2 in 0..na {
                v.axpy(behavior[s2][a2], &phi[s2][a2], 1.0);
            }
            v
        })
        .collect();

    let mut sigma_mu = DMatrix::zeros(dim, dim);
    let mut sigma_star = DMatrix::zeros(dim, dim);
    let mut cross = DMatrix::zeros(dim, dim);
    for s in 0..ns {
        let feats = fm.features_all_actions(&State::Discrete(s))?;
        let g = greedy_action(theta, &feats)?;
        sigma_star.ger(mu[s], &phi[s][g], &phi[s][g], 1.0);
        for a in 0..na {
            let w = mu[s] * behavior[s][a];
            if w == 0.0 {
                continue;
            }
            sigma_mu.ger(w, &phi[s][a], &phi[s][a], 1.0);
            let mut expected_next = DVector::zeros(dim);
            for (s2, p) in mdp.transition_row(s, a).iter().enumerate() {
                expected_next.axpy(*p, &next_mean[s2], 1.0);
            }
            cross.ger(w, &phi[s][a], &expected_next, 1.0);
        }
    }
    let a_theta = cross * gamma - &sigma_mu;
    Ok(DriftMatrices {
        sigma_mu,
        sigma_star,
        a_theta,
        mu,
    })
}

/// Sampled upper-bound estimate of `w_q = min_θ λ_min(Σ^{μπ} − γ² Σ*(θ))`.
#[derive(Clone, Debug, PartialEq)]
pub struct WqEstimate {
    pub value: f64,
    /// Number of weight vectors evaluated.
    pub evaluated: usize,
}

/// Minimises `λ_min(Σ^{μπ} − γ² Σ*(θ))` over `n_random` standard-normal weight
/// vectors and every coordinate direction.
pub fn estimate_w_q(
    mdp: &TabularMDP,
    behavior: &[Vec<f64>],
    gamma: f64,
    fm: &FeatureMap,
    n_random: usize,
    seed: u64,
) -> Result<WqEstimate> {
    let dim = fm.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<ParameterVector> = (0..n_random)
        .map(|_| {
            ParameterVector::from_vec((0..dim).map(|_| StandardNormal.sample(&mut rng)).collect())
        })
        .collect();
    for i in 0..dim {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        candidates.push(ParameterVector::from_vec(e));
    }
    let mut value = f64::INFINITY;
    for theta in &candidates {
        value = value.min(drift_matrices(mdp, behavior, theta, gamma, fm)?.q_margin(gamma));
    }
    Ok(WqEstimate {
        value,
        evaluated: candidates.len(),
    })
}

/// `w_s(C) = λ_min(−½[(A + CλI) + (A + CλI)ᵀ])`.
pub fn w_s(a_theta: &DMatrix<f64>, c: f64, lambda: f64) -> f64 {
    let n = a_theta.nrows();
    let shifted = a_theta + DMatrix::<f64>::identity(n, n) * (c * lambda);
    min_eigenvalue(&(shifted * -1.0))
}

/// `ε`-greedy action table for the greedy policy of `theta`.
pub fn epsilon_greedy_table(fm: &FeatureMap, theta: &ParameterVector, n_states: usize, epsilon: f64) -> Result<Vec<Vec<f64>>> {
    let na = fm.n_actions();
    (0..n_states)
        .map(|s| {
            let g = greedy_action(theta, &fm.features_all_actions(&State::Discrete(s))?)?;
            Ok((0..na)
                .map(|a| epsilon / na as f64 + if a == g { 1.0 - epsilon } else { 0.0 })
                .collect())
        })
        .collect()
}
