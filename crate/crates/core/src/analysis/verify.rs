//! The oracle suite behind the `verify` command.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    drift_matrices, epsilon_greedy_table, estimate_w_q, mixing_time, solve_fixed_point_direct,
    stationary_distribution, theory_constants, value_iteration, bellman_residual, ErgodicityParams,
};
use crate::control::{apply_update, effective_step_size, project, q_target, ParameterVector, UpdateMode};
use crate::envs::build_random_mdp;
use crate::error::Result;
use crate::features::{FeatureMap, FeatureVector};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Check { name, passed, detail }
    }

    fn from_result(name: &'static str, r: Result<Check>) -> Self {
        r.unwrap_or_else(|e| Check::new(name, false, format!("error: {e}")))
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

/// A random feature with `‖φ‖ ≤ 1`; zero with probability 1/20.
fn random_feature(rng: &mut ChaCha8Rng, dim: usize) -> FeatureVector {
    if rng.random_range(0..20) == 0 {
        return FeatureVector::zeros(dim);
    }
    let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    let scale = rng.random::<f64>() / n;
    FeatureVector::dense(v.into_iter().map(|x| x * scale).collect()).unwrap()
}

fn random_weights(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> ParameterVector {
    ParameterVector::from_vec((0..dim).map(|_| rng.random_range(-scale..scale)).collect())
}

/// Implicit closed-form update vs the dense linear solve, `M = 5`.
pub fn closed_form_equivalence(instances: usize, seed: u64) -> Check {
    const NAME: &str = "implicit update equals dense fixed-point solve";
    Check::from_result(NAME, (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for i in 0..instances {
            let beta = [1e-3, 1.0, 1e3][i % 3];
            let theta = random_weights(&mut rng, 5, 5.0);
            let phi = random_feature(&mut rng, 5);
            let next = [random_feature(&mut rng, 5), random_feature(&mut rng, 5)];
            let reward = rng.random_range(-1.0..1.0);
            let target = q_target(&theta, reward, &next, 0.99)?;
            let delta = target - theta.dot(&phi);
            let closed = apply_update(&theta, &phi, delta, beta, UpdateMode::Implicit, f64::INFINITY)?;
            let direct = solve_fixed_point_direct(&theta, &phi, target, beta)?;
            for (a, b) in closed.as_slice().iter().zip(direct.as_slice()) {
                worst = worst.max((a - b).abs());
            }
        }
        Ok(Check::new(NAME, worst < 1e-10, format!("{instances} instances, max abs error {worst:.3e} (< 1e-10)")))
    })())
}

/// `β/(1+β) ≤ β̃ ≤ β`, `β̃ = β` at `φ = 0`, and implicit = standard / (1 + β‖φ‖²).
pub fn effective_step_law(samples: usize, seed: u64) -> Check {
    const NAME: &str = "effective step-size law";
    Check::from_result(NAME, (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bound_violations = 0usize;
        let mut zero_mismatch = 0usize;
        let mut worst_dir: f64 = 0.0;
        for _ in 0..samples {
            let beta = 10f64.powf(rng.random_range(-3.0..3.0));
            let dim = rng.random_range(1..8);
            let phi = random_feature(&mut rng, dim);
            let bt = effective_step_size(beta, &phi);
            if !(beta / (1.0 + beta) <= bt && bt <= beta) {
                bound_violations += 1;
            }
            if phi.norm_sq() == 0.0 && bt != beta {
                zero_mismatch += 1;
            }
            let theta = random_weights(&mut rng, dim, 1.0);
            let delta = rng.random_range(-1.0..1.0);
            let imp = apply_update(&theta, &phi, delta, beta, UpdateMode::Implicit, f64::INFINITY)?;
            let std = apply_update(&theta, &phi, delta, beta, UpdateMode::Standard, f64::INFINITY)?;
            let shrink = 1.0 + beta * phi.norm_sq();
            for ((i, s), t) in imp.as_slice().iter().zip(std.as_slice()).zip(theta.as_slice()) {
                worst_dir = worst_dir.max(((i - t) - (s - t) / shrink).abs());
            }
        }
        let passed = bound_violations == 0 && zero_mismatch == 0 && worst_dir <= 1e-12;
        Ok(Check::new(
            NAME,
            passed,
            format!(
                "{samples} samples, {bound_violations} bound violations, {zero_mismatch} zero-feature mismatches, max direction error {worst_dir:.3e} (<= 1e-12)"
            ),
        ))
    })())
}

/// Idempotence, norm bound and identity inside the ball.
pub fn projection_suite(samples: usize, seed: u64) -> Check {
    const NAME: &str = "projection idempotence, norm bound, identity inside ball";
    Check::from_result(NAME, (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut failures = 0usize;
        for _ in 0..samples {
            let dim = rng.random_range(1..32);
            let scale = 10f64.powf(rng.random_range(-3.0..4.0));
            let theta = random_weights(&mut rng, dim, scale);
            let radius = 10f64.powf(rng.random_range(-3.0..4.0));
            let p = project(&theta, radius)?;
            let pp = project(&p, radius)?;
            let tol = 1e-12 * radius.max(1.0);
            let idempotent = p.as_slice().iter().zip(pp.as_slice()).all(|(a, b)| (a - b).abs() <= tol);
            let bounded = p.norm() <= radius + tol;
            let identity = theta.norm() > radius || p == theta;
            if !(idempotent && bounded && identity) {
                failures += 1;
            }
        }
        Ok(Check::new(NAME, failures == 0, format!("{samples} vectors, {failures} failures (tolerance 1e-12)")))
    })())
}

/// Value iteration meets its Bellman residual and the stationary solver its fixed point.
pub fn tabular_oracles(seed: u64) -> Check {
    const NAME: &str = "value iteration and stationary distribution residuals";
    Check::from_result(NAME, (|| {
        let mdp = build_random_mdp(5, 2, 1.0, seed)?;
        let q = value_iteration(&mdp, 0.9, 1e-10)?;
        let bell = bellman_residual(&mdp, 0.9, &q);
        let policy = vec![vec![0.5, 0.5]; 5];
        let mu = stationary_distribution(&mdp, &policy, 1e-13)?;
        let p = mdp.policy_transition_matrix(&policy);
        let stat = (0..5)
            .map(|j| ((0..5).map(|i| mu[i] * p[i * 5 + j]).sum::<f64>() - mu[j]).abs())
            .fold(0.0, f64::max);
        Ok(Check::new(
            NAME,
            bell < 1e-10 && stat < 1e-10,
            format!("Bellman residual {bell:.3e} (< 1e-10), stationarity residual {stat:.3e} (< 1e-10)"),
        ))
    })())
}

/// Hand-computed constants and the `τ_β` bracketing invariant.
pub fn theory_constant_suite(samples: usize, seed: u64) -> Check {
    const NAME: &str = "theory constants and mixing-time bracketing";
    Check::from_result(NAME, (|| {
        let half = ErgodicityParams::new(1.0, 0.5)?;
        let c = theory_constants(1.0, 2.0, 2, &half, 0.25)?;
        let examples = c.g == 5.0
            && c.lambda == 40.0
            && mixing_time(&half, 0.25)? == 2
            && mixing_time(&half, 1.0)? == 1
            && mixing_time(&ErgodicityParams::new(4.0, 0.1)?, 0.004)? == 3;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut violations = 0usize;
        for _ in 0..samples {
            let p = ErgodicityParams::new(10f64.powf(rng.random_range(-2.0..2.0)), rng.random_range(0.01..0.99))?;
            let beta = 10f64.powf(rng.random_range(-6.0..1.0));
            let tau = mixing_time(&p, beta)?;
            if !p.decayed_below(tau, beta) || (tau > 1 && p.decayed_below(tau - 1, beta)) {
                violations += 1;
            }
        }
        Ok(Check::new(
            NAME,
            examples && violations == 0,
            format!("examples {}, {samples} bracketing draws with {violations} violations", if examples { "match" } else { "differ" }),
        ))
    })())
}

/// Moment matrices are symmetric PSD and the Q-learning margin is positive on a
/// one-hot fixture with `ε`-greedy behaviour.
pub fn drift_suite(seed: u64) -> Check {
    const NAME: &str = "drift matrices";
    Check::from_result(NAME, (|| {
        let mdp = build_random_mdp(4, 2, 1.0, seed)?;
        let fm = FeatureMap::one_hot(4, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let (gamma, epsilon) = (0.9, 0.2);
        let mut min_margin = f64::INFINITY;
        let mut asym: f64 = 0.0;
        let mut min_eig = f64::INFINITY;
        for _ in 0..100 {
            let theta = random_weights(&mut rng, 8, 1.0);
            let pol = epsilon_greedy_table(&fm, &theta, 4, epsilon)?;
            let d = drift_matrices(&mdp, &pol, &theta, gamma, &fm)?;
            let diff = &d.sigma_mu - &d.sigma_star * (gamma * gamma);
            asym = asym.max((&diff - diff.transpose()).amax());
            min_eig = min_eig
                .min(super::drift::min_eigenvalue(&d.sigma_mu))
                .min(super::drift::min_eigenvalue(&d.sigma_star));
            min_margin = min_margin.min(d.q_margin(gamma));
        }
        let uniform = vec![vec![0.5, 0.5]; 4];
        let wq = estimate_w_q(&mdp, &uniform, 0.5, &fm, 100, seed)?;
        Ok(Check::new(
            NAME,
            asym < 1e-10 && min_eig > -1e-10 && min_margin > 0.0,
            format!(
                "min margin {min_margin:.4e} (> 0) over 100 greedy-consistent draws, asymmetry {asym:.1e}, min moment eigenvalue {min_eig:.1e}; ŵ_q (uniform behaviour, γ = 0.5) = {:.6e} over {} weights",
                wq.value, wq.evaluated
            ),
        ))
    })())
}

/// Runs every oracle check.
pub fn run_verification_suite() -> VerificationReport {
    VerificationReport {
        checks: vec![
            closed_form_equivalence(1000, 1),
            effective_step_law(10_000, 2),
            projection_suite(10_000, 3),
            tabular_oracles(4),
            theory_constant_suite(1000, 5),
            drift_suite(6),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        let report = run_verification_suite();
        assert!(report.passed(), "{report}");
    }
}
