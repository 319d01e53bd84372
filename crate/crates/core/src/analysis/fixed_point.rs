use nalgebra::{DMatrix, DVector};

use crate::control::ParameterVector;
use crate::error::{Error, Result};
use crate::features::FeatureVector;

/// Solves `(I + β φ φᵀ) θ' = θ + β·target·φ` by dense Cholesky factorization.
///
/// Independent of the closed-form update; used to cross-check it. Fails with a
/// numeric error if the relative residual exceeds `1e-8`.
pub fn solve_fixed_point_direct(
    theta: &ParameterVector,
    phi_t: &FeatureVector,
    bootstrap_target: f64,
    beta: f64,
) -> Result<ParameterVector> {
    let m = theta.len();
    if phi_t.len() != m {
        return Err(Error::domain(format!(
            "feature has dimension {}, weights have {m}",
            phi_t.len()
        )));
    }
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::domain(format!("step size {beta} must be finite and non-negative")));
    }
    let phi = DVector::from_vec(phi_t.to_dense());
    let a = DMatrix::<f64>::identity(m, m) + (&phi * phi.transpose()) * beta;
    let b = DVector::from_column_slice(theta.as_slice()) + &phi * (beta * bootstrap_target);
    let chol = a
        .clone()
        .cholesky()
        .ok_or_else(|| Error::numeric("fixed-point system is not positive definite"))?;
    let x = chol.solve(&b);
    let residual = (&a * &x - &b).amax();
    let scale = b.amax().max(1.0);
    if !(residual <= 1e-8 * scale) {
        return Err(Error::numeric(format!(
            "fixed-point residual {residual:e} exceeds tolerance"
        )));
    }
    Ok(ParameterVector::from_vec(x.as_slice().to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{apply_update, q_target, UpdateMode};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trivial_systems_return_theta() {
        let theta = ParameterVector::from_vec(vec![1.5, -2.0, 0.25]);
        let zero = FeatureVector::zeros(3);
        assert_eq!(solve_fixed_point_direct(&theta, &zero, 7.0, 3.0).unwrap(), theta);
        let phi = FeatureVector::dense(vec![0.6, 0.0, 0.8]).unwrap();
        assert_eq!(solve_fixed_point_direct(&theta, &phi, 7.0, 0.0).unwrap(), theta);
    }

    #[test]
    fn matches_closed_form_on_q_learning_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let theta = ParameterVector::from_vec((0..5).map(|_| rng.random_range(-3.0..3.0)).collect());
            let unit = |rng: &mut ChaCha8Rng| {
                let v: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                FeatureVector::dense(v.into_iter().map(|x| x / n).collect()).unwrap()
            };
            let phi = unit(&mut rng);
            let next = vec![unit(&mut rng), unit(&mut rng)];
            let reward = rng.random_range(-1.0..1.0);
            let target = q_target(&theta, reward, &next, 0.9).unwrap();
            let delta = target - theta.dot(&phi);
            let closed = apply_update(&theta, &phi, delta, 3.0, UpdateMode::Implicit, f64::INFINITY).unwrap();
            let direct = solve_fixed_point_direct(&theta, &phi, target, 3.0).unwrap();
            for (a, b) in closed.as_slice().iter().zip(direct.as_slice()) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }
}
