use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack on `m ρⁿ ≤ β` so that exact-in-decimal cases such as
/// `4·0.1³ = 0.004` are not lost to rounding.
const BRACKET_SLACK: f64 = 16.0 * f64::EPSILON;

/// Geometric-ergodicity constants: `d_TV(P^t(s, ·), μ) ≤ m ρᵗ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErgodicityParams {
    pub m: f64,
    pub rho: f64,
}

impl ErgodicityParams {
    pub fn new(m: f64, rho: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::domain(format!("m = {m} must be positive")));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::domain(format!("rho = {rho} must lie in (0, 1)")));
        }
        Ok(ErgodicityParams { m, rho })
    }

    /// Whether `m ρⁿ ≤ β`, up to a few ulps.
    pub fn decayed_below(&self, n: u64, beta: f64) -> bool {
        self.m * self.rho.powf(n as f64) <= beta * (1.0 + BRACKET_SLACK)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    /// Bound on the update direction, `b + 2r`.
    pub g: f64,
    pub lambda: f64,
    pub tau_beta: u64,
}

/// `⌈x⌉`, treating values within `1e-9` of an integer as that integer.
fn snapped_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

/// Smallest `n ≥ 1` with `m ρⁿ ≤ β`.
pub fn mixing_time(params: &ErgodicityParams, beta: f64) -> Result<u64> {
    if !(beta > 0.0) {
        return Err(Error::domain(format!("beta = {beta} must be positive")));
    }
    let guess = snapped_ceil((beta / params.m).ln() / params.rho.ln());
    let mut n = if guess.is_finite() && guess > 1.0 { guess as u64 } else { 1 };
    while n > 1 && params.decayed_below(n - 1, beta) {
        n -= 1;
    }
    while !params.decayed_below(n, beta) {
        n += 1;
    }
    Ok(n)
}

/// `G = b + 2r`, `λ = G·|A|·(2 + ⌈log_ρ 1/m⌉ + 1/(1−ρ))` and `τ_β`.
pub fn theory_constants(
    b_abs: f64,
    radius: f64,
    n_actions: usize,
    params: &ErgodicityParams,
    beta: f64,
) -> Result<TheoryConstants> {
    if !(b_abs > 0.0) || !(radius > 0.0) || n_actions == 0 {
        return Err(Error::domain("reward bound, radius and action count must be positive"));
    }
    let g = b_abs + 2.0 * radius;
    let log_term = snapped_ceil((1.0 / params.m).ln() / params.rho.ln());
    let lambda = g * n_actions as f64 * (2.0 + log_term + 1.0 / (1.0 - params.rho));
    Ok(TheoryConstants {
        g,
        lambda,
        tau_beta: mixing_time(params, beta)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mixing_time_examples() {
        let p = ErgodicityParams::new(1.0, 0.5).unwrap();
        assert_eq!(mixing_time(&p, 0.25).unwrap(), 2);
        assert_eq!(mixing_time(&p, 1.0).unwrap(), 1);
        let p = ErgodicityParams::new(4.0, 0.1).unwrap();
        assert_eq!(mixing_time(&p, 0.004).unwrap(), 3);
    }

    #[test]
    fn constants_examples() {
        let p = ErgodicityParams::new(1.0, 0.5).unwrap();
        let c = theory_constants(1.0, 2.0, 2, &p, 0.1).unwrap();
        assert_eq!(c.g, 5.0);
        assert_eq!(c.lambda, 40.0);
        assert_eq!(c.tau_beta, 4);
    }

    #[test]
    fn invalid_params() {
        assert!(ErgodicityParams::new(0.0, 0.5).is_err());
        assert!(ErgodicityParams::new(1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn mixing_time_brackets(m in 0.01f64..100.0, rho in 0.01f64..0.99, beta in 1e-6f64..10.0) {
            let p = ErgodicityParams::new(m, rho).unwrap();
            let tau = mixing_time(&p, beta).unwrap();
            prop_assert!(p.decayed_below(tau, beta));
            if tau > 1 {
                prop_assert!(!p.decayed_below(tau - 1, beta));
            }
        }

        #[test]
        fn lambda_over_g_identity(b in 0.1f64..100.0, r in 0.1f64..1e4, k in 1usize..10, m in 0.5f64..50.0, rho in 0.05f64..0.95) {
            let p = ErgodicityParams::new(m, rho).unwrap();
            let c = theory_constants(b, r, k, &p, 0.01).unwrap();
            let ratio = k as f64 * (2.0 + snapped_ceil((1.0 / m).ln() / rho.ln()) + 1.0 / (1.0 - rho));
            prop_assert!((c.lambda / c.g - ratio).abs() <= 1e-12 * ratio.abs().max(1.0));
        }
    }
}
