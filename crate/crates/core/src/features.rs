//! State-action feature maps with the norm bound `‖φ(s, a)‖₂ ≤ 1`.
//!
//! Two encodings are provided: one-hot vectors for tabular environments and
//! block-encoded random Fourier features of a Gaussian kernel for continuous
//! ones. Both produce a [`FeatureVector`], which stores a single contiguous
//! nonzero block inside an otherwise zero vector.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::envs::State;
use crate::error::{Error, Result};
use crate::fmt::format_g17;

/// Slack allowed on the unit norm bound.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// A feature vector of dimension `dim` whose only nonzero entries lie in
/// `values`, placed at `offset`.
///
/// Equality compares the dense representation.
#[derive(Clone, Debug)]
pub struct FeatureVector {
    dim: usize,
    offset: usize,
    values: Vec<f64>,
}

impl FeatureVector {
    /// Dense vector. Fails when the Euclidean norm exceeds `1 + 1e-9`.
    pub fn dense(values: Vec<f64>) -> Result<Self> {
        let dim = values.len();
        Self::block(dim, 0, values)
    }

    /// Block vector: `values` placed at `offset` inside a zero vector of length `dim`.
    pub fn block(dim: usize, offset: usize, values: Vec<f64>) -> Result<Self> {
        if offset + values.len() > dim {
            return Err(Error::domain(format!(
                "feature block [{offset}, {}) exceeds dimension {dim}",
                offset + values.len()
            )));
        }
        let v = FeatureVector {
            dim,
            offset,
            values,
        };
        let n = v.norm_sq();
        if !n.is_finite() {
            return Err(Error::numeric("feature vector has non-finite entries"));
        }
        if n.sqrt() > 1.0 + NORM_TOLERANCE {
            return Err(Error::domain(format!(
                "feature norm {} exceeds the unit bound",
                n.sqrt()
            )));
        }
        Ok(v)
    }

    pub fn zeros(dim: usize) -> Self {
        FeatureVector {
            dim,
            offset: 0,
            values: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.dim == 0
    }

    /// Offset of the nonzero block.
    pub fn offset(&self) -> usize {
        self.offset
    }

    /// The nonzero block.
    pub fn block_values(&self) -> &[f64] {
        &self.values
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `φᵀw` for a dense `w` of matching length.
    pub fn dot(&self, weights: &[f64]) -> f64 {
        debug_assert_eq!(weights.len(), self.dim);
        weights[self.offset..self.offset + self.values.len()]
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v)
            .sum()
    }

    pub fn dot_features(&self, other: &FeatureVector) -> f64 {
        let lo = self.offset.max(other.offset);
        let hi = (self.offset + self.values.len()).min(other.offset + other.values.len());
        (lo..hi)
            .map(|i| self.values[i - self.offset] * other.values[i - other.offset])
            .sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        out[self.offset..self.offset + self.values.len()].copy_from_slice(&self.values);
        out
    }
}

impl PartialEq for FeatureVector {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.to_dense() == other.to_dense()
    }
}

/// One-hot encoding `e(s, a)` with the 1 at `state_index * n_actions + action_index`.
pub fn one_hot_features(
    state_index: usize,
    action_index: usize,
    n_states: usize,
    n_actions: usize,
) -> Result<FeatureVector> {
    if state_index >= n_states {
        return Err(Error::domain(format!(
            "state index {state_index} out of range for {n_states} states"
        )));
    }
    if action_index >= n_actions {
        return Err(Error::domain(format!(
            "action index {action_index} out of range for {n_actions} actions"
        )));
    }
    Ok(FeatureVector {
        dim: n_states * n_actions,
        offset: state_index * n_actions + action_index,
        values: vec![1.0],
    })
}

/// Parameters of a random Fourier feature map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RbfSpec {
    pub length_scales: Vec<f64>,
    pub components_per_scale: usize,
    pub state_dimension: usize,
    /// Per-dimension `(low, high)`.
    pub state_bounds: Vec<(f64, f64)>,
    pub n_actions: usize,
    pub seed: u64,
}

impl RbfSpec {
    pub fn state_feature_count(&self) -> usize {
        self.components_per_scale * self.length_scales.len()
    }

    fn validate(&self) -> Result<()> {
        if self.length_scales.is_empty() {
            return Err(Error::domain("at least one length scale is required"));
        }
        if let Some(l) = self
            .length_scales
            .iter()
            .find(|l| !(l.is_finite() && **l > 0.0))
        {
            return Err(Error::domain(format!("length scale {l} must be positive")));
        }
        if self.components_per_scale == 0 {
            return Err(Error::domain("components_per_scale must be positive"));
        }
        if self.state_dimension == 0 || self.n_actions == 0 {
            return Err(Error::domain(
                "state_dimension and n_actions must be positive",
            ));
        }
        if self.state_bounds.len() != self.state_dimension {
            return Err(Error::domain(format!(
                "expected {} state bounds, got {}",
                self.state_dimension,
                self.state_bounds.len()
            )));
        }
        if let Some((i, (lo, hi))) = self
            .state_bounds
            .iter()
            .enumerate()
            .find(|(_, (lo, hi))| !(lo < hi))
        {
            return Err(Error::domain(format!(
                "state bound {i} has low {lo} not below high {hi}"
            )));
        }
        Ok(())
    }
}

/// Random Fourier features of the Gaussian kernel, one cosine per component.
///
/// For every length scale `ℓ`, `components_per_scale` frequency vectors are drawn
/// from `N(0, ℓ⁻² I)` and phases from `U[0, 2π)`. A state is clipped to its bounds,
/// rescaled to `[0, 1]` per dimension (`z`), and mapped to
/// `cos(wᵢ·z + bᵢ) / √K` where `K` is the total component count. The state block
/// is copied into the slot of the chosen action, so the full dimension is
/// `K × n_actions`.
///
/// Draw order from a `ChaCha8Rng` seeded with `spec.seed`: scales in listed order,
/// then components, each component drawing its `d` frequency coordinates followed by
/// its phase.
#[derive(Clone, Debug, PartialEq)]
pub struct RbfMap {
    spec: RbfSpec,
    /// `K × d`, row-major.
    frequencies: Vec<f64>,
    phases: Vec<f64>,
    normalization: f64,
}

impl RbfMap {
    pub fn spec(&self) -> &RbfSpec {
        &self.spec
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn state_feature_count(&self) -> usize {
        self.phases.len()
    }

    /// The per-state feature block, before placement into an action slot.
    pub fn state_features(&self, state: &[f64]) -> Result<Vec<f64>> {
        let d = self.spec.state_dimension;
        if state.len() != d {
            return Err(Error::domain(format!(
                "state has {} coordinates, map expects {d}",
                state.len()
            )));
        }
        if state.iter().any(|x| !x.is_finite()) {
            return Err(Error::numeric("state has non-finite coordinates"));
        }
        let z: Vec<f64> = state
            .iter()
            .zip(&self.spec.state_bounds)
            .map(|(&x, &(lo, hi))| (x.clamp(lo, hi) - lo) / (hi - lo))
            .collect();
        Ok(self
            .frequencies
            .chunks_exact(d)
            .zip(&self.phases)
            .map(|(w, b)| {
                let arg: f64 = w.iter().zip(&z).map(|(wi, zi)| wi * zi).sum::<f64>() + b;
                arg.cos() * self.normalization
            })
            .collect())
    }
}

/// Builds the random Fourier feature map described on [`RbfMap`].
pub fn build_rbf_map(spec: RbfSpec) -> Result<FeatureMap> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let d = spec.state_dimension;
    let k = spec.state_feature_count();
    let mut frequencies = Vec::with_capacity(k * d);
    let mut phases = Vec::with_capacity(k);
    for &ell in &spec.length_scales {
        for _ in 0..spec.components_per_scale {
            for _ in 0..d {
                let z: f64 = rng.sample(StandardNormal);
                frequencies.push(z / ell);
            }
            phases.push(rng.random_range(0.0..2.0 * PI));
        }
    }
    Ok(FeatureMap::Rbf(RbfMap {
        spec,
        frequencies,
        phases,
        normalization: 1.0 / (k as f64).sqrt(),
    }))
}

/// Encoder from `(state, action)` to a [`FeatureVector`].
#[derive(Clone, Debug, PartialEq)]
pub enum FeatureMap {
    OneHot { n_states: usize, n_actions: usize },
    Rbf(RbfMap),
}

impl FeatureMap {
    pub fn one_hot(n_states: usize, n_actions: usize) -> Self {
        FeatureMap::OneHot {
            n_states,
            n_actions,
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            FeatureMap::OneHot {
                n_states,
                n_actions,
            } => n_states * n_actions,
            FeatureMap::Rbf(m) => m.state_feature_count() * m.spec.n_actions,
        }
    }

    pub fn n_actions(&self) -> usize {
        match self {
            FeatureMap::OneHot { n_actions, .. } => *n_actions,
            FeatureMap::Rbf(m) => m.spec.n_actions,
        }
    }

    pub fn features(&self, state: &State, action: usize) -> Result<FeatureVector> {
        match (self, state) {
            (
                FeatureMap::OneHot {
                    n_states,
                    n_actions,
                },
                State::Discrete(s),
            ) => one_hot_features(*s, action, *n_states, *n_actions),
            (FeatureMap::Rbf(m), State::Continuous(x)) => rbf_features(m, x, action),
            (FeatureMap::OneHot { .. }, State::Continuous(_)) => Err(Error::domain(
                "one-hot features need a discrete state",
            )),
            (FeatureMap::Rbf(_), State::Discrete(_)) => {
                Err(Error::domain("RBF features need a continuous state"))
            }
        }
    }

    /// Features of `state` paired with every action, in action order.
    pub fn features_all_actions(&self, state: &State) -> Result<Vec<FeatureVector>> {
        match (self, state) {
            (FeatureMap::Rbf(m), State::Continuous(x)) => {
                // Share the state block across actions.
                let block = m.state_features(x)?;
                let k = block.len();
                let dim = self.dimension();
                Ok((0..m.spec.n_actions)
                    .map(|a| FeatureVector {
                        dim,
                        offset: a * k,
                        values: block.clone(),
                    })
                    .collect())
            }
            _ => (0..self.n_actions())
                .map(|a| self.features(state, a))
                .collect(),
        }
    }
}

/// `φ(state, action)` for an RBF map.
pub fn rbf_features(map: &RbfMap, state: &[f64], action_index: usize) -> Result<FeatureVector> {
    let n_actions = map.spec.n_actions;
    if action_index >= n_actions {
        return Err(Error::domain(format!(
            "action index {action_index} out of range for {n_actions} actions"
        )));
    }
    let block = map.state_features(state)?;
    let k = block.len();
    Ok(FeatureVector {
        dim: k * n_actions,
        offset: action_index * k,
        values: block,
    })
}

/// Writes a dense feature vector as a single CSV row of 17-significant-digit values.
pub fn write_golden_csv(path: &Path, features: &FeatureVector) -> Result<()> {
    let line = features
        .to_dense()
        .iter()
        .map(|v| format_g17(*v))
        .collect::<Vec<_>>()
        .join(",");
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    writeln!(f, "{line}").map_err(|e| Error::io(path, e))
}

pub fn read_golden_csv(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.trim()
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::domain(format!("bad value {s:?} in {}: {e}", path.display())))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec(seed: u64) -> RbfSpec {
        RbfSpec {
            length_scales: vec![5.0, 2.0, 1.0, 0.5],
            components_per_scale: 100,
            state_dimension: 2,
            state_bounds: vec![(-1.2, 0.6), (-0.07, 0.07)],
            n_actions: 3,
            seed,
        }
    }

    #[test]
    fn one_hot_examples() {
        assert_eq!(
            one_hot_features(0, 0, 2, 2).unwrap().to_dense(),
            vec![1.0, 0.0, 0.0, 0.0]
        );
        assert_eq!(
            one_hot_features(1, 1, 2, 2).unwrap().to_dense(),
            vec![0.0, 0.0, 0.0, 1.0]
        );
        let err = one_hot_features(2, 0, 2, 2).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        assert!(err.to_string().contains("state index 2"));
        assert!(one_hot_features(0, 5, 2, 2)
            .unwrap_err()
            .to_string()
            .contains("action index 5"));
    }

    #[test]
    fn one_hot_vectors_are_orthonormal() {
        let (ns, na) = (4, 3);
        for s in 0..ns {
            for a in 0..na {
                let u = one_hot_features(s, a, ns, na).unwrap();
                for s2 in 0..ns {
                    for a2 in 0..na {
                        let v = one_hot_features(s2, a2, ns, na).unwrap();
                        let expected = if (s, a) == (s2, a2) { 1.0 } else { 0.0 };
                        assert_eq!(u.dot_features(&v), expected);
                        assert_eq!(u.dot(&v.to_dense()), expected);
                    }
                }
            }
        }
    }

    #[test]
    fn rbf_dimension_for_four_scales_of_100() {
        let map = build_rbf_map(small_spec(0)).unwrap();
        assert_eq!(map.dimension(), 1200);
    }

    #[test]
    fn single_component_dimension_is_one() {
        let spec = RbfSpec {
            length_scales: vec![1.0],
            components_per_scale: 1,
            state_dimension: 1,
            state_bounds: vec![(0.0, 1.0)],
            n_actions: 1,
            seed: 3,
        };
        assert_eq!(build_rbf_map(spec).unwrap().dimension(), 1);
    }

    #[test]
    fn rbf_construction_is_deterministic() {
        assert_eq!(
            build_rbf_map(small_spec(11)).unwrap(),
            build_rbf_map(small_spec(11)).unwrap()
        );
        assert_ne!(
            build_rbf_map(small_spec(11)).unwrap(),
            build_rbf_map(small_spec(12)).unwrap()
        );
    }

    #[test]
    fn invalid_rbf_specs_are_rejected() {
        let mut s = small_spec(0);
        s.length_scales[2] = 0.0;
        assert!(matches!(build_rbf_map(s), Err(Error::Domain(_))));
        let mut s = small_spec(0);
        s.length_scales[0] = -1.0;
        assert!(matches!(build_rbf_map(s), Err(Error::Domain(_))));
        let mut s = small_spec(0);
        s.state_bounds[1] = (0.1, 0.1);
        assert!(matches!(build_rbf_map(s), Err(Error::Domain(_))));
    }

    #[test]
    fn rbf_blocks_are_disjoint() {
        let FeatureMap::Rbf(map) = build_rbf_map(small_spec(0)).unwrap() else {
            unreachable!()
        };
        let state = [-0.5, 0.01];
        let f0 = rbf_features(&map, &state, 0).unwrap();
        let f2 = rbf_features(&map, &state, 2).unwrap();
        let dense = f2.to_dense();
        assert!(dense[..800].iter().all(|v| *v == 0.0));
        assert!(dense[800..].iter().any(|v| *v != 0.0));
        assert_eq!(f0.dot_features(&f2), 0.0);
        assert!(matches!(
            rbf_features(&map, &state, 3),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn out_of_bounds_states_are_clipped() {
        let FeatureMap::Rbf(map) = build_rbf_map(small_spec(0)).unwrap() else {
            unreachable!()
        };
        let inside = rbf_features(&map, &[0.6, -0.07], 1).unwrap();
        let outside = rbf_features(&map, &[3.0, -1.0], 1).unwrap();
        assert_eq!(inside, outside);
    }

    #[test]
    fn all_action_features_match_single_calls() {
        let fm = build_rbf_map(small_spec(4)).unwrap();
        let s = State::Continuous(vec![-0.3, 0.02]);
        let all = fm.features_all_actions(&s).unwrap();
        for (a, f) in all.iter().enumerate() {
            assert_eq!(f, &fm.features(&s, a).unwrap());
        }
        let oh = FeatureMap::one_hot(3, 2);
        assert!(matches!(oh.features(&s, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn dense_constructor_enforces_norm_bound() {
        assert!(FeatureVector::dense(vec![0.6, 0.8]).is_ok());
        assert!(matches!(
            FeatureVector::dense(vec![0.8, 0.8]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            FeatureVector::dense(vec![f64::NAN]),
            Err(Error::Numeric(_))
        ));
    }
}
