use crate::error::{Error, Result};
use crate::features::FeatureVector;

/// Refresh the cached squared norm from scratch after this many incremental updates.
const NORM_RESYNC_INTERVAL: u32 = 1024;

/// Weight vector `θ` of a linear action-value approximation `Q(s, a) = φ(s, a)ᵀθ`.
///
/// Keeps a running squared norm so projection stays cheap for sparse features;
/// projection decisions near the boundary always use the exact norm.
#[derive(Clone, Debug)]
pub struct ParameterVector {
    weights: Vec<f64>,
    norm_sq: f64,
    since_resync: u32,
}

impl PartialEq for ParameterVector {
    fn eq(&self, other: &Self) -> bool {
        self.weights == other.weights
    }
}

impl ParameterVector {
    pub fn zeros(dim: usize) -> Self {
        ParameterVector {
            weights: vec![0.0; dim],
            norm_sq: 0.0,
            since_resync: 0,
        }
    }

    pub fn from_vec(weights: Vec<f64>) -> Self {
        let norm_sq = exact_norm_sq(&weights);
        ParameterVector {
            weights,
            norm_sq,
            since_resync: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.weights
    }

    /// Exact Euclidean norm.
    pub fn norm(&self) -> f64 {
        exact_norm_sq(&self.weights).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|w| w.is_finite())
    }

    /// `φᵀθ`.
    pub fn dot(&self, phi: &FeatureVector) -> f64 {
        phi.dot(&self.weights)
    }

    /// `θ ← θ + c·φ`.
    pub fn add_scaled(&mut self, c: f64, phi: &FeatureVector) {
        let off = phi.offset();
        let mut delta_norm = 0.0;
        for (w, v) in self.weights[off..off + phi.block_values().len()]
            .iter_mut()
            .zip(phi.block_values())
        {
            let old = *w;
            *w += c * v;
            delta_norm += *w * *w - old * old;
        }
        self.since_resync += 1;
        if self.since_resync >= NORM_RESYNC_INTERVAL {
            self.resync();
        } else {
            self.norm_sq += delta_norm;
        }
    }

    fn resync(&mut self) -> f64 {
        self.norm_sq = exact_norm_sq(&self.weights);
        self.since_resync = 0;
        self.norm_sq
    }

    /// In-place `Π_r`. An infinite radius disables projection.
    pub fn project_in_place(&mut self, radius: f64) -> Result<()> {
        check_radius(radius)?;
        if radius == f64::INFINITY {
            if !self.norm_sq.is_finite() && !self.is_finite() {
                return Err(Error::numeric("weights are not finite"));
            }
            return Ok(());
        }
        if self.norm_sq.is_finite() && self.norm_sq <= radius * radius * (1.0 - 1e-8) {
            return Ok(());
        }
        let norm_sq = self.resync();
        if !norm_sq.is_finite() {
            return Err(Error::numeric("weights are not finite"));
        }
        let norm = norm_sq.sqrt();
        if norm > radius {
            let scale = radius / norm;
            self.weights.iter_mut().for_each(|w| *w *= scale);
            self.resync();
        }
        Ok(())
    }
}

fn exact_norm_sq(w: &[f64]) -> f64 {
    w.iter().map(|x| x * x).sum()
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("projection radius {radius} must be positive")))
    }
}

/// Euclidean-ball projection: `θ` if `‖θ‖₂ ≤ r`, else `r·θ/‖θ‖₂`.
pub fn project(theta: &ParameterVector, radius: f64) -> Result<ParameterVector> {
    check_radius(radius)?;
    if !theta.is_finite() {
        return Err(Error::numeric("cannot project non-finite weights"));
    }
    let mut out = ParameterVector::from_vec(theta.weights.clone());
    out.project_in_place(radius)?;
    Ok(out)
}
