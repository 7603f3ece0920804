//! Labeled 2D Gaussian mixture and its exact Bayes posterior.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::prob::{log_sum_exp, Layout, ProbVector};
use crate::rng::{stream, Purpose};

pub type Point = [f64; 2];

/// Minimum center separation, in units of `sigma`.
pub const SEPARATION: f64 = 6.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    centers: Vec<Point>,
    sigma: f64,
    weights: Vec<f64>,
}

impl MixtureSpec {
    pub fn new(centers: Vec<Point>, sigma: f64, weights: Vec<f64>) -> Result<Self> {
        let k = centers.len();
        if k < 2 {
            return Err(Error::Config(format!(
                "mixture needs at least 2 modes, got {k}"
            )));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::Config(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        check_len(k, weights.len()).map_err(|e| Error::Config(e.to_string()))?;
        if centers.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Config("mixture centers must be finite".into()));
        }
        for (i, a) in centers.iter().enumerate() {
            for b in &centers[i + 1..] {
                let d = dist2(a, b).sqrt();
                if d <= SEPARATION * sigma {
                    return Err(Error::Config(format!(
                        "centers {a:?} and {b:?} are {d} apart, need more than {}",
                        SEPARATION * sigma
                    )));
                }
            }
        }
        let weights = ProbVector::new(weights, Layout::RealOnly { classes: k })
            .map_err(|e| Error::Config(format!("mixture weights: {e}")))?
            .into_inner();
        Ok(Self {
            centers,
            sigma,
            weights,
        })
    }

    /// `k` equal-weight modes evenly spaced on a circle.
    pub fn ring(k: usize, radius: f64, sigma: f64) -> Result<Self> {
        let centers = (0..k)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / k as f64;
                [radius * a.cos(), radius * a.sin()]
            })
            .collect();
        Self::new(centers, sigma, vec![1.0 / k as f64; k])
    }

    pub fn classes(&self) -> usize {
        self.centers.len()
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight_vector(&self) -> ProbVector {
        ProbVector::real_only(self.weights.clone()).expect("validated on construction")
    }
}

impl Default for MixtureSpec {
    /// Eight modes on the unit circle with `sigma = 0.05`.
    fn default() -> Self {
        Self::ring(8, 1.0, 0.05).expect("valid default mixture")
    }
}

pub(crate) fn dist2(a: &Point, b: &Point) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabeledBatch {
    pub points: Vec<Point>,
    pub labels: Vec<usize>,
}

impl LabeledBatch {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub(crate) fn draw_classes<R: Rng>(spec: &MixtureSpec, n: usize, rng: &mut R) -> Vec<usize> {
    let dist = WeightedIndex::new(&spec.weights).expect("validated weights");
    (0..n).map(|_| dist.sample(rng)).collect()
}

pub(crate) fn sample_with<R: Rng>(spec: &MixtureSpec, n: usize, rng: &mut R) -> LabeledBatch {
    let labels = draw_classes(spec, n, rng);
    let points = labels
        .iter()
        .map(|&y| {
            let c = spec.centers[y];
            let dx: f64 = rng.sample(StandardNormal);
            let dy: f64 = rng.sample(StandardNormal);
            [c[0] + spec.sigma * dx, c[1] + spec.sigma * dy]
        })
        .collect();
    LabeledBatch { points, labels }
}

/// Draws `n` labeled points; the same seed always gives the same batch.
pub fn sample_mixture(spec: &MixtureSpec, n: usize, seed: u64) -> Result<LabeledBatch> {
    if n == 0 {
        return Err(Error::Config("sample count must be at least 1".into()));
    }
    Ok(sample_with(spec, n, &mut stream(seed, Purpose::Sample, 0)))
}

/// Exact class posterior `∝ w_k exp(-‖x - c_k‖² / (2σ²))`, normalized in the
/// log domain so that far-away points still give a valid distribution.
pub fn oracle_posterior(spec: &MixtureSpec, point: &Point) -> ProbVector {
    let inv = 1.0 / (2.0 * spec.sigma * spec.sigma);
    let logits: Vec<f64> = spec
        .centers
        .iter()
        .zip(&spec.weights)
        .map(|(c, w)| {
            let lw = if *w > 0.0 { w.ln() } else { f64::NEG_INFINITY };
            lw - dist2(point, c) * inv
        })
        .collect();
    let lse = log_sum_exp(&logits);
    let values = logits.iter().map(|l| (l - lse).exp()).collect();
    ProbVector::new(
        values,
        Layout::RealOnly {
            classes: spec.classes(),
        },
    )
    .expect("log-domain posterior is normalized")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_ring_is_valid() {
        let m = MixtureSpec::default();
        assert_eq!(m.classes(), 8);
        assert_eq!(m.sigma(), 0.05);
    }

    #[test]
    fn overlapping_modes_are_rejected() {
        assert!(MixtureSpec::ring(8, 1.0, 0.2).is_err());
        assert!(MixtureSpec::ring(1, 1.0, 0.05).is_err());
        assert!(MixtureSpec::ring(4, 1.0, 0.0).is_err());
    }

    #[test]
    fn tiny_sigma_stays_on_centers() {
        let m = MixtureSpec::ring(8, 1.0, 1e-9).unwrap();
        let b = sample_mixture(&m, 500, 3).unwrap();
        for (p, y) in b.points.iter().zip(&b.labels) {
            assert!(dist2(p, &m.centers()[*y]).sqrt() < 1e-6);
        }
    }

    #[test]
    fn equidistant_point_splits_evenly() {
        let m = MixtureSpec::new(vec![[-1.0, 0.0], [1.0, 0.0]], 0.1, vec![0.5, 0.5]).unwrap();
        let p = oracle_posterior(&m, &[0.0, 3.0]);
        assert_eq!(p.as_slice()[0], p.as_slice()[1]);
    }

    #[test]
    fn far_points_have_valid_posteriors() {
        let m = MixtureSpec::default();
        let p = oracle_posterior(&m, &[5e4, -3e4]);
        assert!(p.as_slice().iter().all(|v| v.is_finite()));
        assert!((p.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
