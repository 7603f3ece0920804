//! Mode collapse diagnostics on generated 2D samples.

use serde::{Deserialize, Serialize};

use super::mixture::{dist2, MixtureSpec, Point};
use crate::error::{Error, Result};

/// Radius, in units of `sigma`, within which a sample belongs to a mode.
pub const MODE_RADIUS: f64 = 3.0;
/// Share of samples a mode needs to count as covered.
pub const COVERAGE_FRACTION: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub covered: usize,
    pub per_mode_fraction: Vec<f64>,
}

/// Index of the mode whose `MODE_RADIUS · sigma` ball contains `p`, if any.
/// Balls never overlap because centers are more than `6 sigma` apart.
fn owning_mode(spec: &MixtureSpec, p: &Point) -> Option<usize> {
    let r2 = (MODE_RADIUS * spec.sigma()).powi(2);
    spec.centers().iter().position(|c| dist2(p, c) <= r2)
}

fn members(samples: &[Point], spec: &MixtureSpec) -> Result<Vec<Vec<Point>>> {
    if samples.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut groups = vec![Vec::new(); spec.classes()];
    for p in samples {
        if let Some(k) = owning_mode(spec, p) {
            groups[k].push(*p);
        }
    }
    Ok(groups)
}

pub fn mode_coverage(samples: &[Point], spec: &MixtureSpec) -> Result<Coverage> {
    let n = samples.len() as f64;
    let per_mode_fraction: Vec<f64> = members(samples, spec)?
        .iter()
        .map(|g| g.len() as f64 / n)
        .collect();
    let covered = per_mode_fraction
        .iter()
        .filter(|f| **f >= COVERAGE_FRACTION)
        .count();
    Ok(Coverage {
        covered,
        per_mode_fraction,
    })
}

/// Mean over covered modes of the pooled per-axis standard deviation of the
/// samples near that mode, divided by `sigma`. Near 1 for healthy spread,
/// near 0 when samples pile onto a point. Zero when no mode is covered.
pub fn intra_mode_dispersion(samples: &[Point], spec: &MixtureSpec) -> Result<f64> {
    let n = samples.len() as f64;
    let groups = members(samples, spec)?;
    let stds: Vec<f64> = groups
        .iter()
        .filter(|g| g.len() as f64 / n >= COVERAGE_FRACTION)
        .map(|g| pooled_std(g) / spec.sigma())
        .collect();
    if stds.is_empty() {
        return Ok(0.0);
    }
    Ok(stds.iter().sum::<f64>() / stds.len() as f64)
}

fn pooled_std(points: &[Point]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let m = points.len() as f64;
    // Offsets from the first point keep identical points at exactly zero spread.
    let o = points[0];
    let mean = [0, 1].map(|a| o[a] + points.iter().map(|p| p[a] - o[a]).sum::<f64>() / m);
    let ss: f64 = points
        .iter()
        .map(|p| (p[0] - mean[0]).powi(2) + (p[1] - mean[1]).powi(2))
        .sum();
    (ss / (2.0 * (m - 1.0))).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::mixture::sample_mixture;

    #[test]
    fn collapsed_and_empty_batches() {
        let m = MixtureSpec::default();
        let at_center = vec![m.centers()[2]; 100];
        assert_eq!(mode_coverage(&at_center, &m).unwrap().covered, 1);
        assert_eq!(intra_mode_dispersion(&at_center, &m).unwrap(), 0.0);

        let far = vec![[10.0, 10.0]; 50];
        assert_eq!(mode_coverage(&far, &m).unwrap().covered, 0);
        assert_eq!(intra_mode_dispersion(&far, &m).unwrap(), 0.0);
        assert_eq!(mode_coverage(&[], &m), Err(Error::EmptyBatch));
        assert_eq!(intra_mode_dispersion(&[], &m), Err(Error::EmptyBatch));
    }

    #[test]
    fn true_mixture_is_fully_covered_and_spread() {
        let m = MixtureSpec::default();
        let b = sample_mixture(&m, 10_000, 11).unwrap();
        assert_eq!(mode_coverage(&b.points, &m).unwrap().covered, 8);
        let d = intra_mode_dispersion(&b.points, &m).unwrap();
        assert!((0.85..=1.1).contains(&d), "{d}");
    }

    #[test]
    fn single_mode_with_true_spread() {
        let m = MixtureSpec::new(vec![[0.0, 0.0], [5.0, 5.0]], 0.1, vec![1.0, 0.0]).unwrap();
        let b = sample_mixture(&m, 5_000, 4).unwrap();
        let cov = mode_coverage(&b.points, &m).unwrap();
        assert_eq!(cov.covered, 1);
        let d = intra_mode_dispersion(&b.points, &m).unwrap();
        assert!((d - 1.0).abs() < 0.06, "{d}");
    }
}
