//! Classifier-based sample-quality scores and the mode-dropping simulator.
//!
//! Every score takes an explicit batch of classifier outputs `C(x)`; the
//! module never owns a classifier.

use std::io::BufRead;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::prob::{
    clamped_ln, entropy_raw, kl_divergence_raw, mean_rows, Layout, ProbVector, LOG_FLOOR,
};
use crate::rng::{stream, Purpose};

/// Non-empty batch of classifier outputs over a common `K` classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierBatch {
    rows: Vec<ProbVector>,
}

impl ClassifierBatch {
    pub fn new(rows: Vec<ProbVector>) -> Result<Self> {
        let k = rows.first().ok_or(Error::EmptyBatch)?.len();
        rows.iter().try_for_each(|r| check_len(k, r.len()))?;
        Ok(Self { rows })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let rows = rows
            .into_iter()
            .map(ProbVector::real_only)
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }

    /// Parses the columnar text format: a `K=<int>` header line, then one
    /// whitespace- or comma-separated row of `K` probabilities per sample.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn read_text<R: BufRead>(reader: R) -> Result<Self> {
        let mut classes = None;
        let mut rows = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let line = line.map_err(|e| parse_err(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some(k) = classes else {
                let k = line
                    .strip_prefix("K=")
                    .and_then(|v| v.trim().parse::<usize>().ok())
                    .filter(|k| *k >= 1)
                    .ok_or_else(|| parse_err(format!("expected header `K=<int>`, got `{line}`")))?;
                classes = Some(k);
                continue;
            };
            let values = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| parse_err(format!("not a number: `{t}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            if values.len() != k {
                return Err(parse_err(format!(
                    "expected {k} columns, found {}",
                    values.len()
                )));
            }
            let row = ProbVector::real_only(values).map_err(|e| parse_err(e.to_string()))?;
            rows.push(row);
        }
        if classes.is_none() {
            return Err(Error::Parse {
                line: 1,
                message: "missing `K=<int>` header".into(),
            });
        }
        Self::new(rows)
    }

    pub fn rows(&self) -> &[ProbVector] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn classes(&self) -> usize {
        self.rows[0].len()
    }

    /// `C̄^G`, the mean classifier output.
    pub fn marginal(&self) -> Vec<f64> {
        mean_rows(self.rows.iter().map(ProbVector::as_slice))
    }

    fn mean_of<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.rows.iter().map(|r| f(r.as_slice())).sum::<f64>() / self.rows.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InceptionScore {
    pub score: f64,
    /// `E[KL(C(x) ‖ C̄^G)]`.
    pub log_score: f64,
    /// `H(C̄^G)`.
    pub marginal_entropy: f64,
    /// `E[H(C(x))]`.
    pub mean_conditional_entropy: f64,
}

/// `exp(E[KL(C(x) ‖ C̄^G)])`.
pub fn inception_score(batch: &ClassifierBatch) -> InceptionScore {
    let marginal = batch.marginal();
    let log_score = batch.mean_of(|r| kl_divergence_raw(r, &marginal)).max(0.0);
    InceptionScore {
        score: log_score.exp(),
        log_score,
        marginal_entropy: entropy_raw(&marginal),
        mean_conditional_entropy: batch.mean_of(entropy_raw),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeScore {
    pub score: f64,
    /// Set when the reference distribution had entries below the log floor.
    pub clamped: bool,
}

/// `exp(E[KL(C(x) ‖ C̄^train)] - KL(C̄^G ‖ C̄^train))`.
pub fn mode_score(batch: &ClassifierBatch, train_dist: &ProbVector) -> Result<ModeScore> {
    check_len(batch.classes(), train_dist.len())?;
    let t = train_dist.as_slice();
    let clamped = t.iter().any(|p| *p < LOG_FLOOR);
    let marginal = batch.marginal();
    let log_score =
        (batch.mean_of(|r| kl_divergence_raw(r, t)) - kl_divergence_raw(&marginal, t)).max(0.0);
    Ok(ModeScore {
        score: log_score.exp(),
        clamped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmScore {
    pub score: f64,
    /// `KL(C̄^train ‖ C̄^G)`.
    pub kl_term: f64,
    /// `E[H(C(x))]`.
    pub entropy_term: f64,
}

/// `KL(C̄^train ‖ C̄^G) + E[H(C(x))]`; lower is better and zero is perfect.
pub fn am_score(batch: &ClassifierBatch, train_dist: &ProbVector) -> Result<AmScore> {
    check_len(batch.classes(), train_dist.len())?;
    let marginal = batch.marginal();
    let kl_term = kl_divergence_raw(train_dist.as_slice(), &marginal).max(0.0);
    let entropy_term = batch.mean_of(entropy_raw);
    Ok(AmScore {
        score: kl_term + entropy_term,
        kl_term,
        entropy_term,
    })
}

/// Every score of one batch against one reference distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub inception_score: f64,
    pub marginal_entropy: f64,
    pub mean_conditional_entropy: f64,
    pub mode_score: f64,
    pub mode_score_clamped: bool,
    pub am_score: f64,
    pub am_kl_term: f64,
    pub am_entropy_term: f64,
}

/// Tolerance of the entropy decomposition of the log inception score.
pub const DECOMPOSITION_TOL: f64 = 1e-9;

impl ScoreReport {
    pub fn evaluate(batch: &ClassifierBatch, train_dist: &ProbVector) -> Result<Self> {
        let is = inception_score(batch);
        let ms = mode_score(batch, train_dist)?;
        let am = am_score(batch, train_dist)?;
        Ok(Self {
            inception_score: is.score,
            marginal_entropy: is.marginal_entropy,
            mean_conditional_entropy: is.mean_conditional_entropy,
            mode_score: ms.score,
            mode_score_clamped: ms.clamped,
            am_score: am.score,
            am_kl_term: am.kl_term,
            am_entropy_term: am.entropy_term,
        })
    }

    /// `|log IS - (H(C̄) - E[H(C)])|`.
    pub fn decomposition_error(&self) -> f64 {
        (self.inception_score.ln() - (self.marginal_entropy - self.mean_conditional_entropy)).abs()
    }

    pub fn check_identities(&self) -> Result<()> {
        let err = self.decomposition_error();
        if err > DECOMPOSITION_TOL {
            return Err(Error::Degenerate(format!(
                "entropy decomposition of the inception score off by {err:e}"
            )));
        }
        let am = (self.am_score - self.am_kl_term - self.am_entropy_term).abs();
        if am > 1e-12 || self.am_score < 0.0 {
            return Err(Error::Degenerate(format!(
                "AM score terms inconsistent ({am:e})"
            )));
        }
        Ok(())
    }
}

/// Class density of the points in the mode-dropping simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Density {
    Uniform,
    /// Weights `∝ exp(-(i - mean)² / (2 std²))` over the class index `i`.
    Gaussian {
        mean: f64,
        std: f64,
    },
}

impl Density {
    /// `mean = N/2`, `std = N/4`.
    pub fn gaussian_default(n_points: usize) -> Self {
        Density::Gaussian {
            mean: n_points as f64 / 2.0,
            std: n_points as f64 / 4.0,
        }
    }

    fn weight(&self, i: usize) -> f64 {
        match *self {
            Density::Uniform => 1.0,
            Density::Gaussian { mean, std } => {
                let d = i as f64 - mean;
                (-d * d / (2.0 * std * std)).exp()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeDropConfig {
    pub n_points: usize,
    pub density: Density,
    /// Largest number of dropped points; the series covers `dropped` down to 0.
    pub dropped: usize,
    pub trials: usize,
    pub seed: u64,
}

impl ModeDropConfig {
    /// Full sweep from one kept point to all `n_points`, 1000 trials each.
    pub fn new(n_points: usize, density: Density, seed: u64) -> Self {
        Self {
            n_points,
            density,
            dropped: n_points.saturating_sub(1),
            trials: 1000,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < 2 {
            return Err(Error::Config(format!(
                "need at least 2 points, got {}",
                self.n_points
            )));
        }
        if self.dropped >= self.n_points {
            return Err(Error::Config(format!(
                "cannot drop {} of {} points",
                self.dropped, self.n_points
            )));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if let Density::Gaussian { mean, std } = self.density {
            if !mean.is_finite() || !(std.is_finite() && std > 0.0) {
                return Err(Error::Config(format!(
                    "bad gaussian density ({mean}, {std})"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeDropPoint {
    pub kept: usize,
    pub dropped: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// `E_x[KL(C(x) ‖ C̄^G)]` for one-hot rows `C(x_i) = v(i)` over the kept
/// points, each weighted by the class density renormalized over the kept set.
pub fn mode_drop_log_score(n_points: usize, density: Density, kept: &[usize]) -> f64 {
    let raw: Vec<f64> = kept.iter().map(|&i| density.weight(i)).collect();
    let total: f64 = raw.iter().sum();
    let mut marginal = vec![0.0; n_points];
    for (&i, w) in kept.iter().zip(&raw) {
        marginal[i] += w / total;
    }
    // KL(v(i) ‖ C̄) = -log C̄_i.
    kept.iter()
        .zip(&raw)
        .map(|(&i, w)| -(w / total) * clamped_ln(marginal[i]))
        .sum::<f64>()
        .max(0.0)
}

/// Log-domain score series over kept counts `N - dropped ..= N`, ascending.
pub fn mode_drop_simulation(config: &ModeDropConfig) -> Result<Vec<ModeDropPoint>> {
    config.validate()?;
    let n = config.n_points;
    (n - config.dropped..=n)
        .map(|kept| {
            let (mut sum, mut min, mut max) = (0.0, f64::INFINITY, f64::NEG_INFINITY);
            for trial in 0..config.trials {
                let mut rng = stream(
                    config.seed,
                    Purpose::ModeDrop,
                    ((kept as u64) << 32) | trial as u64,
                );
                let mut set = index::sample(&mut rng, n, kept).into_vec();
                set.sort_unstable();
                let s = mode_drop_log_score(n, config.density, &set);
                sum += s;
                min = min.min(s);
                max = max.max(s);
            }
            Ok(ModeDropPoint {
                kept,
                dropped: n - kept,
                mean: sum / config.trials as f64,
                min,
                max,
            })
        })
        .collect()
}

/// Builds a `K`-class reference distribution, rejecting mismatched layouts.
pub fn reference_distribution(values: Vec<f64>) -> Result<ProbVector> {
    let k = values.len();
    ProbVector::new(values, Layout::RealOnly { classes: k })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn batch(rows: &[&[f64]]) -> ClassifierBatch {
        ClassifierBatch::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn identical_rows_score_exactly_one() {
        let b = batch(&[&[0.2, 0.3, 0.5], &[0.2, 0.3, 0.5], &[0.2, 0.3, 0.5]]);
        assert_eq!(inception_score(&b).score, 1.0);
    }

    #[test]
    fn one_hot_per_class_scores_k() {
        let b = batch(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]);
        assert!((inception_score(&b).score - 4.0).abs() < 1e-12);
    }

    #[test]
    fn single_row_mode_score_is_one() {
        let b = batch(&[&[0.1, 0.9]]);
        let t = reference_distribution(vec![0.3, 0.7]).unwrap();
        assert!((mode_score(&b, &t).unwrap().score - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_reference_entries_are_flagged() {
        let b = batch(&[&[0.1, 0.9], &[0.5, 0.5]]);
        let t = reference_distribution(vec![0.0, 1.0]).unwrap();
        let ms = mode_score(&b, &t).unwrap();
        assert!(ms.clamped);
        assert!((ms.score - inception_score(&b).score).abs() < 1e-9);
    }

    #[test]
    fn am_score_examples() {
        let perfect = batch(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let u = ProbVector::uniform(2);
        assert_eq!(am_score(&perfect, &u).unwrap().score, 0.0);

        let flat = batch(&[&[0.25; 4], &[0.25; 4]]);
        let am = am_score(&flat, &ProbVector::uniform(4)).unwrap();
        assert!((am.score - 4f64.ln()).abs() < 1e-15);
        assert_eq!(am.kl_term, 0.0);
    }

    #[test]
    fn report_identities_hold() {
        let b = batch(&[&[0.7, 0.2, 0.1], &[0.1, 0.1, 0.8], &[0.3, 0.4, 0.3]]);
        let r = ScoreReport::evaluate(&b, &ProbVector::uniform(3)).unwrap();
        r.check_identities().unwrap();
        assert!((r.mode_score - r.inception_score).abs() < 1e-9);
    }

    #[test]
    fn text_format_round_trip_and_errors() {
        let b =
            ClassifierBatch::read_text("K=2\n0.5 0.5\n# note\n\n0.25,0.75\n".as_bytes()).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b.classes(), 2);
        let e = ClassifierBatch::read_text("K=2\n0.5 0.5\n0.5\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        let e = ClassifierBatch::read_text("0.5 0.5\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = ClassifierBatch::read_text("K=2\n0.5 x\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert_eq!(
            ClassifierBatch::read_text("K=2\n".as_bytes()),
            Err(Error::EmptyBatch)
        );
    }

    #[test]
    fn uniform_mode_drop_is_log_kept() {
        let cfg = ModeDropConfig {
            trials: 20,
            ..ModeDropConfig::new(10, Density::Uniform, 3)
        };
        let series = mode_drop_simulation(&cfg).unwrap();
        assert_eq!(series.len(), 10);
        for p in &series {
            let want = (p.kept as f64).ln();
            assert!((p.mean - want).abs() < 1e-12);
            assert!((p.min - want).abs() < 1e-12 && (p.max - want).abs() < 1e-12);
        }
    }

    #[test]
    fn single_kept_point_scores_zero_under_any_density() {
        let d = Density::gaussian_default(10);
        assert_eq!(mode_drop_log_score(10, d, &[4]), 0.0);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = ModeDropConfig::new(10, Density::Uniform, 0);
        cfg.dropped = 10;
        assert!(matches!(mode_drop_simulation(&cfg), Err(Error::Config(_))));
        assert!(ModeDropConfig::new(1, Density::Uniform, 0)
            .validate()
            .is_err());
        cfg.dropped = 2;
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
    }
}
