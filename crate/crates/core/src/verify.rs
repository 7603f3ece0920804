//! Seeded property suites over the loss and metric identities. Each check
//! reports the worst error it saw so a report can be compared across builds.

use rand::distr::Uniform;
use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::losses::{
    acgan_generator, class_aware_gradient, hierarchical_probs, labelgan_generator,
    smoothing_real_logit_gradient, AcganOptions, GeneratorLoss, SplitLogits,
};
use crate::metrics::{
    am_score, inception_score, mode_drop_simulation, mode_score, ClassifierBatch, Density,
    ModeDropConfig, ScoreReport,
};
use crate::prob::{
    ce_logit_gradient, cross_entropy, cross_entropy_raw, decomposed_cross_entropy, softmax,
    softmax_slice, Layout, LogitVector, ProbVector, TargetVector,
};
use crate::rng::{stream, Purpose};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub worst_error: f64,
    pub tolerance: f64,
}

impl PropertyResult {
    fn new(name: &str, cases: usize, worst_error: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            passed: worst_error <= tolerance,
            cases,
            worst_error,
            tolerance,
        }
    }

    fn exact(name: &str, cases: usize, ok: bool, worst_error: f64) -> Self {
        Self {
            name: name.to_string(),
            passed: ok,
            cases,
            worst_error,
            tolerance: 0.0,
        }
    }
}

fn case_rng(seed: u64, suite: u64, case: usize) -> impl Rng {
    stream(seed, Purpose::Verify, (suite << 32) | case as u64)
}

fn random_logits<R: Rng>(rng: &mut R, n: usize, spread: f64) -> LogitVector {
    let d = Uniform::new_inclusive(-spread, spread).expect("valid range");
    LogitVector::new((0..n).map(|_| rng.sample(d)).collect()).expect("finite logits")
}

/// A random point on the simplex, sometimes with exact zeros or a one-hot.
fn random_simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    match rng.random_range(0..4) {
        0 => {
            let mut v = vec![0.0; n];
            v[rng.random_range(0..n)] = 1.0;
            v
        }
        1 => {
            let mut v: Vec<f64> = (0..n)
                .map(|_| {
                    if rng.random_bool(0.5) {
                        0.0
                    } else {
                        rng.random::<f64>()
                    }
                })
                .collect();
            v[rng.random_range(0..n)] += 0.5;
            let s: f64 = v.iter().sum();
            v.iter().map(|x| x / s).collect()
        }
        _ => {
            let l: Vec<f64> = (0..n).map(|_| 4.0 * rng.random::<f64>() - 2.0).collect();
            softmax_slice(&l)
        }
    }
}

/// Largest component error relative to the larger infinity norm, floored.
fn vec_rel_err(a: &[f64], b: &[f64], floor: f64) -> f64 {
    let diff = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let scale = a.iter().chain(b).map(|x| x.abs()).fold(floor, f64::max);
    diff / scale
}

fn central_gradient<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut p = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = p[i];
            let mut at = |d: f64| {
                p[i] = orig + d;
                let v = f(&p);
                p[i] = orig;
                v
            };
            (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h)
        })
        .collect()
}

/// Negative logit gradient of `H(t, σ(l))` against finite differences.
/// Generic over the gradient so a deliberately broken one can be checked.
pub fn check_logit_gradient<G>(grad: G, cases: usize, seed: u64) -> Result<PropertyResult>
where
    G: Fn(&TargetVector, &LogitVector) -> Result<Vec<f64>>,
{
    let mut worst = 0.0f64;
    for c in 0..cases {
        let mut rng = case_rng(seed, 1, c);
        let n = rng.random_range(2..=16);
        let logits = random_logits(&mut rng, n, 4.0);
        let t = random_simplex(&mut rng, n);
        let target = TargetVector::soft(ProbVector::real_only(t.clone())?);
        let analytic = grad(&target, &logits)?;
        let fd = central_gradient(
            |l| cross_entropy_raw(&t, &softmax_slice(l)),
            logits.as_slice(),
            1e-3,
        );
        let neg: Vec<f64> = fd.iter().map(|g| -g).collect();
        worst = worst.max(vec_rel_err(&analytic, &neg, 1e-6));
    }
    Ok(PropertyResult::new("logit_gradient", cases, worst, 1e-6))
}

pub fn check_decomposition(cases: usize, seed: u64) -> Result<PropertyResult> {
    let mut worst = 0.0f64;
    for c in 0..cases {
        let mut rng = case_rng(seed, 2, c);
        let k = rng.random_range(2..=12);
        let mut p = random_simplex(&mut rng, k + 1);
        match c % 5 {
            // Pure fake: r_mass = 0.
            0 => p = (0..=k).map(|i| if i == k { 1.0 } else { 0.0 }).collect(),
            // No fake mass: r_mass = 1.
            1 => {
                p[k] = 0.0;
                let s: f64 = p.iter().sum();
                if s == 0.0 {
                    p[0] = 1.0;
                } else {
                    p.iter_mut().for_each(|x| *x /= s);
                }
            }
            _ => {}
        }
        let probs = ProbVector::new(p, Layout::RealPlusFake { real_classes: k })?;
        let target = match rng.random_range(0..3) {
            0 => TargetVector::one_hot_full(rng.random_range(0..k), k)?,
            1 => TargetVector::fake(k),
            _ => TargetVector::soft(ProbVector::new(
                random_simplex(&mut rng, k + 1),
                Layout::RealPlusFake { real_classes: k },
            )?),
        };
        let d = decomposed_cross_entropy(&target, &probs)?;
        let direct = cross_entropy(&target, &probs)?;
        worst = worst.max((d.total - direct).abs());
    }
    Ok(PropertyResult::new(
        "cross_entropy_decomposition",
        cases,
        worst,
        1e-10,
    ))
}

fn random_batch<R: Rng>(rng: &mut R, max_rows: usize, max_k: usize) -> Result<ClassifierBatch> {
    let k = rng.random_range(2..=max_k);
    let n = rng.random_range(1..=max_rows);
    ClassifierBatch::from_rows((0..n).map(|_| random_simplex(rng, k)).collect())
}

fn full_support<R: Rng>(rng: &mut R, k: usize) -> Result<ProbVector> {
    let v: Vec<f64> = (0..k).map(|_| 0.05 + rng.random::<f64>()).collect();
    let s: f64 = v.iter().sum();
    ProbVector::real_only(v.into_iter().map(|x| x / s).collect())
}

pub fn check_mode_score_equivalence(cases: usize, seed: u64) -> Result<PropertyResult> {
    let mut worst = 0.0f64;
    for c in 0..cases {
        let mut rng = case_rng(seed, 3, c);
        let batch = random_batch(&mut rng, 256, 20)?;
        let train = full_support(&mut rng, batch.classes())?;
        let is = inception_score(&batch).score;
        let ms = mode_score(&batch, &train)?.score;
        worst = worst.max((is - ms).abs());
    }
    Ok(PropertyResult::new(
        "mode_score_equals_inception_score",
        cases,
        worst,
        1e-9,
    ))
}

pub fn check_entropy_decomposition(cases: usize, seed: u64) -> Result<PropertyResult> {
    let mut worst = 0.0f64;
    for c in 0..cases {
        let mut rng = case_rng(seed, 4, c);
        let batch = random_batch(&mut rng, 128, 20)?;
        let train = full_support(&mut rng, batch.classes())?;
        worst = worst.max(ScoreReport::evaluate(&batch, &train)?.decomposition_error());
    }
    Ok(PropertyResult::new(
        "inception_entropy_decomposition",
        cases,
        worst,
        1e-9,
    ))
}

/// Negative LabelGAN generator gradient against finite differences, plus
/// the exact `1 - D_r` overall magnitude.
pub fn check_class_aware_gradient(
    cases: usize,
    seed: u64,
) -> Result<(PropertyResult, PropertyResult)> {
    let mut worst = 0.0f64;
    let mut magnitude_ok = true;
    let mut worst_mag = 0.0f64;
    for c in 0..cases {
        let mut rng = case_rng(seed, 5, c);
        let k = rng.random_range(2..=10);
        let logits = random_logits(&mut rng, k + 1, 3.0);
        let probs = softmax(&logits).with_layout(Layout::RealPlusFake { real_classes: k })?;
        let cag = class_aware_gradient(&probs)?;
        let loss = |l: &[f64]| {
            let p = softmax_slice(l);
            -p[..k].iter().sum::<f64>().ln()
        };
        let fd: Vec<f64> = central_gradient(loss, logits.as_slice(), 1e-3)
            .iter()
            .map(|g| -g)
            .collect();
        let diff = cag
            .per_logit
            .iter()
            .zip(&fd)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(diff);
        let d_r: f64 = probs.as_slice()[..k].iter().sum();
        let gap = (cag.overall_magnitude - (1.0 - d_r)).abs();
        worst_mag = worst_mag.max(gap);
        magnitude_ok &= gap == 0.0;
        // The batch loss must agree with the per-sample form.
        let g = labelgan_generator(std::slice::from_ref(&logits))?;
        let diff = cag
            .per_logit
            .iter()
            .zip(&g.logit_grads[0])
            .map(|(a, b)| (a + b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(diff);
    }
    Ok((
        PropertyResult::new("class_aware_gradient", cases, worst, 1e-8),
        PropertyResult::exact("class_aware_magnitude", cases, magnitude_ok, worst_mag),
    ))
}

pub fn check_acgan_hierarchy(cases: usize, seed: u64) -> Result<PropertyResult> {
    let mut worst = 0.0f64;
    for c in 0..cases {
        let mut rng = case_rng(seed, 6, c);
        let k = rng.random_range(2..=10);
        let split = SplitLogits::new(
            random_logits(&mut rng, 2, 4.0),
            random_logits(&mut rng, k, 4.0),
        )?;
        let y = rng.random_range(0..k);
        let g = acgan_generator(std::slice::from_ref(&split), &[y], &AcganOptions::default())?;
        let h = hierarchical_probs(&softmax(&split.binary), &softmax(&split.classifier))?;
        let direct = cross_entropy(&TargetVector::one_hot_full(y, k)?, &h)?;
        worst = worst.max((g.loss - direct).abs());
    }
    Ok(PropertyResult::new(
        "acgan_hierarchical_form",
        cases,
        worst,
        1e-10,
    ))
}

pub fn check_collapse_floor(cases: usize, seed: u64) -> Result<PropertyResult> {
    let mut ok = true;
    let mut worst = 0.0f64;
    for c in 0..cases {
        let mut rng = case_rng(seed, 7, c);
        let k = rng.random_range(2..=20);
        let row = random_simplex(&mut rng, k);
        let n = rng.random_range(1..=64);
        let s = inception_score(&ClassifierBatch::from_rows(vec![row; n])?).score;
        ok &= s == 1.0;
        worst = worst.max((s - 1.0).abs());
    }
    Ok(PropertyResult::exact(
        "identical_rows_score_one",
        cases,
        ok,
        worst,
    ))
}

pub fn check_uniform_mode_drop(seed: u64) -> Result<PropertyResult> {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in [10, 100] {
        let cfg = ModeDropConfig {
            trials: 50,
            ..ModeDropConfig::new(n, Density::Uniform, seed)
        };
        for p in mode_drop_simulation(&cfg)? {
            let want = (p.kept as f64).ln();
            worst = worst
                .max((p.mean - want).abs())
                .max((p.min - want).abs())
                .max((p.max - want).abs());
            cases += 1;
        }
    }
    Ok(PropertyResult::new(
        "uniform_mode_drop_is_log_kept",
        cases,
        worst,
        1e-9,
    ))
}

pub fn check_gaussian_mode_drop_monotone(seed: u64) -> Result<PropertyResult> {
    let cfg = ModeDropConfig::new(10, Density::gaussian_default(10), seed);
    let series = mode_drop_simulation(&cfg)?;
    // Worst decrease between consecutive kept counts.
    let worst = series
        .windows(2)
        .map(|w| (w[0].mean - w[1].mean).max(0.0))
        .fold(0.0, f64::max);
    Ok(PropertyResult::exact(
        "gaussian_mode_drop_non_decreasing",
        series.len(),
        worst == 0.0,
        worst,
    ))
}

pub fn check_smoothing_stationary_points() -> Result<(PropertyResult, PropertyResult)> {
    let lambdas = [0.0, 0.05, 0.1, 0.2, 0.3, 0.45];
    let mut worst = 0.0f64;
    for &l in &lambdas {
        worst = worst
            .max(smoothing_real_logit_gradient(l, l, GeneratorLoss::LogOneMinusD).abs())
            .max(smoothing_real_logit_gradient(1.0 - l, l, GeneratorLoss::NegLogD).abs());
    }
    let stationary = PropertyResult::exact(
        "smoothing_stationary_points",
        2 * lambdas.len(),
        worst == 0.0,
        worst,
    );
    let mut agree = true;
    for i in 1..=999 {
        let d_r = i as f64 / 1000.0;
        let a = smoothing_real_logit_gradient(d_r, 0.0, GeneratorLoss::LogOneMinusD);
        let b = smoothing_real_logit_gradient(d_r, 0.0, GeneratorLoss::NegLogD);
        agree &= a.signum() == b.signum();
    }
    Ok((
        stationary,
        PropertyResult::exact("generator_losses_agree_in_sign", 999, agree, 0.0),
    ))
}

pub fn check_am_score_floor(cases: usize, seed: u64) -> Result<PropertyResult> {
    let mut worst = 0.0f64;
    for c in 0..cases {
        let mut rng = case_rng(seed, 8, c);
        let k = rng.random_range(2..=12);
        // Integer counts define both the batch and the reference.
        let counts: Vec<usize> = (0..k).map(|_| rng.random_range(1..=20)).collect();
        let total: usize = counts.iter().sum();
        let mut rows = Vec::with_capacity(total);
        for (i, &m) in counts.iter().enumerate() {
            for _ in 0..m {
                let mut r = vec![0.0; k];
                r[i] = 1.0;
                rows.push(r);
            }
        }
        let train =
            ProbVector::real_only(counts.iter().map(|&m| m as f64 / total as f64).collect())?;
        let am = am_score(&ClassifierBatch::from_rows(rows)?, &train)?;
        worst = worst.max(am.score.abs());
    }
    Ok(PropertyResult::new(
        "am_score_perfect_batch_is_zero",
        cases,
        worst,
        1e-10,
    ))
}

/// Every suite with its default case count.
pub fn run_all(seed: u64) -> Result<Vec<PropertyResult>> {
    let (cag, mag) = check_class_aware_gradient(500, seed)?;
    let (stat, sign) = check_smoothing_stationary_points()?;
    Ok(vec![
        check_logit_gradient(ce_logit_gradient, 1000, seed)?,
        check_decomposition(1000, seed)?,
        check_mode_score_equivalence(1000, seed)?,
        check_entropy_decomposition(1000, seed)?,
        cag,
        mag,
        check_acgan_hierarchy(500, seed)?,
        check_collapse_floor(200, seed)?,
        check_uniform_mode_drop(seed)?,
        check_gaussian_mode_drop_monotone(seed)?,
        stat,
        sign,
        check_am_score_floor(200, seed)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_properties_pass() {
        for r in run_all(0).unwrap() {
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn sign_flip_in_the_logit_gradient_is_caught() {
        let flipped = |t: &TargetVector, l: &LogitVector| {
            ce_logit_gradient(t, l).map(|g| g.into_iter().map(|v| -v).collect())
        };
        let r = check_logit_gradient(flipped, 100, 0).unwrap();
        assert!(!r.passed);
    }
}
