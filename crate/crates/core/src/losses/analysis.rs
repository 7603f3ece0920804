//! Gradient-level analysis of the K+1 losses, dynamic labeling, and the
//! auxiliary discriminator losses for fake and unlabeled data.

use super::GeneratorLoss;
use crate::error::{check_len, Error, Result};
use crate::prob::{
    cross_entropy_raw, decompose, entropy_raw, mean_rows, Layout, ProbVector, LOG_FLOOR,
};

/// Negative gradient of the LabelGAN generator loss with respect to the
/// discriminator logits of one generated sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassAwareGradient {
    /// `D_k / D_r` for real classes, `-1` for the fake class.
    pub alpha: Vec<f64>,
    /// `1 - D_r`.
    pub overall_magnitude: f64,
    /// `overall_magnitude · alpha`.
    pub per_logit: Vec<f64>,
}

pub fn class_aware_gradient(probs: &ProbVector) -> Result<ClassAwareGradient> {
    let k = match probs.layout() {
        Layout::RealPlusFake { real_classes } => real_classes,
        other => {
            return Err(Error::Layout(format!(
                "class-aware gradient needs a real-plus-fake vector, got {other:?}"
            )))
        }
    };
    let d = probs.as_slice();
    let d_r: f64 = d[..k].iter().sum();
    if d_r < LOG_FLOOR {
        return Err(Error::Degenerate(format!(
            "real mass {d_r} below {LOG_FLOOR}"
        )));
    }
    let overall_magnitude = 1.0 - d_r;
    let mut alpha: Vec<f64> = d[..k].iter().map(|dk| dk / d_r).collect();
    alpha.push(-1.0);
    let per_logit = alpha.iter().map(|a| overall_magnitude * a).collect();
    Ok(ClassAwareGradient {
        alpha,
        overall_magnitude,
        per_logit,
    })
}

/// Most probable real class under the discriminator; the fake entry of a
/// real-plus-fake vector never wins. Ties go to the lowest index.
pub fn dynamic_label(probs: &ProbVector) -> usize {
    argmax_first(&probs.as_slice()[..probs.layout().real_classes()])
}

pub(crate) fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Discriminator-side losses on fake samples relating AM-GAN to CatGAN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatGanTerms {
    /// `E[-H(D(x))]`.
    pub cat_entropy: f64,
    /// `E[H(F(v(K+1)), F(D(x)))]`, with the fake target carrying
    /// `negative_smoothing_mass` on the real side.
    pub am_fake_suppression: f64,
    /// `E[H(uniform_K, R(D(x)))] · negative_smoothing_mass`.
    pub am_smoothed_uniform: f64,
}

pub fn catgan_style_losses(
    probs: &[ProbVector],
    negative_smoothing_mass: f64,
) -> Result<CatGanTerms> {
    if probs.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if !(0.0..=1.0).contains(&negative_smoothing_mass) {
        return Err(Error::InvalidInput(format!(
            "negative smoothing mass must lie in [0, 1], got {negative_smoothing_mass}"
        )));
    }
    let n = probs.len() as f64;
    let fake_target = [negative_smoothing_mass, 1.0 - negative_smoothing_mass];
    let (mut cat, mut supp, mut unif) = (0.0, 0.0, 0.0);
    for p in probs {
        let d = decompose(p)?;
        cat -= entropy_raw(p.as_slice());
        supp += cross_entropy_raw(&fake_target, d.fake_split.as_slice());
        if negative_smoothing_mass > 0.0 {
            let k = d.real_part.len();
            unif += cross_entropy_raw(&vec![1.0 / k as f64; k], d.real_part.as_slice());
        }
    }
    Ok(CatGanTerms {
        cat_entropy: cat / n,
        am_fake_suppression: supp / n,
        am_smoothed_uniform: unif / n * negative_smoothing_mass,
    })
}

/// Discriminator losses for unlabeled data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnlabeledTerms {
    /// `E[H(v(x), D(x))]` with `v(x)` the dynamic-label one-hot.
    pub per_sample_fit: f64,
    /// `H(p_ref, R(E[D(x)]))`.
    pub batch_ref_fit: f64,
}

pub fn unlabeled_losses(probs: &[ProbVector], p_ref: &ProbVector) -> Result<UnlabeledTerms> {
    let first = probs.first().ok_or(Error::EmptyBatch)?;
    let k = match first.layout() {
        Layout::RealPlusFake { real_classes } => real_classes,
        other => {
            return Err(Error::Layout(format!(
                "expected real-plus-fake, got {other:?}"
            )))
        }
    };
    check_len(k, p_ref.len())?;
    let mut fit = 0.0;
    for p in probs {
        check_len(k + 1, p.len())?;
        let y = dynamic_label(p);
        fit -= p.as_slice()[y].max(LOG_FLOOR).ln();
    }
    let mean = mean_rows(probs.iter().map(ProbVector::as_slice));
    let mean = ProbVector::from_parts(mean, first.layout());
    let real_part = decompose(&mean)?.real_part;
    Ok(UnlabeledTerms {
        per_sample_fit: fit / probs.len() as f64,
        batch_ref_fit: cross_entropy_raw(p_ref.as_slice(), real_part.as_slice()),
    })
}

/// Negative gradient of a smoothed generator loss with respect to the real
/// logit of a two-class head, as a function of `D_r`.
///
/// `LogOneMinusD` with fake-side smoothing `λ1` gives `D_r - λ1`;
/// `NegLogD` with target `[1-λ, λ]` gives `(1 - λ) - D_r`.
pub fn smoothing_real_logit_gradient(d_r: f64, lambda: f64, variant: GeneratorLoss) -> f64 {
    match variant {
        GeneratorLoss::LogOneMinusD => d_r - lambda,
        GeneratorLoss::NegLogD => (1.0 - lambda) - d_r,
    }
}
