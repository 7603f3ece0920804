//! AC-GAN* family: a two-class real/fake head plus an auxiliary `K`-class
//! classifier sharing the discriminator trunk.

use super::vanilla::{binary_discriminator_sample, binary_generator_sample};
use super::{check_labels, scale, softmax_ce, GeneratorLoss, LossBundle, LossPart, Smoothing};
use crate::error::{check_len, Error, Result};
use crate::prob::{cross_entropy_raw, Layout, LogitVector, ProbVector};

/// Discriminator outputs of one sample for the AC-GAN family.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitLogits {
    /// `[real, fake]`.
    pub binary: LogitVector,
    /// One logit per real class.
    pub classifier: LogitVector,
}

impl SplitLogits {
    pub fn new(binary: LogitVector, classifier: LogitVector) -> Result<Self> {
        check_len(2, binary.len())?;
        Ok(Self { binary, classifier })
    }

    /// Splits a `2 + K` row into its binary and classifier parts.
    pub fn from_row(row: &[f64]) -> Result<Self> {
        if row.len() < 4 {
            return Err(Error::InvalidInput(format!(
                "AC-GAN head needs 2 + K >= 4 logits, got {}",
                row.len()
            )));
        }
        Ok(Self {
            binary: LogitVector::new(row[..2].to_vec())?,
            classifier: LogitVector::new(row[2..].to_vec())?,
        })
    }

    pub fn classes(&self) -> usize {
        self.classifier.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcganOptions {
    /// Weight of `H(u(y), C(x))` in the generator loss.
    pub aux_weight: f64,
    /// Adds `E_G[H(u(y), C(x))]` to the discriminator (the original AC-GAN).
    pub include_fake_aux: bool,
    /// Adds `E_G[H(uniform, C(x))]` to the discriminator (AC-GAN*+).
    pub uniform_fake_aux: bool,
    pub generator_loss: GeneratorLoss,
    pub smoothing: Smoothing,
}

impl Default for AcganOptions {
    fn default() -> Self {
        Self {
            aux_weight: 1.0,
            include_fake_aux: false,
            uniform_fake_aux: false,
            generator_loss: GeneratorLoss::NegLogD,
            smoothing: Smoothing::default(),
        }
    }
}

fn classes_of(batch: &[SplitLogits]) -> Result<usize> {
    let k = batch.first().ok_or(Error::EmptyBatch)?.classes();
    if k < 2 {
        return Err(Error::InvalidInput(
            "classifier needs at least 2 classes".into(),
        ));
    }
    batch.iter().try_for_each(|s| check_len(k, s.classes()))?;
    Ok(k)
}

fn one_hot(n: usize, y: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[y] = 1.0;
    v
}

fn concat(mut binary: Vec<f64>, classifier: Vec<f64>) -> Vec<f64> {
    binary.extend(classifier);
    binary
}

/// `E_G[H([1,0], [D_r, D_f]) + aux_weight · H(u(y), C(x))]`.
///
/// Gradients are laid out as `[real, fake, classifier...]`.
pub fn acgan_generator(
    fake: &[SplitLogits],
    targets: &[usize],
    opts: &AcganOptions,
) -> Result<LossPart> {
    let k = classes_of(fake)?;
    check_labels(targets, fake.len(), k)?;
    let inv = 1.0 / fake.len() as f64;
    let mut loss = 0.0;
    let mut logit_grads = Vec::with_capacity(fake.len());
    for (s, &y) in fake.iter().zip(targets) {
        let (bl, bg) =
            binary_generator_sample(s.binary.as_slice(), opts.generator_loss, opts.smoothing);
        let (cl, cg) = softmax_ce(&one_hot(k, y), s.classifier.as_slice());
        loss += bl + opts.aux_weight * cl;
        logit_grads.push(scale(concat(bg, scale(cg, opts.aux_weight)), inv));
    }
    Ok(LossPart {
        loss: loss * inv,
        logit_grads,
    })
}

/// Real/fake loss on both batches plus the classifier loss on real data, and
/// the optional fake-side classifier terms selected by `opts`.
pub fn acgan_discriminator(
    real: &[SplitLogits],
    real_labels: &[usize],
    fake: &[SplitLogits],
    fake_targets: Option<&[usize]>,
    opts: &AcganOptions,
) -> Result<LossPart> {
    let k = classes_of(real)?;
    if classes_of(fake)? != k {
        return Err(Error::Shape {
            expected: k,
            found: fake[0].classes(),
        });
    }
    check_labels(real_labels, real.len(), k)?;
    if opts.include_fake_aux {
        let targets = fake_targets.ok_or_else(|| {
            Error::InvalidInput("fake-side auxiliary loss needs fake targets".into())
        })?;
        check_labels(targets, fake.len(), k)?;
    }

    let mut loss = 0.0;
    let mut logit_grads = Vec::with_capacity(real.len() + fake.len());

    let inv = 1.0 / real.len() as f64;
    let mut part = 0.0;
    for (s, &y) in real.iter().zip(real_labels) {
        let (bl, bg) = binary_discriminator_sample(s.binary.as_slice(), true, opts.smoothing);
        let (cl, cg) = softmax_ce(&one_hot(k, y), s.classifier.as_slice());
        part += bl + cl;
        logit_grads.push(scale(concat(bg, cg), inv));
    }
    loss += part * inv;

    let inv = 1.0 / fake.len() as f64;
    let uniform = vec![1.0 / k as f64; k];
    let mut part = 0.0;
    for (i, s) in fake.iter().enumerate() {
        let (bl, bg) = binary_discriminator_sample(s.binary.as_slice(), false, opts.smoothing);
        part += bl;
        let mut cg_total = vec![0.0; k];
        if opts.include_fake_aux {
            let y = fake_targets.expect("checked above")[i];
            let (cl, cg) = softmax_ce(&one_hot(k, y), s.classifier.as_slice());
            part += cl;
            cg_total.iter_mut().zip(&cg).for_each(|(a, b)| *a += b);
        }
        if opts.uniform_fake_aux {
            let (cl, cg) = softmax_ce(&uniform, s.classifier.as_slice());
            part += cl;
            cg_total.iter_mut().zip(&cg).for_each(|(a, b)| *a += b);
        }
        logit_grads.push(scale(concat(bg, cg_total), inv));
    }
    loss += part * inv;

    Ok(LossPart { loss, logit_grads })
}

pub fn acgan_star_losses(
    real: &[SplitLogits],
    real_labels: &[usize],
    fake: &[SplitLogits],
    fake_targets: &[usize],
    opts: &AcganOptions,
) -> Result<LossBundle> {
    let d = acgan_discriminator(real, real_labels, fake, Some(fake_targets), opts)?;
    let g = acgan_generator(fake, fake_targets, opts)?;
    LossBundle::from_parts(g, d)
}

/// `E_G[H(uniform_K, C(x))]`, the term AC-GAN*+ adds to the discriminator.
pub fn acgan_star_plus_extra(c_probs: &[ProbVector]) -> Result<f64> {
    let k = c_probs.first().ok_or(Error::EmptyBatch)?.len();
    let uniform = vec![1.0 / k as f64; k];
    let mut total = 0.0;
    for c in c_probs {
        check_len(k, c.len())?;
        total += cross_entropy_raw(&uniform, c.as_slice());
    }
    Ok(total / c_probs.len() as f64)
}

/// The `K+1`-class view of a two-class head and a `K`-class classifier:
/// `[D_r · C(x), D_f]`.
pub fn hierarchical_probs(binary: &ProbVector, classifier: &ProbVector) -> Result<ProbVector> {
    check_len(2, binary.len())?;
    let d_r = binary.as_slice()[0];
    let mut values: Vec<f64> = classifier.as_slice().iter().map(|c| d_r * c).collect();
    values.push(binary.as_slice()[1]);
    ProbVector::new(
        values,
        Layout::RealPlusFake {
            real_classes: classifier.len(),
        },
    )
}
