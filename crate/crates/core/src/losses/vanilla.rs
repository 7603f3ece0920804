//! Two-class real/fake losses, with optional label smoothing.

use super::{check_batch, scale, softmax_ce, GeneratorLoss, LossBundle, LossPart, Smoothing};
use crate::error::Result;
use crate::prob::LogitVector;

/// Generator loss on one fake sample's `[real, fake]` logits.
pub(crate) fn binary_generator_sample(
    logits: &[f64],
    generator_loss: GeneratorLoss,
    smoothing: Smoothing,
) -> (f64, Vec<f64>) {
    match generator_loss {
        GeneratorLoss::NegLogD => softmax_ce(&[1.0 - smoothing.real, smoothing.real], logits),
        GeneratorLoss::LogOneMinusD => {
            // Negated discriminator loss on fakes.
            let (loss, grad) = softmax_ce(&[smoothing.fake, 1.0 - smoothing.fake], logits);
            (-loss, scale(grad, -1.0))
        }
    }
}

pub(crate) fn binary_discriminator_sample(
    logits: &[f64],
    is_real: bool,
    smoothing: Smoothing,
) -> (f64, Vec<f64>) {
    let target = if is_real {
        [1.0 - smoothing.real, smoothing.real]
    } else {
        [smoothing.fake, 1.0 - smoothing.fake]
    };
    softmax_ce(&target, logits)
}

pub fn vanilla_generator(
    fake: &[LogitVector],
    generator_loss: GeneratorLoss,
    smoothing: Smoothing,
) -> Result<LossPart> {
    check_batch(fake, 2)?;
    let inv = 1.0 / fake.len() as f64;
    let mut loss = 0.0;
    let mut logit_grads = Vec::with_capacity(fake.len());
    for l in fake {
        let (li, gi) = binary_generator_sample(l.as_slice(), generator_loss, smoothing);
        loss += li;
        logit_grads.push(scale(gi, inv));
    }
    Ok(LossPart {
        loss: loss * inv,
        logit_grads,
    })
}

pub fn vanilla_discriminator(
    real: &[LogitVector],
    fake: &[LogitVector],
    smoothing: Smoothing,
) -> Result<LossPart> {
    check_batch(real, 2)?;
    check_batch(fake, 2)?;
    let mut loss = 0.0;
    let mut logit_grads = Vec::with_capacity(real.len() + fake.len());
    for (batch, is_real) in [(real, true), (fake, false)] {
        let inv = 1.0 / batch.len() as f64;
        let mut part = 0.0;
        for l in batch {
            let (li, gi) = binary_discriminator_sample(l.as_slice(), is_real, smoothing);
            part += li;
            logit_grads.push(scale(gi, inv));
        }
        loss += part * inv;
    }
    Ok(LossPart { loss, logit_grads })
}

/// Original two-class GAN losses on `[real, fake]` discriminator logits.
pub fn vanilla_gan_losses(
    real: &[LogitVector],
    fake: &[LogitVector],
    generator_loss: GeneratorLoss,
    smoothing: Smoothing,
) -> Result<LossBundle> {
    let g = vanilla_generator(fake, generator_loss, smoothing)?;
    let d = vanilla_discriminator(real, fake, smoothing)?;
    LossBundle::from_parts(g, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn logits(v: &[f64]) -> LogitVector {
        LogitVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn half_probability_gives_ln2() {
        let even = [logits(&[0.0, 0.0])];
        let b =
            vanilla_gan_losses(&even, &even, GeneratorLoss::NegLogD, Smoothing::default()).unwrap();
        assert!((b.g_loss - 2f64.ln()).abs() < 1e-15);
        // ln 2 from the real half plus ln 2 from the fake half.
        assert!((b.d_loss - 2.0 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn log_one_minus_d_is_log_of_fake_prob() {
        let fake = [logits(&[0.4, -0.3])];
        let g =
            vanilla_generator(&fake, GeneratorLoss::LogOneMinusD, Smoothing::default()).unwrap();
        let d_r = 1.0 / (1.0 + (-0.7f64).exp());
        assert!((g.loss - (1.0 - d_r).ln()).abs() < 1e-14);
    }

    #[test]
    fn empty_batches_are_rejected() {
        let one = [logits(&[0.0, 0.0])];
        assert_eq!(
            vanilla_gan_losses(&[], &one, GeneratorLoss::NegLogD, Smoothing::default()),
            Err(Error::EmptyBatch)
        );
        assert_eq!(
            vanilla_generator(&[], GeneratorLoss::NegLogD, Smoothing::default()),
            Err(Error::EmptyBatch)
        );
    }
}
