//! LabelGAN and AM-GAN: one softmax over `K` real classes plus a fake class.

use super::{check_batch, check_labels, scale, softmax_ce, LossBundle, LossPart};
use crate::error::{Error, Result};
use crate::prob::{cross_entropy_raw, softmax_slice, LogitVector};

fn real_classes_of(logits: &[LogitVector]) -> Result<usize> {
    let first = logits.first().ok_or(Error::EmptyBatch)?;
    let k = first.len() - 1;
    if k < 2 {
        return Err(Error::InvalidInput(format!(
            "K+1 head needs at least 2 real classes, got {k}"
        )));
    }
    check_batch(logits, k + 1)?;
    Ok(k)
}

/// `-log D_r` for one sample, with gradient `σ(l) - [R(σ(l)), 0]`.
pub(crate) fn labelgan_generator_sample(logits: &[f64], k: usize) -> (f64, Vec<f64>) {
    let sigma = softmax_slice(logits);
    let d_r: f64 = sigma[..k].iter().sum();
    let loss = cross_entropy_raw(&[1.0, 0.0], &[d_r, sigma[k]]);
    // The posterior over real classes, R(σ), is the softmax of the real logits.
    let posterior = softmax_slice(&logits[..k]);
    let mut grad = sigma;
    grad[..k]
        .iter_mut()
        .zip(&posterior)
        .for_each(|(g, q)| *g -= q);
    (loss, grad)
}

/// LabelGAN generator loss `E[H([1, 0], [D_r, D_{K+1}])]`.
pub fn labelgan_generator(fake: &[LogitVector]) -> Result<LossPart> {
    let k = real_classes_of(fake)?;
    let inv = 1.0 / fake.len() as f64;
    let mut loss = 0.0;
    let mut logit_grads = Vec::with_capacity(fake.len());
    for l in fake {
        let (li, gi) = labelgan_generator_sample(l.as_slice(), k);
        loss += li;
        logit_grads.push(scale(gi, inv));
    }
    Ok(LossPart {
        loss: loss * inv,
        logit_grads,
    })
}

fn one_hot(n: usize, y: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[y] = 1.0;
    v
}

/// AM-GAN generator loss `E[H(v(y), D(x))]` with `y` the fake sample's target.
pub fn amgan_generator(fake: &[LogitVector], targets: &[usize]) -> Result<LossPart> {
    let k = real_classes_of(fake)?;
    check_labels(targets, fake.len(), k)?;
    let inv = 1.0 / fake.len() as f64;
    let mut loss = 0.0;
    let mut logit_grads = Vec::with_capacity(fake.len());
    for (l, &y) in fake.iter().zip(targets) {
        let (li, gi) = softmax_ce(&one_hot(k + 1, y), l.as_slice());
        loss += li;
        logit_grads.push(scale(gi, inv));
    }
    Ok(LossPart {
        loss: loss * inv,
        logit_grads,
    })
}

/// Discriminator loss shared by LabelGAN and AM-GAN:
/// `E_data[H(v(y), D(x))] + E_G[H(v(K+1), D(x))]`.
pub fn kplus1_discriminator(
    real: &[LogitVector],
    real_labels: &[usize],
    fake: &[LogitVector],
) -> Result<LossPart> {
    let k = real_classes_of(real)?;
    check_batch(fake, k + 1)?;
    check_labels(real_labels, real.len(), k)?;

    let mut loss = 0.0;
    let mut logit_grads = Vec::with_capacity(real.len() + fake.len());

    let inv = 1.0 / real.len() as f64;
    let mut part = 0.0;
    for (l, &y) in real.iter().zip(real_labels) {
        let (li, gi) = softmax_ce(&one_hot(k + 1, y), l.as_slice());
        part += li;
        logit_grads.push(scale(gi, inv));
    }
    loss += part * inv;

    let inv = 1.0 / fake.len() as f64;
    let fake_target = one_hot(k + 1, k);
    let mut part = 0.0;
    for l in fake {
        let (li, gi) = softmax_ce(&fake_target, l.as_slice());
        part += li;
        logit_grads.push(scale(gi, inv));
    }
    loss += part * inv;

    Ok(LossPart { loss, logit_grads })
}

pub fn labelgan_losses(
    real: &[LogitVector],
    real_labels: &[usize],
    fake: &[LogitVector],
) -> Result<LossBundle> {
    let d = kplus1_discriminator(real, real_labels, fake)?;
    let g = labelgan_generator(fake)?;
    LossBundle::from_parts(g, d)
}

pub fn amgan_losses(
    real: &[LogitVector],
    real_labels: &[usize],
    fake: &[LogitVector],
    fake_targets: &[usize],
) -> Result<LossBundle> {
    let d = kplus1_discriminator(real, real_labels, fake)?;
    let g = amgan_generator(fake, fake_targets)?;
    LossBundle::from_parts(g, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{decomposed_cross_entropy, softmax, Layout, TargetVector};

    fn logits_for(probs: &[f64]) -> LogitVector {
        LogitVector::new(probs.iter().map(|p| p.ln()).collect()).unwrap()
    }

    #[test]
    fn labelgan_g_loss_at_half_real_mass() {
        let fake = [logits_for(&[0.25, 0.25, 0.5])];
        let g = labelgan_generator(&fake).unwrap();
        assert!((g.loss - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn perfect_real_prediction_has_zero_d_contribution() {
        // Logits for v(1) in the limit: the real part alone is evaluated here.
        let real = [LogitVector::new(vec![60.0, 0.0, 0.0]).unwrap()];
        let fake = [LogitVector::new(vec![0.0, 0.0, 60.0]).unwrap()];
        let d = kplus1_discriminator(&real, &[0], &fake).unwrap();
        assert!(d.loss < 1e-25);
    }

    #[test]
    fn amgan_g_loss_vanishes_at_target() {
        let fake = [LogitVector::new(vec![0.0, 70.0, 0.0, 0.0]).unwrap()];
        let g = amgan_generator(&fake, &[1]).unwrap();
        assert!(g.loss < 1e-28);
    }

    #[test]
    fn amgan_and_labelgan_share_discriminator_loss() {
        let real = [
            LogitVector::new(vec![0.3, -0.1, 0.9]).unwrap(),
            LogitVector::new(vec![-1.0, 0.5, 0.2]).unwrap(),
        ];
        let fake = [LogitVector::new(vec![0.1, 0.2, 0.3]).unwrap()];
        let lab = labelgan_losses(&real, &[0, 1], &fake).unwrap();
        let am = amgan_losses(&real, &[0, 1], &fake, &[1]).unwrap();
        assert_eq!(lab.d_loss, am.d_loss);
        assert_eq!(lab.d_logit_grads, am.d_logit_grads);
    }

    #[test]
    fn labelgan_g_loss_is_the_labelgan_term_of_any_real_target() {
        let l = LogitVector::new(vec![0.7, -0.2, 1.1, 0.4]).unwrap();
        let p = softmax(&l)
            .with_layout(Layout::RealPlusFake { real_classes: 3 })
            .unwrap();
        let g = labelgan_generator(std::slice::from_ref(&l)).unwrap();
        for y in 0..3 {
            let t = TargetVector::one_hot_full(y, 3).unwrap();
            let d = decomposed_cross_entropy(&t, &p).unwrap();
            assert!((d.labelgan_term - g.loss).abs() < 1e-14);
        }
    }

    #[test]
    fn labels_out_of_range_are_rejected() {
        let l = [LogitVector::new(vec![0.0, 0.0, 0.0]).unwrap()];
        assert_eq!(
            amgan_generator(&l, &[2]),
            Err(Error::Label {
                label: 2,
                classes: 2
            })
        );
        assert!(kplus1_discriminator(&l, &[5], &l).is_err());
    }
}
