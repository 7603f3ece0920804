//! Generator and discriminator losses for the label-aware GAN family, with
//! closed-form gradients with respect to the discriminator logits.
//!
//! Batch losses are means over samples. Every `*_grads` vector holds the
//! gradient of the batch loss with respect to one sample's logits, so it
//! already carries the `1/n` factor of the mean.

mod acgan;
mod analysis;
mod kplus1;
mod vanilla;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::prob::{check_smoothing, log_sum_exp, softmax_slice, LogitVector};

pub use acgan::{
    acgan_discriminator, acgan_generator, acgan_star_losses, acgan_star_plus_extra,
    hierarchical_probs, AcganOptions, SplitLogits,
};
pub use analysis::{
    catgan_style_losses, class_aware_gradient, dynamic_label, smoothing_real_logit_gradient,
    unlabeled_losses, CatGanTerms, ClassAwareGradient, UnlabeledTerms,
};
pub use kplus1::{
    amgan_generator, amgan_losses, kplus1_discriminator, labelgan_generator, labelgan_losses,
};
pub use vanilla::{vanilla_discriminator, vanilla_gan_losses, vanilla_generator};

/// Generator weight on the auxiliary-classifier term when the reduced preset
/// is requested.
pub const REDUCED_AUX_WEIGHT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelTag {
    VanillaGan,
    /// AC-GAN* discriminator with a generator that only sees the real/fake loss.
    GanStar,
    LabelGan,
    AcGanStar,
    AcGanStarPlus,
    AmGan,
}

impl ModelTag {
    pub const ALL: [ModelTag; 6] = [
        ModelTag::VanillaGan,
        ModelTag::GanStar,
        ModelTag::LabelGan,
        ModelTag::AcGanStar,
        ModelTag::AcGanStarPlus,
        ModelTag::AmGan,
    ];

    /// Whether the generator is driven toward a per-sample target class.
    pub fn takes_target_class(self) -> bool {
        !matches!(self, ModelTag::VanillaGan | ModelTag::LabelGan)
    }

    pub fn head(self) -> HeadKind {
        match self {
            ModelTag::VanillaGan => HeadKind::Binary,
            ModelTag::LabelGan | ModelTag::AmGan => HeadKind::KPlusOne,
            ModelTag::GanStar | ModelTag::AcGanStar | ModelTag::AcGanStarPlus => {
                HeadKind::BinaryPlusClassifier
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModelTag::VanillaGan => "gan",
            ModelTag::GanStar => "gan-star",
            ModelTag::LabelGan => "labelgan",
            ModelTag::AcGanStar => "acgan-star",
            ModelTag::AcGanStarPlus => "acgan-star-plus",
            ModelTag::AmGan => "amgan",
        }
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown model variant `{s}`")))
    }
}

/// Discriminator output layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeadKind {
    /// Two logits: `[real, fake]`.
    Binary,
    /// `K+1` logits in one softmax, fake last.
    KPlusOne,
    /// Two real/fake logits followed by `K` classifier logits.
    BinaryPlusClassifier,
}

impl HeadKind {
    pub fn width(self, classes: usize) -> usize {
        match self {
            HeadKind::Binary => 2,
            HeadKind::KPlusOne => classes + 1,
            HeadKind::BinaryPlusClassifier => classes + 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Labeling {
    Dynamic,
    Predefined,
    NotApplicable,
}

impl Labeling {
    pub fn as_str(self) -> &'static str {
        match self {
            Labeling::Dynamic => "dynamic",
            Labeling::Predefined => "predefined",
            Labeling::NotApplicable => "none",
        }
    }
}

impl fmt::Display for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Labeling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dynamic" => Ok(Labeling::Dynamic),
            "predefined" => Ok(Labeling::Predefined),
            "none" => Ok(Labeling::NotApplicable),
            _ => Err(Error::Config(format!("unknown labeling `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum GeneratorLoss {
    /// Minimize `-log D_r(G(z))`.
    #[default]
    NegLogD,
    /// Minimize `log(1 - D_r(G(z)))`.
    LogOneMinusD,
}

impl FromStr for GeneratorLoss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neg-log-d" => Ok(GeneratorLoss::NegLogD),
            "log-one-minus-d" => Ok(GeneratorLoss::LogOneMinusD),
            _ => Err(Error::Config(format!("unknown generator loss `{s}`"))),
        }
    }
}

impl fmt::Display for GeneratorLoss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl GeneratorLoss {
    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorLoss::NegLogD => "neg-log-d",
            GeneratorLoss::LogOneMinusD => "log-one-minus-d",
        }
    }
}

/// Two-class label smoothing: fake samples get target `[fake, 1-fake]`, real
/// samples `[1-real, real]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Smoothing {
    pub fake: f64,
    pub real: f64,
}

impl Smoothing {
    pub fn new(fake: f64, real: f64) -> Result<Self> {
        check_smoothing(fake)?;
        check_smoothing(real)?;
        Ok(Self { fake, real })
    }
}

/// One cell of the model grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelVariant {
    pub tag: ModelTag,
    pub labeling: Labeling,
    pub generator_loss: GeneratorLoss,
    pub aux_weight: f64,
    pub smoothing: Smoothing,
}

impl ModelVariant {
    /// Builds a variant with default loss settings. Models without a target
    /// class record `NotApplicable` whatever labeling is passed; the others
    /// reject `NotApplicable`.
    pub fn new(tag: ModelTag, labeling: Labeling) -> Result<Self> {
        let labeling = if tag.takes_target_class() {
            if labeling == Labeling::NotApplicable {
                return Err(Error::Config(format!(
                    "{tag} needs dynamic or predefined labeling"
                )));
            }
            labeling
        } else {
            Labeling::NotApplicable
        };
        Ok(Self {
            tag,
            labeling,
            generator_loss: GeneratorLoss::NegLogD,
            aux_weight: 1.0,
            smoothing: Smoothing::default(),
        })
    }

    pub fn with_aux_weight(mut self, aux_weight: f64) -> Result<Self> {
        if !(aux_weight >= 0.0 && aux_weight.is_finite()) {
            return Err(Error::Config(format!(
                "aux weight must be >= 0, got {aux_weight}"
            )));
        }
        self.aux_weight = aux_weight;
        Ok(self)
    }

    pub fn with_generator_loss(mut self, generator_loss: GeneratorLoss) -> Self {
        self.generator_loss = generator_loss;
        self
    }

    pub fn with_smoothing(mut self, smoothing: Smoothing) -> Self {
        self.smoothing = smoothing;
        self
    }

    pub fn head(&self) -> HeadKind {
        self.tag.head()
    }

    /// Options for the AC-GAN family derived from this variant.
    pub fn acgan_options(&self) -> AcganOptions {
        AcganOptions {
            aux_weight: match self.tag {
                ModelTag::GanStar => 0.0,
                _ => self.aux_weight,
            },
            include_fake_aux: false,
            uniform_fake_aux: self.tag == ModelTag::AcGanStarPlus,
            generator_loss: self.generator_loss,
            smoothing: self.smoothing,
        }
    }
}

/// Loss of one side of the game plus its per-sample logit gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct LossPart {
    pub loss: f64,
    pub logit_grads: Vec<Vec<f64>>,
}

/// Generator and discriminator losses evaluated on one batch.
#[derive(Debug, Clone, PartialEq)]
pub struct LossBundle {
    pub g_loss: f64,
    pub d_loss: f64,
    /// One entry per fake sample.
    pub g_logit_grads: Vec<Vec<f64>>,
    /// Real samples first, then fake samples.
    pub d_logit_grads: Vec<Vec<f64>>,
}

impl LossBundle {
    pub(crate) fn from_parts(g: LossPart, d: LossPart) -> Result<Self> {
        let bundle = Self {
            g_loss: g.loss,
            d_loss: d.loss,
            g_logit_grads: g.logit_grads,
            d_logit_grads: d.logit_grads,
        };
        if !bundle.is_finite() {
            return Err(Error::InvalidInput(
                "loss bundle contains non-finite values".into(),
            ));
        }
        Ok(bundle)
    }

    pub fn is_finite(&self) -> bool {
        self.g_loss.is_finite()
            && self.d_loss.is_finite()
            && self
                .g_logit_grads
                .iter()
                .chain(&self.d_logit_grads)
                .flatten()
                .all(|v| v.is_finite())
    }
}

/// `H(target, σ(logits))` and its gradient `σ(logits) - target`.
pub(crate) fn softmax_ce(target: &[f64], logits: &[f64]) -> (f64, Vec<f64>) {
    // Exact log-softmax, so the loss stays differentiable where a probability underflows.
    let lse = log_sum_exp(logits);
    let loss = -target
        .iter()
        .zip(logits)
        .map(|(t, l)| t * (l - lse))
        .sum::<f64>();
    let sigma = softmax_slice(logits);
    let grad = sigma.iter().zip(target).map(|(s, t)| s - t).collect();
    (loss, grad)
}

pub(crate) fn scale(mut grad: Vec<f64>, factor: f64) -> Vec<f64> {
    grad.iter_mut().for_each(|g| *g *= factor);
    grad
}

pub(crate) fn check_batch(logits: &[LogitVector], width: usize) -> Result<()> {
    if logits.is_empty() {
        return Err(Error::EmptyBatch);
    }
    logits.iter().try_for_each(|l| check_len(width, l.len()))
}

pub(crate) fn check_labels(labels: &[usize], n: usize, classes: usize) -> Result<()> {
    check_len(n, labels.len())?;
    match labels.iter().find(|&&y| y >= classes) {
        Some(&label) => Err(Error::Label { label, classes }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soft_target_loss_matches_its_gradient_when_a_class_underflows() {
        // softmax of the last logit is ~e^-40, far below the log clamp.
        let logits = [20.0, 0.0, -20.0];
        let target = [1.0 / 3.0; 3];
        let (_, grad) = softmax_ce(&target, &logits);
        let h = 1e-5;
        for i in 0..3 {
            let (mut up, mut down) = (logits, logits);
            up[i] += h;
            down[i] -= h;
            let fd = (softmax_ce(&target, &up).0 - softmax_ce(&target, &down).0) / (2.0 * h);
            assert!((fd - grad[i]).abs() < 1e-8, "{i}: {fd} vs {}", grad[i]);
        }
    }

    #[test]
    fn labeling_is_recorded_not_applicable_for_untargeted_models() {
        let v = ModelVariant::new(ModelTag::LabelGan, Labeling::Predefined).unwrap();
        assert_eq!(v.labeling, Labeling::NotApplicable);
        let v = ModelVariant::new(ModelTag::VanillaGan, Labeling::Dynamic).unwrap();
        assert_eq!(v.labeling, Labeling::NotApplicable);
        assert!(ModelVariant::new(ModelTag::AmGan, Labeling::NotApplicable).is_err());
    }

    #[test]
    fn gan_star_zeroes_generator_aux_weight() {
        let v = ModelVariant::new(ModelTag::GanStar, Labeling::Dynamic).unwrap();
        assert_eq!(v.acgan_options().aux_weight, 0.0);
        let v = ModelVariant::new(ModelTag::AcGanStar, Labeling::Dynamic)
            .unwrap()
            .with_aux_weight(REDUCED_AUX_WEIGHT)
            .unwrap();
        assert_eq!(v.acgan_options().aux_weight, 0.1);
        assert!(!v.acgan_options().uniform_fake_aux);
        let v = ModelVariant::new(ModelTag::AcGanStarPlus, Labeling::Dynamic).unwrap();
        assert!(v.acgan_options().uniform_fake_aux);
    }

    #[test]
    fn tags_round_trip_through_strings() {
        for tag in ModelTag::ALL {
            assert_eq!(tag.as_str().parse::<ModelTag>().unwrap(), tag);
        }
        assert!("wgan".parse::<ModelTag>().is_err());
    }

    #[test]
    fn head_widths() {
        assert_eq!(ModelTag::VanillaGan.head().width(8), 2);
        assert_eq!(ModelTag::AmGan.head().width(8), 9);
        assert_eq!(ModelTag::AcGanStar.head().width(8), 10);
    }
}
