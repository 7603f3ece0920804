//! Alternating SGD training of a generator and discriminator MLP on the
//! Gaussian mixture, with metric snapshots scored by the oracle posterior.

use ndarray::{s, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::diagnostics::{intra_mode_dispersion, mode_coverage};
use super::mixture::{
    draw_classes, oracle_posterior, sample_with, LabeledBatch, MixtureSpec, Point,
};
use super::mlp::{Cache, Gradients, Mlp};
use crate::error::{Error, Result};
use crate::losses::{
    acgan_discriminator, acgan_generator, amgan_generator, class_aware_gradient, dynamic_label,
    kplus1_discriminator, labelgan_generator, vanilla_discriminator, vanilla_generator, HeadKind,
    Labeling, LossPart, ModelTag, ModelVariant, SplitLogits,
};
use crate::metrics::{ClassifierBatch, ScoreReport};
use crate::prob::{
    decomposed_cross_entropy, softmax_slice, Layout, LogitVector, ProbVector, TargetVector,
};
use crate::rng::{stream, Purpose};

/// Discriminator updates per generator update.
pub const D_STEPS_PER_G_STEP: usize = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub variant: ModelVariant,
    pub mixture: MixtureSpec,
    pub noise_dim: usize,
    /// Hidden layer widths, shared by both networks.
    pub hidden: Vec<usize>,
    pub batch_size: usize,
    pub steps: usize,
    pub lr_g: f64,
    pub lr_d: f64,
    pub seed: u64,
    pub eval_every: usize,
    pub eval_samples: usize,
    /// Parameters per network compared against finite differences at each snapshot.
    pub grad_checks: usize,
}

impl TrainConfig {
    pub fn new(variant: ModelVariant, seed: u64) -> Self {
        Self {
            variant,
            mixture: MixtureSpec::default(),
            noise_dim: 2,
            hidden: vec![64, 64],
            batch_size: 128,
            steps: 20_000,
            lr_g: 5e-4,
            lr_d: 5e-3,
            seed,
            eval_every: 1000,
            eval_samples: 10_000,
            grad_checks: 8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.noise_dim == 0 {
            return bad("noise_dim must be at least 1".into());
        }
        if self.hidden.contains(&0) {
            return bad(format!(
                "hidden widths must be positive, got {:?}",
                self.hidden
            ));
        }
        if self.batch_size == 0 || self.eval_samples == 0 {
            return bad("batch_size and eval_samples must be at least 1".into());
        }
        if self.eval_every == 0 {
            return bad("eval_every must be at least 1".into());
        }
        for (name, lr) in [("lr_g", self.lr_g), ("lr_d", self.lr_d)] {
            if !(lr.is_finite() && lr > 0.0) {
                return bad(format!("{name} must be positive, got {lr}"));
            }
        }
        if self.variant.tag.takes_target_class()
            == (self.variant.labeling == Labeling::NotApplicable)
        {
            return bad(format!(
                "labeling {:?} does not fit model {}",
                self.variant.labeling, self.variant.tag
            ));
        }
        Ok(())
    }

    pub fn classes(&self) -> usize {
        self.mixture.classes()
    }

    /// Generator input width: noise, plus a one-hot class under predefined labeling.
    pub fn generator_input(&self) -> usize {
        match self.variant.labeling {
            Labeling::Predefined => self.noise_dim + self.classes(),
            _ => self.noise_dim,
        }
    }

    pub fn generator_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![self.generator_input()];
        sizes.extend(&self.hidden);
        sizes.push(2);
        sizes
    }

    pub fn discriminator_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![2];
        sizes.extend(&self.hidden);
        sizes.push(self.variant.head().width(self.classes()));
        sizes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub step: usize,
    pub g_loss: f64,
    pub d_loss: f64,
    pub inception_score: f64,
    pub log_inception_score: f64,
    pub marginal_entropy: f64,
    pub mean_conditional_entropy: f64,
    pub mode_score: f64,
    pub am_score: f64,
    pub am_kl_term: f64,
    pub am_entropy_term: f64,
    pub mode_coverage: usize,
    pub intra_mode_dispersion: f64,
    pub d_r_mean_on_fake: f64,
    /// Mean over samples of `Σ |∂G(z)/∂z|` over noise inputs and outputs.
    pub g_input_grad_sum: f64,
    /// Worst relative error of backprop against finite differences.
    pub grad_check_rel_err: f64,
    /// LabelGAN: worst gap between the generator's logit gradient and the
    /// class-aware form. AM-GAN: gap between the generator loss and its
    /// two-term decomposition. Zero for other models.
    pub identity_err: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainingTrace {
    pub snapshots: Vec<Snapshot>,
}

impl TrainingTrace {
    pub fn last(&self) -> Option<&Snapshot> {
        self.snapshots.last()
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub trace: TrainingTrace,
    /// Generated samples of the final snapshot with the label assigned to
    /// each: the conditioning class under predefined labeling, the dynamic
    /// label under dynamic labeling, otherwise the oracle's most probable class.
    pub final_samples: LabeledBatch,
    pub generator: Mlp,
    pub discriminator: Mlp,
}

/// Generator inputs for one batch and the conditioning classes, if any.
struct GenInput {
    z: Array2<f64>,
    classes: Option<Vec<usize>>,
}

fn generator_input<R: Rng>(cfg: &TrainConfig, n: usize, rng: &mut R) -> GenInput {
    let width = cfg.generator_input();
    let mut z = Array2::zeros((n, width));
    for v in z.slice_mut(s![.., ..cfg.noise_dim]).iter_mut() {
        *v = rng.sample(StandardNormal);
    }
    let classes = (cfg.variant.labeling == Labeling::Predefined).then(|| {
        let ys = draw_classes(&cfg.mixture, n, rng);
        for (i, &y) in ys.iter().enumerate() {
            z[(i, cfg.noise_dim + y)] = 1.0;
        }
        ys
    });
    GenInput { z, classes }
}

fn points_matrix(points: &[Point]) -> Array2<f64> {
    Array2::from_shape_fn((points.len(), 2), |(i, j)| points[i][j])
}

fn logit_rows(m: ArrayView2<f64>) -> Result<Vec<LogitVector>> {
    m.rows()
        .into_iter()
        .map(|r| LogitVector::new(r.to_vec()))
        .collect()
}

fn split_rows(m: ArrayView2<f64>) -> Result<Vec<SplitLogits>> {
    m.rows()
        .into_iter()
        .map(|r| SplitLogits::from_row(r.as_slice().expect("standard layout")))
        .collect()
}

fn grads_matrix(part: &LossPart, cols: usize) -> Array2<f64> {
    let n = part.logit_grads.len();
    Array2::from_shape_fn((n, cols), |(i, j)| part.logit_grads[i][j])
}

fn discriminator_part(
    v: &ModelVariant,
    real: ArrayView2<f64>,
    labels: &[usize],
    fake: ArrayView2<f64>,
) -> Result<LossPart> {
    match v.head() {
        HeadKind::Binary => {
            vanilla_discriminator(&logit_rows(real)?, &logit_rows(fake)?, v.smoothing)
        }
        HeadKind::KPlusOne => kplus1_discriminator(&logit_rows(real)?, labels, &logit_rows(fake)?),
        HeadKind::BinaryPlusClassifier => acgan_discriminator(
            &split_rows(real)?,
            labels,
            &split_rows(fake)?,
            None,
            &v.acgan_options(),
        ),
    }
}

fn generator_part(v: &ModelVariant, fake: ArrayView2<f64>, targets: &[usize]) -> Result<LossPart> {
    match v.tag {
        ModelTag::VanillaGan => {
            vanilla_generator(&logit_rows(fake)?, v.generator_loss, v.smoothing)
        }
        ModelTag::LabelGan => labelgan_generator(&logit_rows(fake)?),
        ModelTag::AmGan => amgan_generator(&logit_rows(fake)?, targets),
        ModelTag::GanStar | ModelTag::AcGanStar | ModelTag::AcGanStarPlus => {
            acgan_generator(&split_rows(fake)?, targets, &v.acgan_options())
        }
    }
}

/// Target classes for generated samples from the discriminator's output on them.
fn targets(
    v: &ModelVariant,
    fake_logits: ArrayView2<f64>,
    classes: &Option<Vec<usize>>,
    k: usize,
) -> Vec<usize> {
    match v.labeling {
        Labeling::NotApplicable => Vec::new(),
        Labeling::Predefined => classes.clone().expect("predefined labeling draws classes"),
        Labeling::Dynamic => fake_logits
            .rows()
            .into_iter()
            .map(|r| {
                let r = r.as_slice().expect("standard layout");
                match v.head() {
                    HeadKind::KPlusOne => {
                        let p = ProbVector::new(
                            softmax_slice(r),
                            Layout::RealPlusFake { real_classes: k },
                        )
                        .expect("softmax is on the simplex");
                        dynamic_label(&p)
                    }
                    _ => {
                        let c = ProbVector::real_only(softmax_slice(&r[2..]))
                            .expect("softmax is on the simplex");
                        dynamic_label(&c)
                    }
                }
            })
            .collect(),
    }
}

/// `D_r` of one row of discriminator logits.
fn real_mass(head: HeadKind, row: &[f64]) -> f64 {
    let k1 = match head {
        HeadKind::KPlusOne => row.len() - 1,
        _ => 1,
    };
    let p = match head {
        HeadKind::KPlusOne => softmax_slice(row),
        _ => softmax_slice(&row[..2]),
    };
    p[..k1].iter().sum()
}

fn ensure_finite(m: &Array2<f64>, step: usize, what: &str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Diverged {
            step,
            reason: format!("non-finite {what}"),
        })
    }
}

fn ensure_finite_loss(part: &LossPart, step: usize, what: &str) -> Result<()> {
    if part.loss.is_finite() {
        Ok(())
    } else {
        Err(Error::Diverged {
            step,
            reason: format!("non-finite {what} loss {}", part.loss),
        })
    }
}

struct Nets<'a> {
    cfg: &'a TrainConfig,
    g: Mlp,
    d: Mlp,
}

impl Nets<'_> {
    fn d_predict(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        self.d.predict(x)
    }

    fn d_forward(&self, x: &Array2<f64>) -> Result<(Array2<f64>, Cache)> {
        self.d.forward(x)
    }

    fn d_input_grad(&self, cache: &Cache, out_grad: &Array2<f64>) -> Result<Array2<f64>> {
        Ok(self.d.backward(cache, out_grad)?.1)
    }

    fn d_loss(
        &self,
        real: &Array2<f64>,
        labels: &[usize],
        fake: &Array2<f64>,
    ) -> Result<(LossPart, Array2<f64>)> {
        let x = ndarray::concatenate(Axis(0), &[real.view(), fake.view()]).expect("same width");
        let logits = self.d_predict(&x)?;
        let n = real.nrows();
        let part = discriminator_part(
            &self.cfg.variant,
            logits.slice(s![..n, ..]),
            labels,
            logits.slice(s![n.., ..]),
        )?;
        Ok((part, x))
    }

    fn g_loss(&self, z: &Array2<f64>, targets: &[usize]) -> Result<f64> {
        let fake = self.g.predict(z)?;
        let logits = self.d_predict(&fake)?;
        Ok(generator_part(&self.cfg.variant, logits.view(), targets)?.loss)
    }

    /// One discriminator update followed by one generator update.
    fn step(&mut self, t: usize) -> Result<()> {
        let cfg = self.cfg;
        let k = cfg.classes();
        let real = sample_with(
            &cfg.mixture,
            cfg.batch_size,
            &mut stream(cfg.seed, Purpose::RealBatch, t as u64),
        );
        let input = generator_input(
            cfg,
            cfg.batch_size,
            &mut stream(cfg.seed, Purpose::Noise, t as u64),
        );
        let (fake, g_cache) = self.g.forward(&input.z)?;
        ensure_finite(&fake, t, "generator output")?;

        let real_x = points_matrix(&real.points);
        let x = ndarray::concatenate(Axis(0), &[real_x.view(), fake.view()]).expect("same width");
        let (logits, d_cache) = self.d_forward(&x)?;
        ensure_finite(&logits, t, "discriminator output")?;
        let n = cfg.batch_size;
        let part = discriminator_part(
            &cfg.variant,
            logits.slice(s![..n, ..]),
            &real.labels,
            logits.slice(s![n.., ..]),
        )?;
        ensure_finite_loss(&part, t, "discriminator")?;
        let (dg, _) = self
            .d
            .backward(&d_cache, &grads_matrix(&part, logits.ncols()))?;
        self.d.sgd_step(&dg, cfg.lr_d);

        let (fake_logits, f_cache) = self.d_forward(&fake)?;
        ensure_finite(&fake_logits, t, "discriminator output")?;
        let ys = targets(&cfg.variant, fake_logits.view(), &input.classes, k);
        let part = generator_part(&cfg.variant, fake_logits.view(), &ys)?;
        ensure_finite_loss(&part, t, "generator")?;
        let dx = self.d_input_grad(&f_cache, &grads_matrix(&part, fake_logits.ncols()))?;
        let (gg, _) = self.g.backward(&g_cache, &dx)?;
        self.g.sgd_step(&gg, cfg.lr_g);
        Ok(())
    }

    fn snapshot(&self, step: usize) -> Result<(Snapshot, LabeledBatch)> {
        let cfg = self.cfg;
        let k = cfg.classes();
        let v = &cfg.variant;
        let mut rng = stream(cfg.seed, Purpose::Eval, step as u64);

        // Losses on a held-out batch, without updates.
        let real = sample_with(&cfg.mixture, cfg.batch_size, &mut rng);
        let input = generator_input(cfg, cfg.batch_size, &mut rng);
        let real_x = points_matrix(&real.points);
        let (fake, g_cache) = self.g.forward(&input.z)?;
        ensure_finite(&fake, step, "generator output")?;
        let (d_part, _) = self.d_loss(&real_x, &real.labels, &fake)?;
        ensure_finite_loss(&d_part, step, "discriminator")?;
        let (fake_logits, f_cache) = self.d_forward(&fake)?;
        ensure_finite(&fake_logits, step, "discriminator output")?;
        let ys = targets(v, fake_logits.view(), &input.classes, k);
        let g_part = generator_part(v, fake_logits.view(), &ys)?;
        ensure_finite_loss(&g_part, step, "generator")?;

        let identity_err = self.identity_error(&fake_logits, &ys, &g_part)?;
        let grad_check_rel_err = self.grad_check(
            &mut rng,
            &real_x,
            &real.labels,
            &fake,
            &input.z,
            &ys,
            &f_cache,
            &g_cache,
            &g_part,
        )?;
        let g_input_grad_sum = self.input_grad_sum(&g_cache, fake.nrows())?;

        // Sample quality on a large batch.
        let eval = generator_input(cfg, cfg.eval_samples, &mut rng);
        let samples = self.g.predict(&eval.z)?;
        ensure_finite(&samples, step, "generator output")?;
        let points: Vec<Point> = samples.rows().into_iter().map(|r| [r[0], r[1]]).collect();
        let posteriors: Vec<ProbVector> = points
            .iter()
            .map(|p| oracle_posterior(&cfg.mixture, p))
            .collect();
        let d_out = self.d_predict(&samples)?;
        let d_r_mean_on_fake = d_out
            .rows()
            .into_iter()
            .map(|r| real_mass(v.head(), r.as_slice().expect("standard layout")))
            .sum::<f64>()
            / cfg.eval_samples as f64;
        let labels = match v.labeling {
            Labeling::NotApplicable => posteriors.iter().map(dynamic_label).collect(),
            _ => targets(v, d_out.view(), &eval.classes, k),
        };
        let report = ScoreReport::evaluate(
            &ClassifierBatch::new(posteriors)?,
            &cfg.mixture.weight_vector(),
        )?;
        let coverage = mode_coverage(&points, &cfg.mixture)?;
        let dispersion = intra_mode_dispersion(&points, &cfg.mixture)?;

        let snap = Snapshot {
            step,
            g_loss: g_part.loss,
            d_loss: d_part.loss,
            inception_score: report.inception_score,
            log_inception_score: report.inception_score.ln(),
            marginal_entropy: report.marginal_entropy,
            mean_conditional_entropy: report.mean_conditional_entropy,
            mode_score: report.mode_score,
            am_score: report.am_score,
            am_kl_term: report.am_kl_term,
            am_entropy_term: report.am_entropy_term,
            mode_coverage: coverage.covered,
            intra_mode_dispersion: dispersion,
            d_r_mean_on_fake,
            g_input_grad_sum,
            grad_check_rel_err,
            identity_err,
        };
        Ok((snap, LabeledBatch { points, labels }))
    }

    fn identity_error(
        &self,
        fake_logits: &Array2<f64>,
        ys: &[usize],
        g_part: &LossPart,
    ) -> Result<f64> {
        let k = self.cfg.classes();
        let n = fake_logits.nrows() as f64;
        let layout = Layout::RealPlusFake { real_classes: k };
        let probs = || {
            fake_logits.rows().into_iter().map(move |r| {
                ProbVector::new(
                    softmax_slice(r.as_slice().expect("standard layout")),
                    layout,
                )
            })
        };
        match self.cfg.variant.tag {
            ModelTag::LabelGan => {
                let mut worst = 0.0f64;
                for (p, g) in probs().zip(&g_part.logit_grads) {
                    let p = p?;
                    if p.real_mass() < 1e-12 {
                        continue;
                    }
                    let cag = class_aware_gradient(&p)?;
                    for (a, b) in cag.per_logit.iter().zip(g) {
                        worst = worst.max((a + n * b).abs());
                    }
                }
                Ok(worst)
            }
            ModelTag::AmGan => {
                let mut total = 0.0;
                for (p, &y) in probs().zip(ys) {
                    let d = decomposed_cross_entropy(&TargetVector::one_hot_full(y, k)?, &p?)?;
                    total += d.aux_classifier_term + d.labelgan_term;
                }
                Ok((total / n - g_part.loss).abs())
            }
            _ => Ok(0.0),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn grad_check<R: Rng>(
        &self,
        rng: &mut R,
        real_x: &Array2<f64>,
        labels: &[usize],
        fake: &Array2<f64>,
        z: &Array2<f64>,
        ys: &[usize],
        f_cache: &Cache,
        g_cache: &Cache,
        g_part: &LossPart,
    ) -> Result<f64> {
        if self.cfg.grad_checks == 0 {
            return Ok(0.0);
        }
        // Analytic gradients.
        let x = ndarray::concatenate(Axis(0), &[real_x.view(), fake.view()]).expect("same width");
        let (logits, d_cache) = self.d_forward(&x)?;
        let n = real_x.nrows();
        let d_part = discriminator_part(
            &self.cfg.variant,
            logits.slice(s![..n, ..]),
            labels,
            logits.slice(s![n.., ..]),
        )?;
        let (d_grads, _) = self
            .d
            .backward(&d_cache, &grads_matrix(&d_part, logits.ncols()))?;
        let dx = self.d_input_grad(f_cache, &grads_matrix(g_part, logits.ncols()))?;
        let (g_grads, _) = self.g.backward(g_cache, &dx)?;

        let mut worst = 0.0f64;
        let mut probe = self.clone_nets();
        let d_loss = |nets: &Nets| Ok(nets.d_loss(real_x, labels, fake)?.0.loss);
        let g_loss = |nets: &Nets| nets.g_loss(z, ys);
        for _ in 0..self.cfg.grad_checks {
            if let Some((i, fd)) = stable_difference(&mut probe, true, rng, &d_loss)? {
                worst = worst.max(rel_err(fd, grad_at(&d_grads, i)));
            }
            if let Some((i, fd)) = stable_difference(&mut probe, false, rng, &g_loss)? {
                worst = worst.max(rel_err(fd, grad_at(&g_grads, i)));
            }
        }
        Ok(worst)
    }

    fn clone_nets(&self) -> Self {
        Nets {
            cfg: self.cfg,
            g: self.g.clone(),
            d: self.d.clone(),
        }
    }

    fn input_grad_sum(&self, g_cache: &Cache, n: usize) -> Result<f64> {
        let mut total = 0.0;
        for o in 0..2 {
            let mut probe = Array2::zeros((n, 2));
            probe.column_mut(o).fill(1.0);
            let (_, dz) = self.g.backward(g_cache, &probe)?;
            total += dz
                .slice(s![.., ..self.cfg.noise_dim])
                .iter()
                .map(|v| v.abs())
                .sum::<f64>();
        }
        Ok(total / n as f64)
    }
}

fn grad_at(g: &Gradients, i: usize) -> f64 {
    g.get(i).expect("index drawn below param_count")
}

fn param<'n>(nets: &'n mut Nets, disc: bool, i: usize) -> &'n mut f64 {
    let net = if disc { &mut nets.d } else { &mut nets.g };
    net.param_mut(i).expect("index drawn below param_count")
}

fn central_difference<F>(nets: &mut Nets, disc: bool, i: usize, h: f64, f: &F) -> Result<f64>
where
    F: Fn(&Nets) -> Result<f64>,
{
    let orig = *param(nets, disc, i);
    *param(nets, disc, i) = orig + h;
    let up = f(nets);
    *param(nets, disc, i) = orig - h;
    let down = f(nets);
    *param(nets, disc, i) = orig;
    Ok((up? - down?) / (2.0 * h))
}

/// Central difference of `f` in a randomly drawn parameter. A difference
/// that moves between step `H` and `H/2` straddles a rectifier kink, where
/// the loss is not differentiable, so the parameter is redrawn.
fn stable_difference<R, F>(
    nets: &mut Nets,
    disc: bool,
    rng: &mut R,
    f: &F,
) -> Result<Option<(usize, f64)>>
where
    R: Rng,
    F: Fn(&Nets) -> Result<f64>,
{
    const H: f64 = 1e-5;
    const ATTEMPTS: usize = 8;
    let count = if disc {
        nets.d.param_count()
    } else {
        nets.g.param_count()
    };
    for _ in 0..ATTEMPTS {
        let i = rng.random_range(0..count);
        let coarse = central_difference(nets, disc, i, H, f)?;
        let fine = central_difference(nets, disc, i, H / 2.0, f)?;
        if rel_err(coarse, fine) < 1e-6 {
            return Ok(Some((i, fine)));
        }
    }
    Ok(None)
}

/// `|a - b| / max(|a|, |b|, 1e-6)`.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

/// Runs the configured number of steps, snapshotting at step 0, every
/// `eval_every` steps and at the final step.
pub fn train(cfg: &TrainConfig) -> Result<TrainOutcome> {
    train_with_progress(cfg, |_| {})
}

pub fn train_with_progress<F: FnMut(&Snapshot)>(
    cfg: &TrainConfig,
    mut on_snapshot: F,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    let g = Mlp::new(
        &cfg.generator_sizes(),
        &mut stream(cfg.seed, Purpose::Init, 0),
    )?;
    let d = Mlp::new(
        &cfg.discriminator_sizes(),
        &mut stream(cfg.seed, Purpose::Init, 1),
    )?;
    let mut nets = Nets { cfg, g, d };
    let mut trace = TrainingTrace::default();

    let (snap, mut samples) = nets.snapshot(0)?;
    on_snapshot(&snap);
    trace.snapshots.push(snap);
    for t in 1..=cfg.steps {
        nets.step(t)?;
        if t % cfg.eval_every == 0 || t == cfg.steps {
            let (snap, s) = nets.snapshot(t)?;
            on_snapshot(&snap);
            trace.snapshots.push(snap);
            samples = s;
        }
    }
    Ok(TrainOutcome {
        trace,
        final_samples: samples,
        generator: nets.g,
        discriminator: nets.d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::Labeling;

    fn small(tag: ModelTag, labeling: Labeling) -> TrainConfig {
        let mut cfg = TrainConfig::new(ModelVariant::new(tag, labeling).unwrap(), 5);
        cfg.steps = 30;
        cfg.eval_every = 10;
        cfg.eval_samples = 500;
        cfg.batch_size = 32;
        cfg.hidden = vec![16, 16];
        cfg
    }

    #[test]
    fn zero_steps_gives_only_the_initial_snapshot() {
        let mut cfg = small(ModelTag::AmGan, Labeling::Dynamic);
        cfg.steps = 0;
        let out = train(&cfg).unwrap();
        assert_eq!(out.trace.snapshots.len(), 1);
        assert_eq!(out.trace.snapshots[0].step, 0);
    }

    #[test]
    fn every_variant_trains_with_consistent_gradients() {
        for tag in ModelTag::ALL {
            for labeling in [Labeling::Dynamic, Labeling::Predefined] {
                let cfg = small(tag, labeling);
                let out = train(&cfg).unwrap();
                let steps: Vec<usize> = out.trace.snapshots.iter().map(|s| s.step).collect();
                assert_eq!(steps, vec![0, 10, 20, 30]);
                for s in &out.trace.snapshots {
                    assert!(
                        s.grad_check_rel_err < 1e-4,
                        "{tag} {labeling:?}: {}",
                        s.grad_check_rel_err
                    );
                    assert!(s.identity_err < 1e-8, "{tag}: {}", s.identity_err);
                }
                if !tag.takes_target_class() {
                    break;
                }
            }
        }
    }

    #[test]
    fn runs_are_reproducible() {
        let cfg = small(ModelTag::AcGanStarPlus, Labeling::Predefined);
        let a = train(&cfg).unwrap();
        let b = train(&cfg).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.final_samples, b.final_samples);
    }

    #[test]
    fn divergence_reports_the_step() {
        let mut cfg = small(ModelTag::VanillaGan, Labeling::NotApplicable);
        cfg.lr_d = 1e200;
        cfg.lr_g = 1e200;
        match train(&cfg) {
            Err(Error::Diverged { step, .. }) => assert!(step >= 1),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = small(ModelTag::AmGan, Labeling::Dynamic);
        cfg.eval_every = 0;
        assert!(matches!(train(&cfg), Err(Error::Config(_))));
        let mut cfg = small(ModelTag::AmGan, Labeling::Dynamic);
        cfg.variant.labeling = Labeling::NotApplicable;
        assert!(cfg.validate().is_err());
    }
}
