use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use super::Context;
use crate::output::{ensure_dir, num, write_csv, RunManifest};
use crate::CliError;
use amgan_core::lab::train::D_STEPS_PER_G_STEP;
use amgan_core::lab::{train, Snapshot, TrainConfig, TrainOutcome};
use amgan_core::losses::{GeneratorLoss, Labeling, ModelTag, ModelVariant, Smoothing};
use amgan_core::rng::RNG_ALGORITHM;

pub const TRACE_FILE: &str = "trace.csv";
pub const SAMPLES_FILE: &str = "samples.csv";

pub const TRACE_COLUMNS: [&str; 17] = [
    "step",
    "g_loss",
    "d_loss",
    "inception_score",
    "log_inception_score",
    "marginal_entropy",
    "mean_conditional_entropy",
    "mode_score",
    "am_score",
    "am_kl_term",
    "am_entropy_term",
    "mode_coverage",
    "intra_mode_dispersion",
    "d_r_mean_on_fake",
    "g_input_grad_sum",
    "grad_check_rel_err",
    "identity_err",
];

#[derive(Debug, clap::Args)]
pub struct Args {
    /// gan, gan-star, labelgan, acgan-star, acgan-star-plus or amgan.
    #[arg(long)]
    variant: Option<String>,
    /// dynamic, predefined, or none for models without a target class.
    #[arg(long)]
    labeling: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated seeds; each gets its own run directory.
    #[arg(long, value_delimiter = ',', conflicts_with = "seed")]
    seeds: Option<Vec<u64>>,
    /// Independent seeds trained at the same time.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    lr_g: Option<f64>,
    #[arg(long)]
    lr_d: Option<f64>,
    #[arg(long)]
    noise_dim: Option<usize>,
    /// Hidden layer widths, e.g. `64,64`.
    #[arg(long)]
    hidden: Option<String>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    eval_every: Option<usize>,
    #[arg(long)]
    eval_samples: Option<usize>,
    /// Parameters per network compared against finite differences per snapshot.
    #[arg(long)]
    grad_checks: Option<usize>,
    /// Weight of the generator's classifier term (AC-GAN family).
    #[arg(long)]
    aux_weight: Option<f64>,
    /// neg-log-d or log-one-minus-d (two-class heads).
    #[arg(long)]
    generator_loss: Option<String>,
    /// Real-sample label smoothing of the two-class head.
    #[arg(long)]
    smooth_real: Option<f64>,
    /// Fake-sample label smoothing of the two-class head.
    #[arg(long)]
    smooth_fake: Option<f64>,
}

fn format_hidden(h: &[usize]) -> String {
    h.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn parse_hidden(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| CliError::usage(format!("--hidden `{s}`: {e}")))
        })
        .collect()
}

/// Resolves everything but the seed.
type Resolved = (TrainConfig, Vec<u64>, BTreeMap<String, String>);

fn resolve(ctx: &Context, args: &Args) -> Result<Resolved, CliError> {
    let mut s = ctx.settings()?;
    let tag: ModelTag = s
        .require::<String>("variant", args.variant.clone())?
        .parse()?;
    let labeling = match s.optional::<String>("labeling", args.labeling.clone())? {
        Some(l) => l.parse::<Labeling>()?,
        None if tag.takes_target_class() => Labeling::Dynamic,
        None => Labeling::NotApplicable,
    };
    if tag.takes_target_class() == (labeling == Labeling::NotApplicable) {
        return Err(CliError::usage(if tag.takes_target_class() {
            format!("{tag} needs --labeling dynamic or predefined")
        } else {
            format!("{tag} takes no target class; use --labeling none")
        }));
    }
    let mut variant = ModelVariant::new(tag, labeling)?;
    variant =
        variant.with_aux_weight(s.get("aux-weight", args.aux_weight, variant.aux_weight)?)?;
    let gl: GeneratorLoss = s
        .get(
            "generator-loss",
            args.generator_loss.clone(),
            variant.generator_loss.as_str().to_string(),
        )?
        .parse()?;
    variant = variant.with_generator_loss(gl);
    let smoothing = Smoothing::new(
        s.get("smooth-fake", args.smooth_fake, 0.0)?,
        s.get("smooth-real", args.smooth_real, 0.0)?,
    )?;
    variant = variant.with_smoothing(smoothing);

    let d = TrainConfig::new(variant, 0);
    let seeds = match &args.seeds {
        Some(list) if !list.is_empty() => list.clone(),
        Some(_) => return Err(CliError::usage("--seeds needs at least one seed")),
        None => vec![s.get("seed", args.seed, 0)?],
    };
    let hidden = parse_hidden(&s.get("hidden", args.hidden.clone(), format_hidden(&d.hidden))?)?;
    let cfg = TrainConfig {
        noise_dim: s.get("noise-dim", args.noise_dim, d.noise_dim)?,
        hidden,
        batch_size: s.get("batch-size", args.batch_size, d.batch_size)?,
        steps: s.get("steps", args.steps, d.steps)?,
        lr_g: s.get("lr-g", args.lr_g, d.lr_g)?,
        lr_d: s.get("lr-d", args.lr_d, d.lr_d)?,
        eval_every: s.get("eval-every", args.eval_every, d.eval_every)?,
        eval_samples: s.get("eval-samples", args.eval_samples, d.eval_samples)?,
        grad_checks: s.get("grad-checks", args.grad_checks, d.grad_checks)?,
        ..d
    };
    cfg.validate()?;
    let mut resolved = s.finish()?;
    resolved.remove("seed");
    resolved.insert("labeling".into(), labeling.to_string());
    Ok((cfg, seeds, resolved))
}

pub fn run_dir(out: &Path, cfg: &TrainConfig) -> PathBuf {
    out.join(format!(
        "{}_{}_s{}",
        cfg.variant.tag, cfg.variant.labeling, cfg.seed
    ))
}

fn snapshot_row(s: &Snapshot) -> Vec<String> {
    vec![
        s.step.to_string(),
        num(s.g_loss),
        num(s.d_loss),
        num(s.inception_score),
        num(s.log_inception_score),
        num(s.marginal_entropy),
        num(s.mean_conditional_entropy),
        num(s.mode_score),
        num(s.am_score),
        num(s.am_kl_term),
        num(s.am_entropy_term),
        s.mode_coverage.to_string(),
        num(s.intra_mode_dispersion),
        num(s.d_r_mean_on_fake),
        num(s.g_input_grad_sum),
        num(s.grad_check_rel_err),
        num(s.identity_err),
    ]
}

fn write_run(
    dir: &Path,
    cfg: &TrainConfig,
    config: BTreeMap<String, String>,
    out: &TrainOutcome,
) -> Result<(), CliError> {
    ensure_dir(dir)?;
    let trace = dir.join(TRACE_FILE);
    write_csv(
        &trace,
        &TRACE_COLUMNS,
        out.trace.snapshots.iter().map(snapshot_row),
    )?;
    let samples = dir.join(SAMPLES_FILE);
    let s = &out.final_samples;
    write_csv(
        &samples,
        &["x", "y", "assigned_label"],
        s.points
            .iter()
            .zip(&s.labels)
            .map(|(p, l)| vec![num(p[0]), num(p[1]), l.to_string()]),
    )?;
    let mut manifest = RunManifest::new("train", Some(cfg.seed), config);
    manifest.details = serde_json::json!({
        "train_config": cfg,
        "rng": RNG_ALGORITHM,
        "d_steps_per_g_step": D_STEPS_PER_G_STEP,
        "score_reference": "mixture weights",
    });
    manifest.outputs.insert("trace".into(), trace);
    manifest.outputs.insert("samples".into(), samples);
    manifest.write(dir)?;
    Ok(())
}

fn run_one(
    ctx: &Context,
    base: &TrainConfig,
    seed: u64,
    resolved: &BTreeMap<String, String>,
) -> Result<String, CliError> {
    let cfg = TrainConfig {
        seed,
        ..base.clone()
    };
    let mut config = resolved.clone();
    config.insert("seed".into(), seed.to_string());
    let dir = run_dir(&ctx.out, &cfg);
    let out = train(&cfg).map_err(|e| match e {
        amgan_core::Error::Diverged { step, reason } => CliError::Diverged(format!(
            "seed {seed}: training diverged at step {step}: {reason}"
        )),
        other => other.into(),
    })?;
    write_run(&dir, &cfg, config, &out)?;
    let last = out.trace.last().expect("initial snapshot");
    Ok(format!(
        "{} seed {seed}: step {} coverage {} inception {:.4} am {:.4} -> {}",
        cfg.variant.tag,
        last.step,
        last.mode_coverage,
        last.inception_score,
        last.am_score,
        dir.display()
    ))
}

pub fn run(ctx: &Context, args: Args) -> Result<(), CliError> {
    let (base, seeds, resolved) = resolve(ctx, &args)?;
    let jobs = args.jobs.clamp(1, seeds.len());
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, Result<String, CliError>)>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(&seed) = seeds.get(i) else { break };
                let r = run_one(ctx, &base, seed, &resolved);
                results.lock().expect("no panics while locked").push((i, r));
            });
        }
    });
    let mut results = results.into_inner().expect("threads joined");
    results.sort_by_key(|(i, _)| *i);
    let mut first_err = None;
    for (_, r) in results {
        match r {
            Ok(line) => println!("{line}"),
            Err(e) => {
                // Keep the most severe failure: divergence outranks usage errors.
                let keep = matches!(
                    (&first_err, &e),
                    (None, _) | (Some(CliError::Usage(_)), CliError::Diverged(_))
                );
                match &e {
                    CliError::Usage(m) | CliError::Property(m) | CliError::Diverged(m) => {
                        eprintln!("{m}")
                    }
                }
                if keep {
                    first_err = Some(e);
                }
            }
        }
    }
    first_err.map_or(Ok(()), Err)
}
