use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::Context;
use crate::output::{ensure_dir, write_json, RunManifest};
use crate::CliError;
use amgan_core::lab::{oracle_posterior, MixtureSpec, Point};
use amgan_core::metrics::{reference_distribution, ClassifierBatch, ScoreReport};
use amgan_core::prob::ProbVector;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Classifier outputs: a `K=<classes>` header, then one row per sample.
    #[arg(long, conflicts_with_all = ["samples", "run"])]
    batch: Option<PathBuf>,
    /// Reference class distribution, K numbers (default uniform).
    #[arg(long, requires = "batch")]
    train_dist: Option<PathBuf>,
    /// samples.csv written by `train`.
    #[arg(long, requires = "run")]
    samples: Option<PathBuf>,
    /// manifest.json of the run that wrote the samples.
    #[arg(long, requires = "samples")]
    run: Option<PathBuf>,
}

#[derive(Serialize)]
struct Report {
    samples: usize,
    classes: usize,
    decomposition_error: f64,
    #[serde(flatten)]
    scores: ScoreReport,
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path) -> impl Fn(amgan_core::Error) -> CliError + '_ {
    move |e| CliError::usage(format!("{}: {e}", path.display()))
}

fn read_train_dist(path: &Path, classes: usize) -> Result<ProbVector, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for tok in line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            let v = tok.parse::<f64>().map_err(|_| {
                CliError::usage(format!(
                    "{}: line {}: bad number `{tok}`",
                    path.display(),
                    i + 1
                ))
            })?;
            values.push(v);
        }
    }
    if values.len() != classes {
        return Err(CliError::usage(format!(
            "{}: {} values for a {classes}-class batch",
            path.display(),
            values.len()
        )));
    }
    reference_distribution(values).map_err(in_file(path))
}

#[derive(Deserialize)]
struct SampleRow {
    x: f64,
    y: f64,
}

fn read_samples(path: &Path) -> Result<Vec<Point>, CliError> {
    let mut reader = csv::Reader::from_reader(open(path)?);
    reader
        .deserialize::<SampleRow>()
        .enumerate()
        .map(|(i, r)| {
            let r =
                r.map_err(|e| CliError::usage(format!("{}: line {}: {e}", path.display(), i + 2)))?;
            if !(r.x.is_finite() && r.y.is_finite()) {
                return Err(CliError::usage(format!(
                    "{}: line {}: non-finite point",
                    path.display(),
                    i + 2
                )));
            }
            Ok([r.x, r.y])
        })
        .collect()
}

fn run_mixture(path: &Path) -> Result<MixtureSpec, CliError> {
    let manifest = RunManifest::read(path)?;
    if manifest.command != "train" {
        return Err(CliError::usage(format!(
            "{}: not a train manifest",
            path.display()
        )));
    }
    let mixture = manifest
        .details
        .get("train_config")
        .and_then(|c| c.get("mixture"))
        .ok_or_else(|| CliError::usage(format!("{}: no mixture recorded", path.display())))?;
    MixtureSpec::deserialize(mixture)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

pub fn run(ctx: &Context, args: Args) -> Result<(), CliError> {
    let mut s = ctx.settings()?;
    let batch_path = s
        .optional::<String>("batch", args.batch.map(|p| p.display().to_string()))?
        .map(PathBuf::from);
    let dist_path = s
        .optional::<String>(
            "train-dist",
            args.train_dist.map(|p| p.display().to_string()),
        )?
        .map(PathBuf::from);
    let samples_path = s
        .optional::<String>("samples", args.samples.map(|p| p.display().to_string()))?
        .map(PathBuf::from);
    let run_path = s
        .optional::<String>("run", args.run.map(|p| p.display().to_string()))?
        .map(PathBuf::from);
    let config = s.finish()?;

    let (batch, train_dist) = match (batch_path, samples_path, run_path) {
        (Some(path), None, None) => {
            let batch = ClassifierBatch::read_text(open(&path)?).map_err(in_file(&path))?;
            let dist = match dist_path {
                Some(p) => read_train_dist(&p, batch.classes())?,
                None => ProbVector::uniform(batch.classes()),
            };
            (batch, dist)
        }
        (None, Some(samples), Some(run)) if dist_path.is_none() => {
            let mixture = run_mixture(&run)?;
            let points = read_samples(&samples)?;
            if points.is_empty() {
                return Err(CliError::usage(format!(
                    "{}: no samples",
                    samples.display()
                )));
            }
            let rows = points
                .iter()
                .map(|p| oracle_posterior(&mixture, p))
                .collect();
            (ClassifierBatch::new(rows)?, mixture.weight_vector())
        }
        _ => {
            return Err(CliError::usage(
                "give either --batch [--train-dist] or both --samples and --run",
            ))
        }
    };

    let scores = ScoreReport::evaluate(&batch, &train_dist)?;
    let report = Report {
        samples: batch.len(),
        classes: batch.classes(),
        decomposition_error: scores.decomposition_error(),
        scores,
    };
    ensure_dir(&ctx.out)?;
    let path = ctx.out.join("score.json");
    write_json(&path, &report)?;
    let mut manifest = RunManifest::new("score", None, config);
    manifest.outputs.insert("scores".into(), path);
    manifest.write(&ctx.out)?;

    println!(
        "inception {:.6} mode {:.6} am {:.6} (kl {:.6} + entropy {:.6}) over {} samples",
        scores.inception_score,
        scores.mode_score,
        scores.am_score,
        scores.am_kl_term,
        scores.am_entropy_term,
        report.samples
    );
    scores
        .check_identities()
        .map_err(|e| CliError::Property(e.to_string()))
}
