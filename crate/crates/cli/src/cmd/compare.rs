use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use super::Context;
use crate::output::{ensure_dir, num, write_csv, RunManifest};
use crate::CliError;

/// Final-snapshot columns carried into the comparison.
pub const METRICS: [&str; 7] = [
    "mode_coverage",
    "inception_score",
    "log_inception_score",
    "mode_score",
    "am_score",
    "intra_mode_dispersion",
    "d_r_mean_on_fake",
];

#[derive(Debug, clap::Args)]
pub struct Args {
    /// manifest.json files written by `train`.
    #[arg(required = true)]
    manifests: Vec<PathBuf>,
}

struct RunRow {
    variant: String,
    labeling: String,
    seed: u64,
    step: String,
    values: Vec<f64>,
}

/// Output paths are recorded as written; fall back to the manifest's own
/// directory when the run tree has been moved.
fn locate(manifest: &Path, recorded: &Path) -> PathBuf {
    if recorded.exists() {
        return recorded.to_path_buf();
    }
    match (manifest.parent(), recorded.file_name()) {
        (Some(dir), Some(name)) => dir.join(name),
        _ => recorded.to_path_buf(),
    }
}

fn last_row(path: &Path) -> Result<HashMap<String, String>, CliError> {
    let err = |e: csv::Error| CliError::usage(format!("{}: {e}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(err)?;
    let header = reader.headers().map_err(err)?.clone();
    let mut last = None;
    for record in reader.records() {
        last = Some(record.map_err(err)?);
    }
    let last = last.ok_or_else(|| CliError::usage(format!("{}: empty trace", path.display())))?;
    Ok(header
        .iter()
        .map(str::to_string)
        .zip(last.iter().map(str::to_string))
        .collect())
}

fn load(path: &Path) -> Result<RunRow, CliError> {
    let manifest = RunManifest::read(path)?;
    let bad = |what: &str| CliError::usage(format!("{}: {what}", path.display()));
    if manifest.command != "train" {
        return Err(bad("not a train manifest"));
    }
    let trace = manifest
        .outputs
        .get("trace")
        .ok_or_else(|| bad("no trace output"))?;
    let row = last_row(&locate(path, trace))?;
    let variant = manifest
        .config
        .get("variant")
        .cloned()
        .ok_or_else(|| bad("no variant"))?;
    let labeling = manifest
        .config
        .get("labeling")
        .cloned()
        .ok_or_else(|| bad("no labeling"))?;
    let values = METRICS
        .iter()
        .map(|m| {
            row.get(*m)
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| bad(&format!("trace lacks a numeric `{m}`")))
        })
        .collect::<Result<_, _>>()?;
    Ok(RunRow {
        variant,
        labeling,
        seed: manifest.seed.ok_or_else(|| bad("no seed"))?,
        step: row.get("step").cloned().unwrap_or_default(),
        values,
    })
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

pub fn run(ctx: &Context, args: Args) -> Result<(), CliError> {
    let config = ctx.settings()?.finish()?;
    let runs = args
        .manifests
        .iter()
        .map(|p| load(p))
        .collect::<Result<Vec<_>, _>>()?;

    let mut groups: BTreeMap<(String, String), Vec<&RunRow>> = BTreeMap::new();
    for r in &runs {
        groups
            .entry((r.variant.clone(), r.labeling.clone()))
            .or_default()
            .push(r);
    }

    let mut header = vec!["kind", "variant", "labeling", "seed", "step"];
    header.extend(METRICS);
    let mut rows: Vec<Vec<String>> = Vec::new();
    for ((variant, labeling), members) in &groups {
        for r in members {
            let mut row = vec![
                "run".into(),
                variant.clone(),
                labeling.clone(),
                r.seed.to_string(),
                r.step.clone(),
            ];
            row.extend(r.values.iter().map(|&v| num(v)));
            rows.push(row);
        }
        let mut row = vec![
            "median".into(),
            variant.clone(),
            labeling.clone(),
            String::new(),
            String::new(),
        ];
        let medians: Vec<f64> = (0..METRICS.len())
            .map(|i| median(&mut members.iter().map(|r| r.values[i]).collect::<Vec<_>>()))
            .collect();
        println!(
            "{variant:<16} {labeling:<10} runs {:<3} coverage {:<4} log-inception {:.4} am {:.4}",
            members.len(),
            medians[0],
            medians[2],
            medians[4]
        );
        row.extend(medians.into_iter().map(num));
        rows.push(row);
    }

    ensure_dir(&ctx.out)?;
    let path = ctx.out.join("compare.csv");
    write_csv(&path, &header, rows)?;
    let mut manifest = RunManifest::new("compare", None, config);
    manifest.details = serde_json::json!({ "inputs": args.manifests });
    manifest.outputs.insert("table".into(), path);
    manifest.write(&ctx.out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
    }
}
