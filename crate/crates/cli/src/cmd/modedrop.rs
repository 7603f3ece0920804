use super::Context;
use crate::output::{ensure_dir, num, write_csv, RunManifest};
use crate::CliError;
use amgan_core::metrics::{mode_drop_simulation, Density, ModeDropConfig};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Number of points, one per class.
    #[arg(long)]
    n: Option<usize>,
    /// Class density: `uniform` or `gaussian`.
    #[arg(long)]
    density: Option<String>,
    /// Gaussian density centre over the class index (default N/2).
    #[arg(long)]
    mean: Option<f64>,
    /// Gaussian density spread over the class index (default N/4).
    #[arg(long)]
    std: Option<f64>,
    /// Random drop-sets per kept count.
    #[arg(long)]
    trials: Option<usize>,
    /// Largest number of dropped points (default N-1).
    #[arg(long)]
    dropped: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

pub fn run(ctx: &Context, args: Args) -> Result<(), CliError> {
    let mut s = ctx.settings()?;
    let n: usize = s.require("n", args.n)?;
    let density = match s
        .get("density", args.density, "uniform".to_string())?
        .as_str()
    {
        "uniform" => Density::Uniform,
        "gaussian" => {
            let Density::Gaussian { mean, std } = Density::gaussian_default(n) else {
                unreachable!()
            };
            Density::Gaussian {
                mean: s.get("mean", args.mean, mean)?,
                std: s.get("std", args.std, std)?,
            }
        }
        other => return Err(CliError::usage(format!("unknown density `{other}`"))),
    };
    let config = ModeDropConfig {
        n_points: n,
        density,
        dropped: s.get("dropped", args.dropped, n.saturating_sub(1))?,
        trials: s.get("trials", args.trials, 1000)?,
        seed: s.get("seed", args.seed, 0)?,
    };
    let resolved = s.finish()?;
    let series = mode_drop_simulation(&config)?;

    ensure_dir(&ctx.out)?;
    let path = ctx.out.join("modedrop.csv");
    write_csv(
        &path,
        &["kept", "dropped", "mean", "min", "max"],
        series.iter().map(|p| {
            vec![
                p.kept.to_string(),
                p.dropped.to_string(),
                num(p.mean),
                num(p.min),
                num(p.max),
            ]
        }),
    )?;
    let mut manifest = RunManifest::new("modedrop", Some(config.seed), resolved);
    manifest.details = serde_json::to_value(config).expect("serializable");
    manifest.outputs.insert("series".into(), path.clone());
    manifest.write(&ctx.out)?;
    println!("wrote {} kept counts to {}", series.len(), path.display());
    Ok(())
}
