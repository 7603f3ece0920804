use serde::Serialize;

use super::Context;
use crate::output::{ensure_dir, write_json, RunManifest};
use crate::CliError;
use amgan_core::verify::{run_all, PropertyResult};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Seed for the random instances.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Serialize)]
struct Report<'a> {
    seed: u64,
    all_passed: bool,
    properties: &'a [PropertyResult],
}

pub fn run(ctx: &Context, args: Args) -> Result<(), CliError> {
    let mut s = ctx.settings()?;
    let seed = s.get("seed", args.seed, 0)?;
    let config = s.finish()?;

    let results = run_all(seed)?;
    for r in &results {
        println!(
            "{} {:<36} cases={:<5} worst={:.3e} tol={:.0e}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.cases,
            r.worst_error,
            r.tolerance
        );
    }
    let all_passed = results.iter().all(|r| r.passed);

    ensure_dir(&ctx.out)?;
    let path = ctx.out.join("verify.json");
    write_json(
        &path,
        &Report {
            seed,
            all_passed,
            properties: &results,
        },
    )?;
    let mut manifest = RunManifest::new("verify", Some(seed), config);
    manifest.outputs.insert("report".into(), path);
    manifest.write(&ctx.out)?;

    if all_passed {
        Ok(())
    } else {
        let failed: Vec<&str> = results
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.name.as_str())
            .collect();
        Err(CliError::Property(failed.join(", ")))
    }
}
