//! `wsnkm` command line.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 unreadable scenario or bad
//! arguments, 3 invalid scenario (including a missing seed).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use wsnkm::recipes::{run_recipe, Recipe};
use wsnkm::scenario::Scenario;
use wsnkm::SimError;

#[derive(Debug, Parser)]
#[command(name = "wsnkm", version, about = "Key-management simulator and experiment recipes")]
struct Args {
    /// Scenario file (TOML). Defaults apply without one.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// run, fig2, fig3, fig6, fig7, table4, table5, replay-suite, reception,
    /// calibrate or provision.
    #[arg(long, default_value = "run")]
    recipe: String,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the scenario replica count.
    #[arg(long)]
    replicas: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("wsnkm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(args: &Args) -> Result<Vec<PathBuf>, SimError> {
    let recipe: Recipe = args.recipe.parse().map_err(|_| SimError::Parse(format!("unknown recipe {:?}", args.recipe)))?;
    let mut scenario = match &args.scenario {
        Some(path) => Scenario::load(path)?,
        None => Scenario::default(),
    };
    if args.seed.is_some() {
        scenario.seed = args.seed;
    }
    if let Some(r) = args.replicas {
        scenario.replicas = r;
    }
    let artifacts = run_recipe(recipe, &scenario)?;
    std::fs::create_dir_all(&args.out)?;
    artifacts
        .into_iter()
        .map(|a| {
            let path = args.out.join(&a.name);
            std::fs::write(&path, &a.bytes)?;
            Ok(path)
        })
        .collect()
}
