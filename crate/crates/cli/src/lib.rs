//! Command-line experiment runner: declarative configs in, CSV/JSON data and
//! optional SVG plots out.

pub mod config;
pub mod error;
pub mod experiments;
pub mod plot;
pub mod report;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use config::{ExperimentConfig, ExperimentId};
pub use error::CliError;
pub use report::RunReport;

/// Deterministic target label in `0..2^n_s` for `seed`.
pub fn select_target(n_s: usize, seed: u64) -> usize {
    if n_s == 0 {
        return 0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.gen_range(0..1u64 << n_s) as usize
}

/// Runs one experiment and writes `report.json`, also when the run fails after
/// the output directory exists.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    cfg.check_resources()?;
    let config = serde_json::to_value(cfg)?;
    let metadata = serde_json::json!({
        "experiment": cfg.experiment.name(),
        "seed": cfg.seed,
        "config": config,
    });
    let mut run = report::Run::new(cfg.out.clone(), metadata)?;
    let outcome = experiments::execute(cfg, &mut run).and_then(|plots| {
        if cfg.plot {
            run.time("plot", |run| {
                for spec in &plots {
                    plot::emit_plot(&run.dir, spec)?;
                    run.add_file(spec.svg_name());
                }
                Ok::<_, CliError>(())
            })?;
        }
        Ok(())
    });
    match outcome {
        Ok(()) => {
            let report = run.finish(cfg.experiment.name(), cfg.seed, config, None)?;
            match &report.error {
                Some(msg) => Err(CliError::Numerical(msg.clone())),
                None => Ok(report),
            }
        }
        Err(e) => {
            run.finish(cfg.experiment.name(), cfg.seed, config, Some(&e))?;
            Err(e)
        }
    }
}
