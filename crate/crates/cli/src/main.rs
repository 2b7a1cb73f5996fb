use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use icebox_cli::{run, CliError, ExperimentConfig, ExperimentId};

/// Run a cooling-search experiment and write its data to a directory.
#[derive(Parser, Debug)]
#[command(name = "icebox", version)]
struct Args {
    experiment: ExperimentId,
    /// TOML parameter file; omitted keys take the experiment's defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one parameter, e.g. `--set n_s=10` or `--set estimate.a0=0.8`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    out: PathBuf,
    /// Also render SVG plots from the written CSV files.
    #[arg(long)]
    plot: bool,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("icebox: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(args: Args) -> Result<(), CliError> {
    let text = match &args.config {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?,
        None => String::new(),
    };
    let cfg = ExperimentConfig::from_sources(args.experiment, &text, &args.overrides, args.out, args.plot)?;
    let report = run(&cfg)?;
    println!(
        "{}: {} files in {} ({:.2}s)",
        report.experiment,
        report.manifest.len(),
        cfg.out.display(),
        report.timings.wall_seconds
    );
    Ok(())
}
