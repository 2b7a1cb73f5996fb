use icebox_core::linalg::lanczos::LanczosOptions;
use icebox_core::subspace::scaling_study;
use serde_json::json;

use super::header;
use crate::config::ScalingParams;
use crate::error::CliError;
use crate::plot::{PlotKind, PlotSpec};
use crate::report::Run;

pub fn run(p: &ScalingParams, run: &mut Run) -> Result<Vec<PlotSpec>, CliError> {
    let opts = LanczosOptions {
        tolerance: p.tolerance,
        ..LanczosOptions::default()
    };
    let head = header(&["n_s", "N_s", "omega", "lambda", "matvecs"]);
    let row = |pt: &icebox_core::subspace::ScalingPoint| {
        vec![pt.n_s as f64, 2f64.powi(pt.n_s as i32), pt.omega, pt.lambda, pt.matvecs as f64]
    };
    match run.time("eigensolve", |_| scaling_study(&p.sizes, &p.gamma, &opts)) {
        Ok(fit) => {
            let rows: Vec<Vec<f64>> = fit.points.iter().map(row).collect();
            run.write_table("scaling.csv", &head, &rows, Some(json!({ "gamma": p.gamma })))?;
            run.write_json("scaling.json", &fit)?;
            run.note("slope", fit.slope)?;
            run.note("rms_residual", fit.rms_residual)?;
            let mut plot = PlotSpec::line("gap frequency scaling", "scaling.csv", "N_s", &["omega"], "N_s", "omega");
            plot.kind = PlotKind::LogLog;
            plot.reference_slopes = fit.reference_slopes.to_vec();
            Ok(vec![plot])
        }
        Err(failure) => {
            // Keep the sizes that finished before reporting the failure.
            let rows: Vec<Vec<f64>> = failure.completed.iter().map(row).collect();
            run.write_table("scaling.csv", &head, &rows, Some(json!({ "gamma": p.gamma, "partial": true })))?;
            run.note("failed_size", failure.n_s)?;
            Err(CliError::Numerical(failure.to_string()))
        }
    }
}
