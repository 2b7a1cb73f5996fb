use icebox_core::analytics::grover_equivalence;
use serde_json::json;

use super::{header, target};
use crate::config::GroverParams;
use crate::error::{CliError, Context};
use crate::plot::PlotSpec;
use crate::report::Run;

pub fn run(p: &GroverParams, seed: u64, run: &mut Run) -> Result<Vec<PlotSpec>, CliError> {
    let g = target(p.target, p.n, seed);
    let report = run
        .time("propagation", |_| grover_equivalence(p.n, g, p.steps))
        .context("Grover comparison")?;
    let rows: Vec<Vec<f64>> = report
        .steps
        .iter()
        .map(|s| vec![s.step as f64, s.fidelity, s.success_hamiltonian, s.success_grover])
        .collect();
    run.write_table(
        "grover.csv",
        &header(&["step", "fidelity", "success_hamiltonian", "success_grover"]),
        &rows,
        Some(json!({ "n": p.n, "target": g })),
    )?;
    run.write_json("grover.json", &report)?;
    run.note("target", g)?;
    run.note("min_fidelity", report.min_fidelity())?;
    run.note("final_success_hamiltonian", report.last().success_hamiltonian)?;
    run.note("final_success_grover", report.last().success_grover)?;
    Ok(vec![PlotSpec::line(
        "pi-time evolution against Grover iterations",
        "grover.csv",
        "step",
        &["fidelity", "success_hamiltonian", "success_grover"],
        "step m",
        "probability",
    )])
}
