use icebox_core::analytics::{single_magnon_amplitudes, spinwave_perturbative, SpinWaveSetup};
use icebox_core::dynamics::{ground_state_probability, magnetization_profile, time_grid, TimeSeries};
use icebox_core::hamiltonian::{build_toy_model, build_toy_model_parts};
use icebox_core::{Register, StateVector, SystemDims};
use serde_json::json;

use super::{header, propagate};
use crate::config::ToyWaveParams;
use crate::error::{CliError, Context};
use crate::plot::{PlotKind, PlotSpec};
use crate::report::Run;

pub fn run(p: &ToyWaveParams, run: &mut Run) -> Result<Vec<PlotSpec>, CliError> {
    let dims = SystemDims::new(1, p.n_b).context("toy dimensions")?;
    let parts = build_toy_model_parts(p.n_b, p.j, p.b, p.lambda).context("building toy model")?;
    let op = build_toy_model(p.n_b, p.j, p.b, p.lambda).context("building toy model")?;
    // Excited system spin on the all-down bath.
    let psi = StateVector::basis(op.space(), dims.encode(1, 0).context("initial label")?).context("initial state")?;
    let bath_ground = StateVector::basis(op.space(), 0).context("bath ground")?;
    let e_bath0 = parts.bath.expectation(&bath_ground).context("bath ground energy")?;

    let times = time_grid(p.t_max, p.dt);
    let (mut pg, mut bath, mut mag) = (Vec::new(), Vec::new(), Vec::new());
    propagate(run, &op, &psi, &times, |t, s| {
        pg.push(ground_state_probability(s, 0)?);
        bath.push(parts.bath.expectation(s)? - e_bath0);
        let mut row = vec![t];
        row.extend(magnetization_profile(s, Register::Bath)?);
        mag.push(row);
        Ok(())
    })?;

    let meta = json!({ "hamiltonian": op.describe(), "initial": "|e_s, g_b>" });
    run.write_series("pg.csv", &TimeSeries::new("P_g", 0.0, p.dt, pg.clone()).context("P_g series")?, Some(meta.clone()))?;
    run.write_series(
        "bath_energy.csv",
        &TimeSeries::new("bath_energy", 0.0, p.dt, bath.clone()).context("bath series")?,
        Some(meta.clone()),
    )?;
    let mut cols = vec!["t".to_string()];
    cols.extend((0..p.n_b).map(|m| format!("m{m}")));
    run.write_table("magnetization.csv", &cols, &mag, Some(meta))?;
    run.note("final_pg", pg.last())?;
    run.note("max_pg", pg.iter().cloned().fold(0.0, f64::max))?;
    run.note("final_bath_energy", bath.last())?;

    if p.spinwave_lambda != 0.0 {
        run.time("spinwave", |run| spinwave(p, dims, run))?;
    }

    let mut heat = PlotSpec::line("bath magnetization", "magnetization.csv", "t", &[], "t", "qubit m");
    heat.kind = PlotKind::Heatmap;
    Ok(vec![
        PlotSpec::line("ground-state probability", "pg.csv", "t", &["P_g"], "t", "P_g"),
        PlotSpec::line("bath energy above its ground state", "bath_energy.csv", "t", &["bath_energy"], "t", "<H_b> - E_0"),
        heat,
    ])
}

/// Early-time one-magnon amplitudes at weak coupling against the decoupled formula.
fn spinwave(p: &ToyWaveParams, dims: SystemDims, run: &mut Run) -> Result<(), CliError> {
    let op = build_toy_model(p.n_b, p.j, p.b, p.spinwave_lambda).context("building weak-coupling model")?;
    let setup = SpinWaveSetup::toy_model(p.n_b, p.j, p.b, p.spinwave_lambda).context("spin-wave modes")?;
    let psi = StateVector::basis(op.space(), dims.encode(1, 0).context("initial label")?).context("initial state")?;
    let times: Vec<f64> = time_grid(p.spinwave_t_max, p.dt).into_iter().skip(1).collect();
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    propagate(run, &op, &psi, &times, |t, s| {
        let full = single_magnon_amplitudes(s, 0, &setup.modes)?;
        let pert = spinwave_perturbative(&setup, t)?;
        for (q, (f, b)) in full.iter().zip(&pert.b_k).enumerate() {
            let (f2, b2) = (f.norm_sqr(), b.norm_sqr());
            if f2 > 0.0 {
                worst = worst.max((f2 - b2).abs() / f2);
            }
            rows.push(vec![t, q as f64, setup.modes[q], f2, b2]);
        }
        Ok(())
    })?;
    run.write_table(
        "spinwave.csv",
        &header(&["t", "q", "k", "full", "perturbative"]),
        &rows,
        Some(json!({ "lambda": p.spinwave_lambda, "quantity": "|b_k|^2" })),
    )?;
    run.note("spinwave_max_relative_error", worst)
}
