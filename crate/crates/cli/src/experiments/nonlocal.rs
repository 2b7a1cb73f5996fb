use std::f64::consts::PI;

use icebox_core::analytics::{effective_frequency, exact_effective_evolution, mean_search_time, nonlocal_pg};
use icebox_core::dynamics::{ground_state_probability, time_grid};
use icebox_core::hamiltonian::build_nonlocal_model;
use icebox_core::{StateVector, SystemDims};
use serde_json::json;

use super::{header, propagate, target};
use crate::config::NonlocalParams;
use crate::error::{CliError, Context};
use crate::plot::PlotSpec;
use crate::report::Run;

pub fn run(p: &NonlocalParams, seed: u64, run: &mut Run) -> Result<Vec<PlotSpec>, CliError> {
    let dims = SystemDims::new(p.n_s, p.n_b).context("dimensions")?;
    let g_s = target(p.target, p.n_s, seed);
    let (ns, nb) = (dims.system_dim() as f64, dims.bath_dim() as f64);
    let omega = effective_frequency(ns, nb).context("effective frequency")?;
    let t_max = p.t_max.unwrap_or(3.0 * PI / omega);
    let times = time_grid(t_max, p.dt);

    let op = build_nonlocal_model(g_s, p.g_b, dims).context("building non-local model")?;
    let psi = StateVector::uniform_system_with_bath(dims, p.g_b).context("initial state")?;
    let mut full = Vec::with_capacity(times.len());
    propagate(run, &op, &psi, &times, |_, s| {
        full.push(ground_state_probability(s, g_s)?);
        Ok(())
    })?;

    let (mut rows, mut dev_full, mut dev_closed) = (Vec::new(), 0.0f64, 0.0f64);
    run.time("analytics", |_| {
        for (t, f) in times.iter().zip(&full) {
            let exact = exact_effective_evolution(ns, nb, *t)?.ground_probability();
            let closed = nonlocal_pg(ns, nb, *t)?;
            dev_full = dev_full.max((f - exact).abs());
            dev_closed = dev_closed.max((closed - exact).abs());
            rows.push(vec![*t, *f, exact, closed]);
        }
        Ok::<_, icebox_core::Error>(())
    })
    .context("reduced models")?;

    run.write_table(
        "nonlocal.csv",
        &header(&["t", "full", "exact_4x4", "closed_form"]),
        &rows,
        Some(json!({ "hamiltonian": op.describe(), "target": g_s, "g_b": p.g_b })),
    )?;
    run.note("target", g_s)?;
    run.note("omega", omega)?;
    run.note("max_abs_full_minus_exact", dev_full)?;
    run.note("max_abs_closed_minus_exact", dev_closed)?;
    if ns >= 2.0 && nb >= 2.0 {
        run.note("mean_search_time", mean_search_time(ns, nb).context("mean search time")?)?;
    }
    Ok(vec![PlotSpec::line(
        "target probability: full, exact 4x4, closed form",
        "nonlocal.csv",
        "t",
        &["full", "exact_4x4", "closed_form"],
        "t",
        "P_g",
    )])
}
