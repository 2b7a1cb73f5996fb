use std::f64::consts::PI;

use icebox_core::analytics::{plateau_window, LocalEstimate};
use icebox_core::dynamics::{fourier_spectrum, ground_state_probability, time_grid, SpectrumOptions, TimeSeries};
use icebox_core::hamiltonian::{build_local_model, interaction_strength};
use icebox_core::linalg::lanczos::LanczosOptions;
use icebox_core::subspace::{subspace_gap, SubspaceProblem};
use icebox_core::spin::binomial;
use icebox_core::{StateVector, SystemDims};
use serde_json::json;

use super::{header, propagate, target};
use crate::config::{EvolveMethod, InitialState, LocalEvolveParams};
use crate::error::{CliError, Context};
use crate::plot::{Markers, PlotSpec};
use crate::report::Run;

pub fn run(p: &LocalEvolveParams, seed: u64, run: &mut Run) -> Result<Vec<PlotSpec>, CliError> {
    let n = p.n_s;
    let g_s = target(p.target, n, seed);
    let lambda = interaction_strength(n, &p.gamma).context("interaction strength")?;
    let times = time_grid(p.t_max, p.dt);
    // Initial system labels with their weights.
    let n_states = (1u64 << n) as f64;
    let wells: Vec<(usize, f64)> = match (p.initial, p.method) {
        (InitialState::Uniform, EvolveMethod::Distances) => {
            (0..=n).map(|l| (g_s ^ ((1 << l) - 1), binomial(n, l) / n_states)).collect()
        }
        (InitialState::Uniform, _) => (0..1usize << n).map(|j| (j, 1.0 / n_states)).collect(),
        (InitialState::Well, _) => vec![(g_s ^ ((1 << p.l_j) - 1), 1.0)],
    };

    let mut pg = vec![0.0; times.len()];
    match p.method {
        EvolveMethod::Full => {
            let dims = SystemDims::new(n, n).context("dimensions")?;
            let (op, _) = build_local_model(g_s, p.g_b, n, &p.gamma).context("building local model")?;
            let psi = match p.initial {
                InitialState::Uniform => StateVector::uniform_system_with_bath(dims, p.g_b),
                InitialState::Well => dims.encode(wells[0].0, p.g_b).and_then(|k| StateVector::basis(op.space(), k)),
            }
            .context("initial state")?;
            let mut k = 0;
            propagate(run, &op, &psi, &times, |_, s| {
                pg[k] = ground_state_probability(s, g_s)?;
                k += 1;
                Ok(())
            })?;
        }
        EvolveMethod::Blocks | EvolveMethod::Distances => {
            // Each |j_s, g_b> lives in its own parity block.
            for &(j_s, w) in &wells {
                let problem = SubspaceProblem::new(n, g_s, j_s, lambda, p.g_b).context("parity block")?;
                let op = problem.operator().context("block operator")?;
                let psi = StateVector::basis(op.space(), j_s).context("block initial state")?;
                let mut k = 0;
                propagate(run, &op, &psi, &times, |_, s| {
                    pg[k] += w * s.amplitude(g_s).norm_sqr();
                    k += 1;
                    Ok(())
                })?;
            }
        }
    }

    // Gap frequencies for the peak assignment and the estimate.
    let top = (n / 2 + 1).min(n);
    let gaps = run.time("eigensolve", |_| {
        (1..=top)
            .map(|l| {
                let problem = SubspaceProblem::new(n, g_s, g_s ^ ((1 << l) - 1), lambda, p.g_b)?;
                subspace_gap(&problem, &LanczosOptions::default())
            })
            .collect::<icebox_core::Result<Vec<_>>>()
    })
    .context("gap eigensolves")?;
    let omegas: Vec<f64> = gaps.iter().map(|g| g.omega).collect();

    let series = TimeSeries::new("P_g", 0.0, p.dt, pg.clone()).context("P_g series")?;
    let opts = SpectrumOptions {
        min_prominence: p.min_prominence,
        ..SpectrumOptions::default()
    };
    let spectrum = run.time("spectrum", |_| fourier_spectrum(&series, &opts)).context("spectrum")?;

    let meta = json!({ "target": g_s, "lambda": lambda, "initial": p.initial, "method": p.method });
    run.write_series("pg.csv", &series, Some(meta.clone()))?;
    let rows: Vec<Vec<f64>> = spectrum
        .frequencies
        .iter()
        .zip(&spectrum.magnitudes)
        .map(|(f, m)| vec![*f, *m])
        .collect();
    run.write_table("spectrum.csv", &header(&["omega", "magnitude"]), &rows, Some(meta.clone()))?;

    // Peaks tagged with the nearest 2 omega_l; "matched" within one grid step 2 pi / T.
    let grid = 2.0 * PI / p.t_max;
    let mut peak_rows = Vec::new();
    for pk in &spectrum.peaks {
        let (l, two_w) = omegas
            .iter()
            .enumerate()
            .map(|(i, w)| (i + 1, 2.0 * w))
            .min_by(|a, b| (a.1 - pk.frequency).abs().total_cmp(&(b.1 - pk.frequency).abs()))
            .unwrap_or((0, f64::NAN));
        let matched = (two_w - pk.frequency).abs() <= grid;
        peak_rows.push(vec![pk.frequency, pk.magnitude, pk.width, pk.prominence, l as f64, two_w, matched as u8 as f64]);
    }
    run.write_table(
        "peaks.csv",
        &header(&["omega", "magnitude", "width", "prominence", "nearest_l", "two_omega_l", "matched"]),
        &peak_rows,
        Some(meta.clone()),
    )?;
    let gap_rows: Vec<Vec<f64>> = gaps
        .iter()
        .enumerate()
        .map(|(i, g)| vec![(i + 1) as f64, g.e0, g.e1, g.omega, 2.0 * g.omega])
        .collect();
    run.write_table("gaps.csv", &header(&["l", "e0", "e1", "omega", "two_omega"]), &gap_rows, Some(meta.clone()))?;

    let estimate = LocalEstimate {
        a0: p.estimate.a0,
        amplitudes: p.estimate.amplitudes.clone(),
    };
    let est: Vec<f64> = times
        .iter()
        .map(|t| estimate.ground_probability(n, &omegas, *t))
        .collect::<icebox_core::Result<_>>()
        .context("local estimate")?;
    run.write_series(
        "estimate.csv",
        &TimeSeries::new("estimate", 0.0, p.dt, est).context("estimate series")?,
        Some(json!({ "a0": estimate.a0, "amplitudes": estimate.amplitudes })),
    )?;

    run.note("target", g_s)?;
    run.note("lambda", lambda)?;
    run.note("omegas", &omegas)?;
    run.note("grid_resolution", grid)?;
    let assigned: Vec<serde_json::Value> = (1..=top)
        .map(|l| {
            let two_w = 2.0 * omegas[l - 1];
            let nearest = spectrum
                .peaks
                .iter()
                .map(|pk| pk.frequency)
                .min_by(|a, b| (a - two_w).abs().total_cmp(&(b - two_w).abs()));
            json!({
                "l": l,
                "two_omega": two_w,
                "nearest_peak": nearest,
                "matched": nearest.is_some_and(|f| (f - two_w).abs() <= grid),
            })
        })
        .collect();
    run.note("peak_assignment", assigned)?;
    match plateau_window(n, &omegas) {
        Ok((lo, hi)) => run.note("plateau_window", [lo, hi])?,
        Err(e) => run.note("plateau_window", e.to_string())?,
    }

    let mut spec_plot = PlotSpec::line("Fourier magnitude of P_g", "spectrum.csv", "omega", &["magnitude"], "omega", "|F[P_g]|");
    // Predicted 2 omega_l as guide lines, detected peaks as circles.
    spec_plot.markers = vec![
        Markers {
            csv: "gaps.csv".into(),
            x: "two_omega".into(),
            y: None,
        },
        Markers {
            csv: "peaks.csv".into(),
            x: "omega".into(),
            y: Some("magnitude".into()),
        },
    ];
    Ok(vec![
        PlotSpec::line("ground-state probability", "pg.csv", "t", &["P_g"], "t", "P_g"),
        spec_plot,
        PlotSpec::line("multi-block estimate", "estimate.csv", "t", &["estimate"], "t", "P_g"),
    ])
}
