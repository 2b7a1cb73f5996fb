use icebox_core::analytics::wavepacket_iteration;
use icebox_core::hamiltonian::{build_radial_tridiagonal, interaction_strength};
use serde_json::json;

use crate::config::WavepacketParams;
use crate::error::{CliError, Context};
use crate::plot::PlotSpec;
use crate::report::Run;

pub fn run(p: &WavepacketParams, run: &mut Run) -> Result<Vec<PlotSpec>, CliError> {
    let n = p.n_s;
    let lambda = match p.lambda {
        Some(l) => l,
        None => interaction_strength(n, &p.gamma).context("interaction strength")?,
    };
    let h_max = p.h_max.unwrap_or(n);
    let (solutions, radial) = run
        .time("analytics", |_| {
            let sols = p
                .orders
                .iter()
                .map(|&o| wavepacket_iteration(n, lambda, o, h_max))
                .collect::<icebox_core::Result<Vec<_>>>()?;
            Ok::<_, icebox_core::Error>((sols, build_radial_tridiagonal(n, lambda)?.eigen()))
        })
        .context("wave-packet iteration")?;
    let radial_amps = &radial.shell_amplitudes[0];

    let mut cols = vec!["h".to_string()];
    cols.extend(p.orders.iter().map(|o| format!("order_{o}")));
    cols.push("radial".into());
    let rows: Vec<Vec<f64>> = (0..=h_max)
        .map(|h| {
            let mut row = vec![h as f64];
            row.extend(solutions.iter().map(|s| s.amplitudes[h]));
            row.push(radial_amps[h]);
            row
        })
        .collect();
    run.write_table("wavepacket.csv", &cols, &rows, Some(json!({ "n_s": n, "lambda": lambda })))?;

    let orders: Vec<serde_json::Value> = solutions
        .iter()
        .map(|s| {
            json!({
                "order": s.order,
                "energy": s.energy,
                "a0_sq": s.amplitudes[0] * s.amplitudes[0],
                "ratios": s.ratios,
                "energy_minus_radial": s.energy - radial.values[0],
            })
        })
        .collect();
    let summary = json!({
        "n_s": n,
        "lambda": lambda,
        "radial_ground_energy": radial.values[0],
        "radial_a0_sq": radial_amps[0] * radial_amps[0],
        "orders": orders,
    });
    run.write_json("wavepacket.json", &summary)?;
    run.note("radial_ground_energy", radial.values[0])?;
    run.note("orders", orders)?;

    let names: Vec<String> = cols[1..].to_vec();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut plot = PlotSpec::line("single-well shell amplitudes", "wavepacket.csv", "h", &refs, "h", "a_h");
    plot.log_y = true;
    Ok(vec![plot])
}
