use icebox_core::hamiltonian::interaction_strength;
use icebox_core::linalg::lanczos::LanczosOptions;
use icebox_core::subspace::{shell_profile, subspace_gap, SubspaceProblem};
use serde_json::json;

use super::{header, target};
use crate::config::GapParams;
use crate::error::{CliError, Context};
use crate::plot::PlotSpec;
use crate::report::Run;

pub fn run(p: &GapParams, seed: u64, run: &mut Run) -> Result<Vec<PlotSpec>, CliError> {
    let n = p.n_s;
    let g_s = target(p.target, n, seed);
    let lambda = match p.lambda {
        Some(l) => l,
        None => interaction_strength(n, &p.gamma).context("interaction strength")?,
    };
    let distances: Vec<usize> = if p.distances.is_empty() { (1..=n).collect() } else { p.distances.clone() };
    let opts = LanczosOptions {
        tolerance: p.tolerance,
        ..LanczosOptions::default()
    };
    // The well sits on the lowest l_j bits flipped away from the target.
    let well = |l: usize| g_s ^ ((1usize << l) - 1);

    let results = run
        .time("eigensolve", |_| {
            distances
                .iter()
                .map(|&l| subspace_gap(&SubspaceProblem::new(n, g_s, well(l), lambda, 0)?, &opts))
                .collect::<icebox_core::Result<Vec<_>>>()
        })
        .context("gap eigensolves")?;
    let rows: Vec<Vec<f64>> = results
        .iter()
        .map(|r| vec![r.l_j as f64, r.e0, r.e1, r.omega, r.matvecs as f64])
        .collect();
    let meta = json!({ "target": g_s, "lambda": lambda });
    run.write_table("gaps.csv", &header(&["l", "e0", "e1", "omega", "matvecs"]), &rows, Some(meta.clone()))?;
    run.write_json("gap.json", &results)?;
    run.note("target", g_s)?;
    run.note("lambda", lambda)?;
    let mut plots = vec![{
        let mut s = PlotSpec::line("tunnelling frequency against distance", "gaps.csv", "l", &["omega"], "l_j", "omega");
        s.log_y = true;
        s
    }];

    if p.profile_distance > 0 {
        let problem = SubspaceProblem::new(n, g_s, well(p.profile_distance), lambda, 0).context("profile block")?;
        let gap = match results.iter().find(|r| r.l_j as usize == p.profile_distance) {
            Some(r) => r.clone(),
            None => run.time("eigensolve", |_| subspace_gap(&problem, &opts)).context("profile eigensolve")?,
        };
        let profile = shell_profile(&problem, &gap).context("shell profile")?;
        let rows: Vec<Vec<f64>> = profile.rows.iter().map(|&(h, m, a)| vec![h as f64, m as f64, a]).collect();
        let meta = json!({ "target": g_s, "lambda": lambda, "l_j": p.profile_distance, "a0_sq": profile.a0_sq });
        run.write_table("shells.csv", &header(&["h", "m", "amplitude"]), &rows, Some(meta.clone()))?;
        let stats: Vec<Vec<f64>> = profile
            .shells
            .iter()
            .map(|s| {
                vec![
                    s.h as f64,
                    s.count as f64,
                    s.median,
                    s.min,
                    s.max,
                    s.relative_spread,
                    s.flagged as u8 as f64,
                ]
            })
            .collect();
        run.write_table(
            "shell_stats.csv",
            &header(&["h", "count", "median", "min", "max", "relative_spread", "flagged"]),
            &stats,
            Some(meta),
        )?;
        run.note("profile_distance", p.profile_distance)?;
        run.note("a0_sq", profile.a0_sq)?;
        run.note(
            "flagged_shells",
            profile.shells.iter().filter(|s| s.flagged).map(|s| s.h).collect::<Vec<_>>(),
        )?;
        let mut s = PlotSpec::line("wave-packet amplitude by Hamming shell", "shell_stats.csv", "h", &["median", "min", "max"], "h", "amplitude");
        s.log_y = true;
        plots.push(s);
    }
    Ok(plots)
}
