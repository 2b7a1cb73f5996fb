mod gap;
mod grover;
mod local;
mod nonlocal;
mod scaling;
mod toy;
mod wavepacket;

use icebox_core::dynamics::{evolve_with, PropagatorConfig};
use icebox_core::hamiltonian::OperatorSpec;
use icebox_core::StateVector;

use crate::config::{ExperimentConfig, Params};
use crate::error::{CliError, Context};
use crate::plot::PlotSpec;
use crate::report::Run;

/// Computes and writes an experiment's data; returns the plots it supports.
pub fn execute(cfg: &ExperimentConfig, run: &mut Run) -> Result<Vec<PlotSpec>, CliError> {
    match &cfg.params {
        Params::ToyWave(p) => toy::run(p, run),
        Params::Nonlocal(p) => nonlocal::run(p, cfg.seed, run),
        Params::LocalEvolve(p) => local::run(p, cfg.seed, run),
        Params::Gap(p) => gap::run(p, cfg.seed, run),
        Params::Scaling(p) => scaling::run(p, run),
        Params::Wavepacket(p) => wavepacket::run(p, run),
        Params::GroverCheck(p) => grover::run(p, cfg.seed, run),
    }
}

fn target(fixed: Option<usize>, n_s: usize, seed: u64) -> usize {
    fixed.unwrap_or_else(|| crate::select_target(n_s, seed))
}

/// Propagates `psi` over `times`, auditing norm and energy at every sample.
fn propagate<F>(run: &mut Run, op: &OperatorSpec, psi: &StateVector, times: &[f64], mut observe: F) -> Result<(), CliError>
where
    F: FnMut(f64, &StateVector) -> icebox_core::Result<()>,
{
    let e0 = op.expectation(psi).context("initial energy")?;
    run.audit.trajectories += 1;
    run.time("propagation", |run| {
        let audit = &mut run.audit;
        evolve_with(op, psi, times, &PropagatorConfig::default(), |t, s| {
            audit.record(op, e0, s)?;
            observe(t, s)
        })
        .map(|_| ())
        .context(format!("propagating {}", op.label()))
    })
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}
