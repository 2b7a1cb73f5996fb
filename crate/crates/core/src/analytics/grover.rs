use serde::{Deserialize, Serialize};

use crate::dynamics::{Propagator, PropagatorConfig};
use crate::error::{Error, Result};
use crate::hamiltonian::{OperatorSpec, ProjectorTarget, Term};
use crate::linalg::dot_complex;
use crate::spin::{Space, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroverStep {
    pub step: usize,
    /// `|<psi_G|psi_H>|`
    pub fidelity: f64,
    pub success_hamiltonian: f64,
    pub success_grover: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroverReport {
    pub n: usize,
    pub target: usize,
    pub steps: Vec<GroverStep>,
}

impl GroverReport {
    pub fn min_fidelity(&self) -> f64 {
        self.steps.iter().map(|s| s.fidelity).fold(1.0, f64::min)
    }

    pub fn last(&self) -> &GroverStep {
        self.steps.last().expect("report always holds step 0")
    }
}

/// `H = -|g><g| - |xi><xi|` on `n` qubits.
pub fn grover_hamiltonian(n: usize, target: usize) -> Result<OperatorSpec> {
    let space = Space::system(n)?;
    OperatorSpec::new(
        format!("-|{target}><{target}| - |xi><xi|"),
        space,
        vec![
            Term::Projector {
                register: None,
                target: ProjectorTarget::Basis { index: target },
                weight: -1.0,
            },
            Term::Projector {
                register: None,
                target: ProjectorTarget::Uniform,
                weight: -1.0,
            },
        ],
    )
}

/// Compares `m` applications of `exp(-i pi H)` with `m` Grover iterations
/// `R_xi R_g`, both started from the uniform state `|xi>`.
pub fn grover_equivalence(n: usize, target: usize, steps: usize) -> Result<GroverReport> {
    if n == 0 || n > 12 {
        return Err(Error::domain(format!("Grover comparison supports 1..=12 qubits, got {n}")));
    }
    let dim = 1usize << n;
    if target >= dim {
        return Err(Error::domain(format!("target {target} outside {n} qubits")));
    }
    let h = grover_hamiltonian(n, target)?;
    let cfg = PropagatorConfig {
        tolerance: 1e-13,
        ..Default::default()
    };
    let mut prop = Propagator::new(&h, &cfg)?;
    let amp = C64::new((dim as f64).sqrt().recip(), 0.0);
    let mut psi_h = vec![amp; dim];
    let mut psi_g = psi_h.clone();
    let record = |step, a: &[C64], b: &[C64]| GroverStep {
        step,
        fidelity: dot_complex(b, a).norm(),
        success_hamiltonian: a[target].norm_sqr(),
        success_grover: b[target].norm_sqr(),
    };
    let mut out = vec![record(0, &psi_h, &psi_g)];
    for step in 1..=steps {
        prop.advance(&mut psi_h, std::f64::consts::PI)?;
        // R_g then R_xi.
        psi_g[target] = -psi_g[target];
        let mean: C64 = psi_g.iter().sum::<C64>() / dim as f64;
        psi_g.iter_mut().for_each(|a| *a -= 2.0 * mean);
        out.push(record(step, &psi_h, &psi_g));
    }
    Ok(GroverReport {
        n,
        target,
        steps: out,
    })
}
