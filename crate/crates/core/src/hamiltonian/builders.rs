use serde::{Deserialize, Serialize};

use super::{OperatorSpec, ProjectorTarget, Site, Term};
use crate::error::{Error, Result};
use crate::spin::{Axis, Register, Space, SystemDims};
use crate::subspace::SubspaceProblem;

/// Which qubit pairs of the bath carry an exchange bond.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    ChainPeriodic,
    ChainOpen,
    EdgeList(Vec<(usize, usize)>),
}

impl Topology {
    pub fn edges(&self, n: usize) -> Vec<(usize, usize)> {
        match self {
            Topology::ChainOpen => (0..n.saturating_sub(1)).map(|m| (m, m + 1)).collect(),
            Topology::ChainPeriodic => (0..n).map(|m| (m, (m + 1) % n)).collect(),
            Topology::EdgeList(e) => e.clone(),
        }
    }
}

/// Model strengths shared by the builders.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingParams {
    /// Exchange strength of the ferromagnetic bath.
    pub j: f64,
    /// On-site energy of the toy-model system spin.
    pub b: f64,
    /// Toy-model coupling.
    pub lambda: f64,
    /// Series coefficients `gamma_1, gamma_2, ...` of the local coupling.
    pub gamma: Vec<f64>,
}

impl Default for CouplingParams {
    fn default() -> Self {
        Self {
            j: 1.0,
            b: 1.0,
            lambda: 1.0,
            gamma: vec![1.0, 1.16],
        }
    }
}

impl CouplingParams {
    pub fn local_strength(&self, n_s: usize) -> Result<f64> {
        interaction_strength(n_s, &self.gamma)
    }
}

/// `lambda_{n_s} = sum_k gamma_k / n_s^k`, `k = 1, 2, ...`
pub fn interaction_strength(n_s: usize, gamma: &[f64]) -> Result<f64> {
    if gamma.is_empty() {
        return Err(Error::domain("empty gamma coefficient list"));
    }
    if n_s == 0 {
        return Err(Error::domain("n_s must be positive"));
    }
    let n = n_s as f64;
    Ok(gamma
        .iter()
        .enumerate()
        .map(|(k, g)| g / n.powi(k as i32 + 1))
        .sum())
}

fn xxx_terms(register: Register, edges: &[(usize, usize)], j: f64) -> Vec<Term> {
    edges
        .iter()
        .map(|&(a, b)| Term::XxxBond {
            a: Site { register, qubit: a },
            b: Site { register, qubit: b },
            coupling: j,
        })
        .collect()
}

/// `H_b = -J sum_<m,m'> (XX + YY + ZZ)` on a bath-only space.
pub fn build_xxx_bath(n_b: usize, j: f64, topology: &Topology) -> Result<OperatorSpec> {
    if n_b < 2 {
        return Err(Error::domain("an exchange bath needs at least two qubits"));
    }
    let edges = topology.edges(n_b);
    OperatorSpec::new(
        format!("xxx-bath(n_b={n_b}, J={j})"),
        Space::bath(n_b)?,
        xxx_terms(Register::Bath, &edges, j),
    )
}

/// One system spin coupled through `s^y sigma^y` to the middle of a periodic XXX ring:
/// `H = B s^z + H_b + lambda s^y sigma^y_{floor(n_b/2)}`.
pub fn build_toy_model(n_b: usize, j: f64, b: f64, lambda: f64) -> Result<OperatorSpec> {
    let parts = build_toy_model_parts(n_b, j, b, lambda)?;
    OperatorSpec::sum(
        format!("toy(n_b={n_b}, J={j}, B={b}, lambda={lambda})"),
        &[&parts.system, &parts.bath, &parts.interaction],
    )
}

/// The three pieces of the toy model, each on the composite space.
#[derive(Clone, Debug)]
pub struct ModelParts {
    pub system: OperatorSpec,
    pub bath: OperatorSpec,
    pub interaction: OperatorSpec,
}

pub fn build_toy_model_parts(n_b: usize, j: f64, b: f64, lambda: f64) -> Result<ModelParts> {
    if n_b < 3 {
        return Err(Error::domain("the toy model needs a ring of at least three bath qubits"));
    }
    let dims = SystemDims::new(1, n_b)?;
    let space = Space::Composite(dims);
    let system = OperatorSpec::new(
        "B s^z",
        space,
        vec![Term::OnsiteField {
            site: Site::system(0),
            axis: Axis::Z,
            strength: b,
        }],
    )?;
    let bath = OperatorSpec::new(
        "H_b",
        space,
        xxx_terms(Register::Bath, &Topology::ChainPeriodic.edges(n_b), j),
    )?;
    let interaction = OperatorSpec::new(
        "lambda s^y sigma^y",
        space,
        vec![Term::PairCoupling {
            system_qubit: 0,
            bath_qubit: n_b / 2,
            axis: Axis::Y,
            strength: lambda,
        }],
    )?;
    Ok(ModelParts {
        system,
        bath,
        interaction,
    })
}

/// `H_s = -|g_s><g_s|` on the system register and `H_b = -|g_b><g_b|` on the bath register.
pub fn build_projector_hamiltonians(
    g_s: usize,
    g_b: usize,
    dims: SystemDims,
) -> Result<(OperatorSpec, OperatorSpec)> {
    if g_s >= dims.system_dim() || g_b >= dims.bath_dim() {
        return Err(Error::domain(format!("targets ({g_s}, {g_b}) outside {dims:?}")));
    }
    let proj = |register, index| Term::Projector {
        register: Some(register),
        target: ProjectorTarget::Basis { index },
        weight: -1.0,
    };
    let hs = OperatorSpec::new(
        format!("-|{g_s}><{g_s}|_s"),
        Space::system(dims.n_s())?,
        vec![proj(Register::System, g_s)],
    )?;
    let hb = OperatorSpec::new(
        format!("-|{g_b}><{g_b}|_b"),
        Space::bath(dims.n_b())?,
        vec![proj(Register::Bath, g_b)],
    )?;
    Ok((hs, hb))
}

/// `H_I = -|xi><xi|` with `|xi>` uniform over the composite basis.
pub fn build_nonlocal_interaction(dims: SystemDims) -> Result<OperatorSpec> {
    OperatorSpec::new(
        "-|xi><xi|",
        Space::Composite(dims),
        vec![Term::Projector {
            register: None,
            target: ProjectorTarget::Uniform,
            weight: -1.0,
        }],
    )
}

/// Full non-local search Hamiltonian `H_s + H_b + H_I` on the composite space.
pub fn build_nonlocal_model(g_s: usize, g_b: usize, dims: SystemDims) -> Result<OperatorSpec> {
    let (hs, hb) = build_projector_hamiltonians(g_s, g_b, dims)?;
    let hi = build_nonlocal_interaction(dims)?;
    OperatorSpec::sum(
        format!("nonlocal(n_s={}, n_b={}, g_s={g_s})", dims.n_s(), dims.n_b()),
        &[&hs.embed(dims)?, &hb.embed(dims)?, &hi],
    )
}

/// `H_I = -lambda sum_m s^x_m sigma^x_m` on `n_s + n_s` qubits, with its strength.
pub fn build_local_interaction(n_s: usize, gamma: &[f64]) -> Result<(OperatorSpec, f64)> {
    let lambda = interaction_strength(n_s, gamma)?;
    let dims = SystemDims::new(n_s, n_s)?;
    let terms = (0..n_s)
        .map(|m| Term::PairCoupling {
            system_qubit: m,
            bath_qubit: m,
            axis: Axis::X,
            strength: -lambda,
        })
        .collect();
    let op = OperatorSpec::new(
        format!("-lambda sum s^x sigma^x (lambda={lambda})"),
        Space::Composite(dims),
        terms,
    )?;
    Ok((op, lambda))
}

/// Full local search Hamiltonian `H_s + H_b + H_I` with `n_b = n_s`.
pub fn build_local_model(
    g_s: usize,
    g_b: usize,
    n_s: usize,
    gamma: &[f64],
) -> Result<(OperatorSpec, f64)> {
    let dims = SystemDims::new(n_s, n_s)?;
    let (hs, hb) = build_projector_hamiltonians(g_s, g_b, dims)?;
    let (hi, lambda) = build_local_interaction(n_s, gamma)?;
    let op = OperatorSpec::sum(
        format!("local(n_s={n_s}, g_s={g_s}, lambda={lambda})"),
        &[&hs.embed(dims)?, &hb.embed(dims)?, &hi],
    )?;
    Ok((op, lambda))
}

/// Parity-block Hamiltonian `-|g_s><g_s| - |j_s><j_s| - lambda sum_m s^x_m` on the system register.
pub fn build_reduced_hamiltonian(
    n_s: usize,
    g_s: usize,
    j_s: usize,
    lambda: f64,
) -> Result<SubspaceProblem> {
    SubspaceProblem::new(n_s, g_s, j_s, lambda, 0)
}

/// Operator form of a set of unit-depth wells plus hypercube hopping on `n_s` qubits.
pub fn hypercube_wells_operator(n_s: usize, wells: &[usize], lambda: f64) -> Result<OperatorSpec> {
    let mut terms: Vec<Term> = wells
        .iter()
        .map(|&w| Term::Projector {
            register: Some(Register::System),
            target: ProjectorTarget::Basis { index: w },
            weight: -1.0,
        })
        .collect();
    terms.push(Term::HypercubeHop {
        register: Register::System,
        strength: lambda,
    });
    OperatorSpec::new(
        format!("hypercube(n_s={n_s}, wells={wells:?}, lambda={lambda})"),
        Space::system(n_s)?,
        terms,
    )
}

/// Shell-amplitude tridiagonal model of a single well on the hypercube.
pub fn build_radial_tridiagonal(n_s: usize, lambda: f64) -> Result<super::RadialOperator> {
    super::RadialOperator::new(n_s, lambda)
}

/// Exact four-state restriction of the non-local model.
pub fn build_effective_4x4(n_s: f64, n_b: f64) -> Result<nalgebra::Matrix4<f64>> {
    super::effective_4x4(n_s, n_b)
}
