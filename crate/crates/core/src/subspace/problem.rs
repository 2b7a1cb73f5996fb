use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve_with, PropagatorConfig};
use crate::error::{Error, Result};
use crate::hamiltonian::{hypercube_wells_operator, OperatorSpec};
use crate::linalg::lanczos::SymmetricOperator;
use crate::spin::{hamming_distance, Space, StateVector, C64};

/// One parity block of the local model: wells at `g_s` and `j_s`, hop `lambda`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceProblem {
    pub n_s: usize,
    pub g_s: usize,
    pub j_s: usize,
    /// Hamming distance between the wells.
    pub l_j: u32,
    pub lambda: f64,
    /// Bath ground label used to name the block.
    pub g_b: usize,
    /// Block label `nu = j_s XOR g_b`.
    pub nu: usize,
}

impl SubspaceProblem {
    pub fn new(n_s: usize, g_s: usize, j_s: usize, lambda: f64, g_b: usize) -> Result<Self> {
        Space::system(n_s)?;
        let n = 1usize << n_s;
        if g_s >= n || j_s >= n || g_b >= n {
            return Err(Error::domain(format!(
                "labels (g_s={g_s}, j_s={j_s}, g_b={g_b}) outside a {n_s}-qubit register"
            )));
        }
        if !lambda.is_finite() {
            return Err(Error::domain("hop strength must be finite"));
        }
        Ok(Self {
            n_s,
            g_s,
            j_s,
            l_j: hamming_distance(g_s, j_s, n_s)?,
            lambda,
            g_b,
            nu: j_s ^ g_b,
        })
    }

    pub fn distance(&self) -> u32 {
        self.l_j
    }

    pub fn dimension(&self) -> usize {
        1 << self.n_s
    }

    /// Reduced Hamiltonian as an [`OperatorSpec`] on the system register.
    pub fn operator(&self) -> Result<OperatorSpec> {
        hypercube_wells_operator(self.n_s, &[self.g_s, self.j_s], self.lambda)
    }

    /// Real matrix-free form used by the eigensolver.
    pub fn hypercube(&self) -> HypercubeOperator {
        HypercubeOperator {
            n_s: self.n_s,
            wells: vec![self.g_s, self.j_s],
            lambda: self.lambda,
        }
    }

    /// Composite label of reduced basis state `i`: `|i, i XOR nu>`.
    pub fn composite_index(&self, i: usize) -> usize {
        (i << self.n_s) | (i ^ self.nu)
    }
}

/// `-sum_w |w><w| - lambda sum_m s^x_m` applied without storing a matrix:
/// every vertex couples to its `n_s` single-bit-flip neighbours.
#[derive(Clone, Debug, PartialEq)]
pub struct HypercubeOperator {
    pub n_s: usize,
    pub wells: Vec<usize>,
    pub lambda: f64,
}

const CHUNK: usize = 4096;

impl SymmetricOperator for HypercubeOperator {
    fn dim(&self) -> usize {
        1 << self.n_s
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n_s = self.n_s;
        let lambda = self.lambda;
        let fill = |base: usize, out: &mut [f64]| {
            for (o, yi) in out.iter_mut().enumerate() {
                let i = base + o;
                let mut acc = 0.0;
                for m in 0..n_s {
                    acc += x[i ^ (1 << m)];
                }
                *yi = -lambda * acc;
            }
        };
        if y.len() >= 2 * CHUNK {
            y.par_chunks_mut(CHUNK)
                .enumerate()
                .for_each(|(c, out)| fill(c * CHUNK, out));
        } else {
            fill(0, y);
        }
        for &w in &self.wells {
            y[w] -= x[w];
        }
    }
}

/// Reduced initial state of one block.
#[derive(Clone, Debug)]
pub struct BlockState {
    pub nu: usize,
    /// The system label carried by the block's single occupied state `|j_s, g_b>`.
    pub j_s: usize,
    pub amplitude: C64,
    /// Normalized reduced state `|j_s>` on the system register.
    pub reduced: StateVector,
}

/// Splits `N_s^{-1/2} sum_{i_s} |i_s, g_b>` into its `N_s` parity blocks.
pub fn decompose_initial_state(state: &StateVector, g_b: usize) -> Result<Vec<BlockState>> {
    let dims = match state.space() {
        Space::Composite(d) => d,
        other => {
            return Err(Error::Unsupported(format!(
                "expected a composite state, got {other:?}"
            )))
        }
    };
    if dims.n_s() != dims.n_b() {
        return Err(Error::domain("parity blocks need n_b = n_s"));
    }
    let expected = StateVector::uniform_system_with_bath(dims, g_b)?;
    if state.max_abs_diff(&expected)? > 1e-12 {
        return Err(Error::Unsupported(
            "only the uniform system superposition with the bath in g_b is decomposed here; \
             evolve other states with the full propagator"
                .into(),
        ));
    }
    let system = Space::system(dims.n_s())?;
    (0..dims.system_dim())
        .map(|j_s| {
            Ok(BlockState {
                nu: j_s ^ g_b,
                j_s,
                amplitude: state.amplitude(dims.encode(j_s, g_b)?),
                reduced: StateVector::basis(system, j_s)?,
            })
        })
        .collect()
}

/// Target probability of every block over `times`:
/// `out[j_s][k] = |<g_s| exp(-i H_{j_s} t_k) |j_s>|^2`.
pub fn block_ground_probabilities(
    n_s: usize,
    g_s: usize,
    lambda: f64,
    blocks: &[usize],
    times: &[f64],
    config: &PropagatorConfig,
) -> Result<Vec<Vec<f64>>> {
    blocks
        .par_iter()
        .map(|&j_s| {
            let problem = SubspaceProblem::new(n_s, g_s, j_s, lambda, 0)?;
            let op = problem.operator()?;
            let psi0 = StateVector::basis(op.space(), j_s)?;
            let mut out = Vec::with_capacity(times.len());
            evolve_with(&op, &psi0, times, config, |_, s| {
                out.push(s.amplitude(g_s).norm_sqr());
                Ok(())
            })?;
            Ok(out)
        })
        .collect()
}
