//! Parity-block analysis of the local search model.
//!
//! With `n_b = n_s` and a pairwise `s^x_m sigma^x_m` coupling, the label
//! `nu = i_s XOR j_b` is conserved. Each block is an `N_s`-dimensional
//! double-well problem on the hypercube of system labels.
//!
//! Oscillation frequencies follow the convention
//! `omega_{l_j} = (E_1 - E_0) / 2`, so a block started in its second well has
//! target probability close to `A sin^2(omega_{l_j} t)`.

mod gap;
mod problem;
mod scaling;
mod shells;

pub use gap::{subspace_gap, GapResult};
pub use problem::{
    block_ground_probabilities, decompose_initial_state, BlockState, HypercubeOperator,
    SubspaceProblem,
};
pub use scaling::{fit_log_slope, scaling_study, ScalingFailure, ScalingFit, ScalingPoint};
pub use shells::{shell_profile, ShellProfile, ShellStats};
