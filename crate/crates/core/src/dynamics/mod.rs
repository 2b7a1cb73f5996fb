//! Time evolution, observables and post-processing of sampled observables.

mod fit;
mod observables;
mod propagator;
mod series;
mod spectrum;

pub use fit::{fit_sin_squared, SinSquaredFit};
pub use observables::{ground_state_probability, local_magnetization, magnetization_profile};
pub use propagator::{
    evolve, evolve_with, PropagationStats, Propagator, PropagatorConfig, PropagatorMethod,
};
pub use series::TimeSeries;
pub use spectrum::{fourier_spectrum, Peak, SpectrumOptions, SpectrumResult, Window};

/// Uniform grid `0, dt, 2 dt, ..., t_max` (inclusive up to rounding).
pub fn time_grid(t_max: f64, dt: f64) -> Vec<f64> {
    if !(dt > 0.0) || !(t_max >= 0.0) {
        return vec![0.0];
    }
    let n = (t_max / dt + 1e-9).floor() as usize;
    (0..=n).map(|k| k as f64 * dt).collect()
}
