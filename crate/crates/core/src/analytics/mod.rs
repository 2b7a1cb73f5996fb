//! Closed-form and reduced-model results, used both as predictions and as
//! references for the full simulations.

mod grover;
mod local;
mod nonlocal;
mod spinwave;
mod wavepacket;

pub use grover::{grover_equivalence, grover_hamiltonian, GroverReport, GroverStep};
pub use local::{plateau_window, LocalEstimate};
pub use nonlocal::{
    effective_eigensystem, effective_frequency, evolve_effective, exact_effective_evolution,
    limit_effective_evolution, mean_search_time, nonlocal_pg, nonlocal_wavefunction,
    EffectiveBasis, EffectiveEigensystem, EffectiveForm,
};
pub use spinwave::{
    single_magnon_amplitudes, spinwave_perturbative, SpinWaveAmplitudes, SpinWaveSetup,
    RESONANT_THRESHOLD,
};
pub use wavepacket::{first_order_stirling, wavepacket_iteration, IterationSolution};
