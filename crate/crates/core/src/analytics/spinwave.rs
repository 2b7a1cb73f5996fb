use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{Space, StateVector, C64};

/// `|Delta E_k| t` below this uses the resonant branch `b_k = -i lambda_k t`.
pub const RESONANT_THRESHOLD: f64 = 1e-6;

/// Single-magnon couplings and detunings of a two-level system attached to a bath.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinWaveSetup {
    /// Mode labels (wave vectors).
    pub modes: Vec<f64>,
    pub couplings: Vec<C64>,
    pub detunings: Vec<f64>,
}

impl SpinWaveSetup {
    pub fn new(modes: Vec<f64>, couplings: Vec<C64>, detunings: Vec<f64>) -> Result<Self> {
        if modes.len() != couplings.len() || modes.len() != detunings.len() {
            return Err(Error::domain("mode, coupling and detuning arrays differ in length"));
        }
        Ok(Self {
            modes,
            couplings,
            detunings,
        })
    }

    /// Toy model: system `B s^z` coupled by `lambda s^y sigma^y` to site
    /// `floor(n_b/2)` of a periodic ring `-J sum sigma.sigma` whose spins all point down.
    ///
    /// Modes are `k = 2 pi q / n_b`, `Delta E_k = -2B + 4J(1 - cos k)` and
    /// `lambda_k = lambda e^{-i k x_0} / sqrt(n_b)`.
    pub fn toy_model(n_b: usize, j: f64, b: f64, lambda: f64) -> Result<Self> {
        if n_b < 3 {
            return Err(Error::domain("ring needs at least three sites"));
        }
        let x0 = (n_b / 2) as f64;
        let norm = (n_b as f64).sqrt();
        let modes: Vec<f64> = (0..n_b)
            .map(|q| 2.0 * std::f64::consts::PI * q as f64 / n_b as f64)
            .collect();
        let couplings = modes
            .iter()
            .map(|k| C64::new(0.0, -k * x0).exp() * (lambda / norm))
            .collect();
        let detunings = modes
            .iter()
            .map(|k| -2.0 * b + 4.0 * j * (1.0 - k.cos()))
            .collect();
        Self::new(modes, couplings, detunings)
    }

    /// Modes whose detuning is exactly zero (always treated resonantly).
    pub fn resonant_modes(&self) -> Vec<usize> {
        (0..self.detunings.len())
            .filter(|&i| self.detunings[i] == 0.0)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinWaveAmplitudes {
    pub b_g: f64,
    pub b_k: Vec<C64>,
}

/// Early-time decoupled amplitudes.
pub fn spinwave_perturbative(setup: &SpinWaveSetup, t: f64) -> Result<SpinWaveAmplitudes> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time must be non-negative, got {t}")));
    }
    let mut b_g = 1.0;
    let b_k = setup
        .couplings
        .iter()
        .zip(&setup.detunings)
        .map(|(&lam, &de)| {
            if de.abs() * t < RESONANT_THRESHOLD {
                b_g -= 0.5 * lam.norm_sqr() * t * t;
                lam * C64::new(0.0, -t)
            } else {
                b_g -= 2.0 * lam.norm_sqr() / (de * de) * (0.5 * de * t).sin().powi(2);
                lam / de * (C64::new(0.0, -de * t).exp() - 1.0)
            }
        })
        .collect();
    Ok(SpinWaveAmplitudes { b_g, b_k })
}

/// `<s, k|psi>` for the one-magnon momentum states `|k> = n_b^{-1/2} sum_x e^{ikx} |x>`
/// above the all-down bath, with the system qubit in basis state `s`.
pub fn single_magnon_amplitudes(state: &StateVector, system_label: usize, modes: &[f64]) -> Result<Vec<C64>> {
    let dims = match state.space() {
        Space::Composite(d) => d,
        other => return Err(Error::domain(format!("expected a composite state, got {other:?}"))),
    };
    let n_b = dims.n_b();
    let norm = (n_b as f64).sqrt();
    let site_amps: Vec<C64> = (0..n_b)
        .map(|x| Ok(state.amplitude(dims.encode(system_label, 1 << x)?)))
        .collect::<Result<_>>()?;
    Ok(modes
        .iter()
        .map(|k| {
            site_amps
                .iter()
                .enumerate()
                .map(|(x, a)| C64::new(0.0, -k * x as f64).exp() * a)
                .sum::<C64>()
                / norm
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_time() {
        let s = SpinWaveSetup::toy_model(13, 1.0, 1.0, 0.2).unwrap();
        let a = spinwave_perturbative(&s, 0.0).unwrap();
        assert_eq!(a.b_g, 1.0);
        assert!(a.b_k.iter().all(|b| b.norm() == 0.0));
    }

    #[test]
    fn resonant_branch_is_continuous() {
        let lam = C64::new(0.3, -0.1);
        let s = SpinWaveSetup::new(vec![0.0, 1.0], vec![lam, lam], vec![0.0, 1e-7]).unwrap();
        let a = spinwave_perturbative(&s, 2.0).unwrap();
        assert_eq!(a.b_k[0], lam * C64::new(0.0, -2.0));
        assert!((a.b_k[1] - a.b_k[0]).norm() < 1e-6);
    }

    #[test]
    fn couplings_have_equal_weight() {
        let s = SpinWaveSetup::toy_model(9, 1.0, 1.0, 0.6).unwrap();
        let total: f64 = s.couplings.iter().map(|c| c.norm_sqr()).sum();
        assert!((total - 0.36).abs() < 1e-14);
        assert!((s.detunings[0] + 2.0).abs() < 1e-15);
    }
}
