use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::binomial;

/// Amplitudes of the multi-block ground-probability estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LocalEstimate {
    /// Weight of the block already sitting in the target well.
    pub a0: f64,
    /// `A_l` for `l = 1..=floor(n_s/2)`; missing entries default to 1.
    pub amplitudes: Vec<f64>,
}

impl Default for LocalEstimate {
    fn default() -> Self {
        Self {
            a0: 1.0,
            amplitudes: Vec::new(),
        }
    }
}

impl LocalEstimate {
    pub fn amplitude(&self, l: usize) -> f64 {
        self.amplitudes.get(l - 1).copied().unwrap_or(1.0)
    }

    /// `(A_0 + sum_{l=1}^{floor(n/2)} C(n, l) A_l sin^2(omega_l t)) / N_s`,
    /// with `omegas[l-1] = omega_l`.
    pub fn ground_probability(&self, n_s: usize, omegas: &[f64], t: f64) -> Result<f64> {
        let half = n_s / 2;
        if omegas.len() < half {
            return Err(Error::domain(format!(
                "need frequencies for l = 1..={half}, got {}",
                omegas.len()
            )));
        }
        let sum: f64 = (1..=half)
            .map(|l| binomial(n_s, l) * self.amplitude(l) * (omegas[l - 1] * t).sin().powi(2))
            .sum();
        Ok((self.a0 + sum) / 2f64.powi(n_s as i32))
    }
}

/// Time window `1/omega_{floor(n/2)} < t < 1/omega_{floor(n/2)+1}` over which the
/// estimate applies; `omegas[l-1] = omega_l` must extend to `floor(n/2)+1`.
pub fn plateau_window(n_s: usize, omegas: &[f64]) -> Result<(f64, f64)> {
    let half = n_s / 2;
    if half == 0 || omegas.len() < half + 1 {
        return Err(Error::domain("plateau window needs omega_{floor(n/2)} and omega_{floor(n/2)+1}"));
    }
    let (lo, hi) = (omegas[half - 1].recip(), omegas[half].recip());
    if !(lo < hi) {
        return Err(Error::Numerical(format!(
            "frequencies do not decrease with distance: window [{lo}, {hi}] is empty"
        )));
    }
    Ok((lo, hi))
}
