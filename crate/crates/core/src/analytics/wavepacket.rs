use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::binomial;

/// Self-consistent approximation of the single-well ground state on Hamming shells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationSolution {
    pub order: usize,
    pub n_s: usize,
    pub lambda: f64,
    pub h_max: usize,
    /// `ratios[h-1] = b_h = a_h / a_{h-1}` for `h = 1..=h_max`.
    pub ratios: Vec<f64>,
    /// Normalized shell amplitudes `a_0..=a_{h_max}`.
    pub amplitudes: Vec<f64>,
    pub energy: f64,
    /// `sum_h C(n_s, h) (prod_{i<=h} b_i)^2`, so that `a_0 = aleph^{-1/2}`.
    pub normalization: f64,
}

/// Iterates `b_h <- h lambda / (1 + n lambda b_1 - (n - h) lambda b_{h+1})`
/// from `b = 0`; order `m` is the `m`-th iterate and `E = -1 - n lambda b_1`.
pub fn wavepacket_iteration(n_s: usize, lambda: f64, order: usize, h_max: usize) -> Result<IterationSolution> {
    if !(1..=3).contains(&order) {
        return Err(Error::domain(format!("order must be 1, 2 or 3, got {order}")));
    }
    if n_s == 0 || h_max == 0 || h_max > n_s {
        return Err(Error::domain(format!("need 1 <= h_max <= n_s, got h_max = {h_max}, n_s = {n_s}")));
    }
    if !(lambda >= 0.0) || lambda * n_s as f64 > 1.2 {
        return Err(Error::domain(format!(
            "lambda n_s = {} is outside the localized regime [0, 1.2]",
            lambda * n_s as f64
        )));
    }
    let n = n_s as f64;
    // b[h] for h = 0..=h_max + 1; b[0] unused, b[h_max + 1] = 0 closes the chain.
    let mut b = vec![0.0; h_max + 2];
    for _ in 0..order {
        let mut next = vec![0.0; h_max + 2];
        for h in 1..=h_max {
            let den = 1.0 + n * lambda * b[1] - (n - h as f64) * lambda * b[h + 1];
            if den.abs() < 1e-14 {
                return Err(Error::Numerical(format!(
                    "vanishing denominator at h = {h} in the order-{order} iteration"
                )));
            }
            next[h] = h as f64 * lambda / den;
        }
        b = next;
    }
    let mut prod = 1.0;
    let mut unnorm = vec![1.0];
    for h in 1..=h_max {
        prod *= b[h];
        unnorm.push(prod);
    }
    let normalization: f64 = unnorm
        .iter()
        .enumerate()
        .map(|(h, p)| binomial(n_s, h) * p * p)
        .sum();
    let a0 = normalization.sqrt().recip();
    Ok(IterationSolution {
        order,
        n_s,
        lambda,
        h_max,
        ratios: b[1..=h_max].to_vec(),
        amplitudes: unnorm.iter().map(|p| p * a0).collect(),
        energy: -1.0 - n * lambda * b[1],
        normalization,
    })
}

/// Stirling form of the first-order amplitude at `lambda = 1/n_s`:
/// `a_h ~ sqrt(2 pi h) (h / (e n_s))^h / sqrt(aleph)`.
pub fn first_order_stirling(h: usize, n_s: usize, aleph: f64) -> f64 {
    if h == 0 {
        return aleph.sqrt().recip();
    }
    let h = h as f64;
    (2.0 * std::f64::consts::PI * h).sqrt() * (h / (std::f64::consts::E * n_s as f64)).powf(h)
        / aleph.sqrt()
}
