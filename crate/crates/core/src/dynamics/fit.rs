use serde::{Deserialize, Serialize};

use super::TimeSeries;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinSquaredFit {
    pub amplitude: f64,
    pub omega: f64,
    pub rms_residual: f64,
}

fn residual(series: &TimeSeries, omega: f64) -> (f64, f64) {
    let (mut sy, mut ss) = (0.0, 0.0);
    for (k, y) in series.values.iter().enumerate() {
        let s = (omega * series.time(k)).sin().powi(2);
        sy += s * y;
        ss += s * s;
    }
    let a = if ss > 0.0 { sy / ss } else { 0.0 };
    let rss: f64 = series
        .values
        .iter()
        .enumerate()
        .map(|(k, y)| (y - a * (omega * series.time(k)).sin().powi(2)).powi(2))
        .sum();
    (a, rss)
}

/// Least-squares fit of `A sin^2(omega t)` with `omega` searched in `[lo, hi]`.
pub fn fit_sin_squared(series: &TimeSeries, lo: f64, hi: f64) -> Result<SinSquaredFit> {
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::domain(format!("invalid frequency bracket [{lo}, {hi}]")));
    }
    let span = series.time(series.len() - 1) - series.t0;
    // Grid fine enough that neighbouring trial phases differ by < 0.1 rad at the end.
    let steps = (((hi - lo) * span / 0.1).ceil() as usize).clamp(64, 200_000);
    let h = (hi - lo) / steps as f64;
    let mut best = (lo, f64::INFINITY);
    for i in 0..=steps {
        let w = lo + i as f64 * h;
        let r = residual(series, w).1;
        if r < best.1 {
            best = (w, r);
        }
    }
    let (mut a, mut b) = ((best.0 - h).max(lo), (best.0 + h).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if residual(series, c).1 < residual(series, d).1 {
            b = d;
        } else {
            a = c;
        }
    }
    let omega = 0.5 * (a + b);
    let (amplitude, rss) = residual(series, omega);
    Ok(SinSquaredFit {
        amplitude,
        omega,
        rms_residual: (rss / series.len() as f64).sqrt(),
    })
}
