use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::TimeSeries;
use crate::error::{Error, Result};
use crate::spin::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    None,
    Hann,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectrumOptions {
    pub window: Window,
    /// Transform length is `zero_pad * len`, rounded up to a power of two.
    pub zero_pad: usize,
    /// Minimum peak prominence relative to the largest magnitude.
    pub min_prominence: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            window: Window::Hann,
            zero_pad: 4,
            min_prominence: 0.02,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// Angular frequency, refined by a parabola through the three top bins.
    pub frequency: f64,
    pub magnitude: f64,
    /// Full width at half maximum in angular frequency.
    pub width: f64,
    pub prominence: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Angular frequencies `2 pi k / (N dt)`, `k = 0..=N/2`.
    pub frequencies: Vec<f64>,
    pub magnitudes: Vec<f64>,
    /// Sorted by decreasing magnitude.
    pub peaks: Vec<Peak>,
    /// Bin spacing in angular frequency.
    pub resolution: f64,
}

pub fn fourier_spectrum(series: &TimeSeries, opts: &SpectrumOptions) -> Result<SpectrumResult> {
    let n = series.len();
    if n < 16 {
        return Err(Error::domain(format!("spectrum needs at least 16 samples, got {n}")));
    }
    if opts.zero_pad == 0 {
        return Err(Error::domain("zero-pad factor must be at least 1"));
    }
    let mean = series.values.iter().sum::<f64>() / n as f64;
    let len = (n * opts.zero_pad).next_power_of_two();
    let mut buf = vec![C64::new(0.0, 0.0); len];
    for (k, v) in series.values.iter().enumerate() {
        let w = match opts.window {
            Window::None => 1.0,
            Window::Hann => {
                0.5 - 0.5 * (2.0 * std::f64::consts::PI * k as f64 / (n - 1) as f64).cos()
            }
        };
        buf[k] = C64::new((v - mean) * w, 0.0);
    }
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let half = len / 2;
    let resolution = 2.0 * std::f64::consts::PI / (len as f64 * series.dt);
    let frequencies: Vec<f64> = (0..=half).map(|k| k as f64 * resolution).collect();
    let magnitudes: Vec<f64> = buf[..=half].iter().map(|c| c.norm()).collect();
    let peaks = find_peaks(&magnitudes, resolution, opts.min_prominence);
    Ok(SpectrumResult {
        frequencies,
        magnitudes,
        peaks,
        resolution,
    })
}

fn find_peaks(mag: &[f64], resolution: f64, min_prominence: f64) -> Vec<Peak> {
    let top = mag.iter().copied().fold(0.0, f64::max);
    if top <= 1e-12 * mag.len() as f64 {
        return Vec::new();
    }
    let mut peaks = Vec::new();
    for i in 1..mag.len() - 1 {
        if !(mag[i] > mag[i - 1] && mag[i] >= mag[i + 1]) {
            continue;
        }
        let (mut left_min, mut j) = (mag[i], i);
        while j > 0 && mag[j - 1] <= mag[i] {
            j -= 1;
            left_min = left_min.min(mag[j]);
        }
        let (mut right_min, mut j) = (mag[i], i);
        while j + 1 < mag.len() && mag[j + 1] <= mag[i] {
            j += 1;
            right_min = right_min.min(mag[j]);
        }
        let prominence = mag[i] - left_min.max(right_min);
        if prominence < min_prominence * top {
            continue;
        }
        let (a, b, c) = (mag[i - 1], mag[i], mag[i + 1]);
        let denom = a - 2.0 * b + c;
        let shift = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
        peaks.push(Peak {
            frequency: (i as f64 + shift) * resolution,
            magnitude: b - 0.25 * (a - c) * shift,
            width: half_width(mag, i) * resolution,
            prominence,
        });
    }
    peaks.sort_by(|p, q| q.magnitude.total_cmp(&p.magnitude));
    peaks
}

/// FWHM in bins, linearly interpolated.
fn half_width(mag: &[f64], i: usize) -> f64 {
    let half = 0.5 * mag[i];
    let mut l = i as f64;
    for j in (0..i).rev() {
        if mag[j] < half {
            l = j as f64 + (half - mag[j]) / (mag[j + 1] - mag[j]);
            break;
        }
        l = j as f64;
    }
    let mut r = i as f64;
    for j in i + 1..mag.len() {
        if mag[j] < half {
            r = j as f64 - (half - mag[j]) / (mag[j - 1] - mag[j]);
            break;
        }
        r = j as f64;
    }
    r - l
}
