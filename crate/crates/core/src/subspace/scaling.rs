use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{subspace_gap, SubspaceProblem};
use crate::error::{Error, Result};
use crate::hamiltonian::interaction_strength;
use crate::linalg::lanczos::LanczosOptions;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n_s: usize,
    pub l_j: u32,
    pub lambda: f64,
    pub omega: f64,
    pub matvecs: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingFit {
    pub points: Vec<ScalingPoint>,
    /// Least-squares slope of `log2 omega` against `n_s`.
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in `log2` units.
    pub rms_residual: f64,
    /// Slopes of the `N_s^{-1/2}` and `N_s^{-1}` reference lines.
    pub reference_slopes: [f64; 2],
}

/// A scaling run with a failed size; `completed` keeps every size that succeeded.
#[derive(Debug, thiserror::Error)]
#[error("scaling study stopped at n_s = {n_s}: {source}")]
pub struct ScalingFailure {
    pub n_s: usize,
    pub completed: Vec<ScalingPoint>,
    #[source]
    pub source: Error,
}

/// Least-squares fit of `log2 y = slope * x + intercept`.
pub fn fit_log_slope(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::domain("a slope fit needs at least two points"));
    }
    if ys.iter().any(|&y| !(y > 0.0)) {
        return Err(Error::domain("log fit needs positive values"));
    }
    let ly: Vec<f64> = ys.iter().map(|y| y.log2()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("slope fit needs distinct abscissae"));
    }
    let sxy: f64 = xs.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    Ok((slope, intercept, (rss / n).sqrt()))
}

/// Gap frequency of the `l_j = floor(n_s/2)` block for each `n_s` in `sizes`,
/// with `lambda = sum_k gamma_k / n_s^k`. Wells sit at label 0 and the label
/// with its lowest `l_j` bits set.
pub fn scaling_study(
    sizes: &[usize],
    gamma: &[f64],
    opts: &LanczosOptions,
) -> std::result::Result<ScalingFit, ScalingFailure> {
    let fail = |n_s, completed: Vec<ScalingPoint>, source| ScalingFailure {
        n_s,
        completed,
        source,
    };
    if sizes.len() < 4 {
        return Err(fail(
            sizes.first().copied().unwrap_or(0),
            Vec::new(),
            Error::domain("a scaling fit needs at least four register sizes"),
        ));
    }
    let results: Vec<(usize, Result<ScalingPoint>)> = sizes
        .par_iter()
        .map(|&n_s| {
            let point = (|| {
                let lambda = interaction_strength(n_s, gamma)?;
                let l_j = n_s / 2;
                let problem = SubspaceProblem::new(n_s, 0, (1usize << l_j) - 1, lambda, 0)?;
                let gap = subspace_gap(&problem, opts)?;
                Ok(ScalingPoint {
                    n_s,
                    l_j: gap.l_j,
                    lambda,
                    omega: gap.omega,
                    matvecs: gap.matvecs,
                })
            })();
            (n_s, point)
        })
        .collect();
    let mut points = Vec::with_capacity(results.len());
    let mut first_error = None;
    for (n_s, r) in results {
        match r {
            Ok(p) => points.push(p),
            Err(e) if first_error.is_none() => first_error = Some((n_s, e)),
            Err(_) => {}
        }
    }
    if let Some((n_s, e)) = first_error {
        return Err(fail(n_s, points, e));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.n_s as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.omega).collect();
    let (slope, intercept, rms_residual) = match fit_log_slope(&xs, &ys) {
        Ok(f) => f,
        Err(e) => {
            let n_s = sizes.last().copied().unwrap_or(0);
            return Err(fail(n_s, points, e));
        }
    };
    Ok(ScalingFit {
        points,
        slope,
        intercept,
        rms_residual,
        reference_slopes: [-0.5, -1.0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let xs = [2.0, 3.0, 4.0, 5.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * 2f64.powf(-0.75 * x)).collect();
        let (s, b, r) = fit_log_slope(&xs, &ys).unwrap();
        assert!((s + 0.75).abs() < 1e-12);
        assert!((b - 3f64.log2()).abs() < 1e-12);
        assert!(r < 1e-12);
    }

    #[test]
    fn failure_keeps_partial_points() {
        let opts = LanczosOptions::default();
        // n_s = 1 gives l_j = 0, which has no gap.
        let err = scaling_study(&[4, 1, 6, 5], &[1.0], &opts).unwrap_err();
        assert_eq!(err.n_s, 1);
        let done: Vec<usize> = err.completed.iter().map(|p| p.n_s).collect();
        assert_eq!(done, vec![4, 6, 5]);
    }
}
