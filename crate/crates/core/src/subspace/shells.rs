use serde::{Deserialize, Serialize};

use super::{GapResult, SubspaceProblem};
use crate::error::{Error, Result};

/// Relative spread above which a shell is flagged as not single-valued.
pub const SPREAD_FLAG: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellStats {
    pub h: usize,
    pub count: usize,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    /// `(max - min) / |median|`, zero for single-state shells.
    pub relative_spread: f64,
    pub flagged: bool,
}

/// Amplitudes of the well-localized state grouped by Hamming distance from `g_s`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShellProfile {
    pub n_s: usize,
    pub g_s: usize,
    pub l_j: u32,
    /// `(h, m, amplitude)`, `m = 1..=C(n_s, h)` in increasing label order.
    pub rows: Vec<(usize, usize, f64)>,
    pub shells: Vec<ShellStats>,
    /// `|<g_s|chi>|^2`
    pub a0_sq: f64,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Builds `chi = (psi_0 +/- psi_1)/sqrt 2`, choosing the combination with the
/// larger weight on `g_s` and the sign that makes `chi(g_s)` positive.
pub fn shell_profile(problem: &SubspaceProblem, gap: &GapResult) -> Result<ShellProfile> {
    if gap.vectors.len() < 2 {
        return Err(Error::domain("gap result carries no eigenvectors"));
    }
    let n = problem.dimension();
    let (v0, v1) = (&gap.vectors[0], &gap.vectors[1]);
    if v0.len() != n || v1.len() != n {
        return Err(Error::domain("eigenvector length does not match the problem"));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let g = problem.g_s;
    let plus = r * (v0[g] + v1[g]);
    let minus = r * (v0[g] - v1[g]);
    let (s1, lead) = if plus.abs() >= minus.abs() {
        (1.0, plus)
    } else {
        (-1.0, minus)
    };
    let overall = if lead < 0.0 { -1.0 } else { 1.0 };
    let chi: Vec<f64> = v0
        .iter()
        .zip(v1)
        .map(|(a, b)| overall * r * (a + s1 * b))
        .collect();

    let mut by_shell: Vec<Vec<f64>> = vec![Vec::new(); problem.n_s + 1];
    for (i, &c) in chi.iter().enumerate() {
        by_shell[(i ^ g).count_ones() as usize].push(c);
    }
    let mut rows = Vec::with_capacity(n);
    let mut shells = Vec::with_capacity(problem.n_s + 1);
    for (h, amps) in by_shell.iter().enumerate() {
        for (k, &a) in amps.iter().enumerate() {
            rows.push((h, k + 1, a));
        }
        let mut sorted = amps.clone();
        sorted.sort_by(f64::total_cmp);
        let med = median(&sorted);
        let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
        let spread = if sorted.len() == 1 {
            0.0
        } else if med == 0.0 {
            f64::INFINITY
        } else {
            (hi - lo) / med.abs()
        };
        shells.push(ShellStats {
            h,
            count: amps.len(),
            median: med,
            min: lo,
            max: hi,
            relative_spread: spread,
            flagged: spread > SPREAD_FLAG,
        });
    }
    Ok(ShellProfile {
        n_s: problem.n_s,
        g_s: g,
        l_j: problem.l_j,
        rows,
        a0_sq: chi[g] * chi[g],
        shells,
    })
}

impl ShellProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h,m,amplitude\n");
        for (h, m, a) in &self.rows {
            out.push_str(&format!("{h},{m},{a:.16e}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::lanczos::LanczosOptions;
    use crate::spin::binomial;
    use crate::subspace::subspace_gap;

    #[test]
    fn rows_cover_every_label_once() {
        let p = SubspaceProblem::new(6, 0b101010, 0b010110, 0.2, 0).unwrap();
        let gap = subspace_gap(&p, &LanczosOptions::default()).unwrap();
        let prof = shell_profile(&p, &gap).unwrap();
        assert_eq!(prof.rows.len(), 64);
        for s in &prof.shells {
            assert_eq!(s.count as f64, binomial(6, s.h));
        }
        let norm: f64 = prof.rows.iter().map(|r| r.2 * r.2).sum();
        assert!((norm - 1.0).abs() < 1e-10);
        assert!(prof.rows[0].2 > 0.0);
        assert!(prof.a0_sq > 0.5);
    }
}
