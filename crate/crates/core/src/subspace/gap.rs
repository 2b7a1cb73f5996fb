use serde::{Deserialize, Serialize};

use super::SubspaceProblem;
use crate::error::{Error, Result};
use crate::linalg::lanczos::{lowest_eigenpairs, LanczosOptions};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapResult {
    pub n_s: usize,
    pub l_j: u32,
    pub lambda: f64,
    pub e0: f64,
    pub e1: f64,
    /// `(e1 - e0) / 2`
    pub omega: f64,
    pub residuals: Vec<f64>,
    pub matvecs: usize,
    /// Eigenvectors of `e0` and `e1` over the `2^n_s` system labels.
    #[serde(skip)]
    pub vectors: Vec<Vec<f64>>,
}

/// Lowest two eigenpairs of a block Hamiltonian.
pub fn subspace_gap(problem: &SubspaceProblem, opts: &LanczosOptions) -> Result<GapResult> {
    if problem.l_j == 0 {
        return Err(Error::domain(
            "the wells coincide (l_j = 0); there is no tunnelling gap",
        ));
    }
    let op = problem.hypercube();
    let pairs = lowest_eigenpairs(&op, 2, opts)?;
    let (e0, e1) = (pairs.values[0], pairs.values[1]);
    Ok(GapResult {
        n_s: problem.n_s,
        l_j: problem.l_j,
        lambda: problem.lambda,
        e0,
        e1,
        omega: (e1 - e0) / 2.0,
        residuals: pairs.residuals,
        matvecs: pairs.matvecs,
        vectors: pairs.vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::symmetric_eigen;
    use nalgebra::DMatrix;

    fn dense_hypercube(n_s: usize, wells: &[usize], lambda: f64) -> DMatrix<f64> {
        let n = 1 << n_s;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for b in 0..n_s {
                m[(i, i ^ (1 << b))] = -lambda;
            }
        }
        for &w in wells {
            m[(w, w)] -= 1.0;
        }
        m
    }

    #[test]
    fn matches_dense_eigensolver() {
        let p = SubspaceProblem::new(7, 0b0000011, 0b1110001, 1.0 / 7.0 + 1.16 / 49.0, 0).unwrap();
        let g = subspace_gap(&p, &LanczosOptions::default()).unwrap();
        let (vals, _) = symmetric_eigen(&dense_hypercube(7, &[p.g_s, p.j_s], p.lambda));
        assert!((g.e0 - vals[0]).abs() < 1e-10);
        assert!((g.e1 - vals[1]).abs() < 1e-10);
        assert!(g.omega > 0.0);
    }

    #[test]
    fn zero_hop_is_degenerate() {
        let p = SubspaceProblem::new(4, 0, 15, 0.0, 0).unwrap();
        let g = subspace_gap(&p, &LanczosOptions::default()).unwrap();
        assert!((g.e0 + 1.0).abs() < 1e-12 && (g.e1 + 1.0).abs() < 1e-12);
        assert!(g.omega.abs() < 1e-12);
    }

    #[test]
    fn coincident_wells_rejected() {
        let p = SubspaceProblem::new(4, 5, 5, 0.1, 0).unwrap();
        assert!(matches!(
            subspace_gap(&p, &LanczosOptions::default()),
            Err(Error::Domain(_))
        ));
    }
}
