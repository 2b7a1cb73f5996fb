//! Thick-restart Lanczos for the lowest eigenpairs of a real symmetric operator.
//!
//! Every new basis vector is orthogonalized twice against the whole basis, and
//! the projected matrix is accumulated from the Gram-Schmidt coefficients, so
//! the Rayleigh-Ritz step stays valid after restarts. At a restart the lowest
//! `keep` Ritz vectors and the last residual direction seed the next cycle.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dense::symmetric_eigen;
use super::{axpy_real, combine_real, dot_real, norm_real, scale_real};
use crate::error::{Error, Result};

pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;
    /// `y = A x`
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LanczosOptions {
    /// Absolute residual bound `||A y - theta y||` for unit Ritz vectors.
    pub tolerance: f64,
    /// Cap on operator applications.
    pub max_matvecs: usize,
    /// Maximum basis size per cycle.
    pub basis_size: usize,
    /// Ritz vectors retained at a restart.
    pub keep: usize,
    /// Seed of the random start vector.
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_matvecs: 5000,
            basis_size: 40,
            keep: 16,
            seed: 0x1ce_b0c5,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub matvecs: usize,
    pub restarts: usize,
}

/// Orthogonalizes `w` against `basis` twice; returns the accumulated coefficients.
fn orthogonalize(basis: &[Vec<f64>], w: &mut [f64]) -> Vec<f64> {
    let mut total = vec![0.0; basis.len()];
    for _ in 0..2 {
        let coeffs: Vec<f64> = basis.par_iter().map(|v| dot_real(v, w)).collect();
        let mut proj = vec![0.0; w.len()];
        combine_real(basis, &coeffs, &mut proj);
        axpy_real(-1.0, &proj, w);
        total.iter_mut().zip(&coeffs).for_each(|(t, c)| *t += c);
    }
    total
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng, basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    for _ in 0..4 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        orthogonalize(basis, &mut v);
        let nv = norm_real(&v);
        if nv > 1e-8 {
            scale_real(1.0 / nv, &mut v);
            return Some(v);
        }
    }
    None
}

/// Computes the `nev` algebraically smallest eigenpairs of `op`.
pub fn lowest_eigenpairs(
    op: &dyn SymmetricOperator,
    nev: usize,
    opts: &LanczosOptions,
) -> Result<EigenPairs> {
    let n = op.dim();
    if nev == 0 || nev > n {
        return Err(Error::domain(format!("cannot compute {nev} eigenpairs of a {n}-dimensional operator")));
    }
    if !(opts.tolerance > 0.0) {
        return Err(Error::domain("eigensolver tolerance must be positive"));
    }
    let m = opts.basis_size.min(n).max(nev + 1).min(n);
    let keep = opts.keep.clamp(nev, m.saturating_sub(1).max(nev));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    basis.push(random_unit(n, &mut rng, &[]).ok_or_else(|| Error::Numerical("zero start vector".into()))?);
    let mut t = DMatrix::<f64>::zeros(m, m);
    let mut locked = 0usize;
    let mut matvecs = 0usize;
    let mut restarts = 0usize;
    let mut w = vec![0.0; n];

    loop {
        // Extend the basis to m vectors; basis[m] (if any) is the residual direction.
        let mut beta_last = 0.0;
        let mut size = m;
        for j in locked..m {
            op.apply(&basis[j], &mut w);
            matvecs += 1;
            let coeffs = orthogonalize(&basis[..=j], &mut w);
            for (i, c) in coeffs.iter().enumerate() {
                t[(i, j)] = *c;
                t[(j, i)] = *c;
            }
            let beta = norm_real(&w);
            let scale = t[(j, j)].abs().max(1.0);
            if j + 1 == n {
                size = n;
                beta_last = 0.0;
                break;
            }
            if beta <= 1e-13 * scale {
                // Invariant subspace: continue from a fresh orthogonal direction.
                match random_unit(n, &mut rng, &basis) {
                    Some(v) => {
                        basis.push(v);
                        if j + 1 == m {
                            beta_last = 0.0;
                        }
                        continue;
                    }
                    None => {
                        size = j + 1;
                        break;
                    }
                }
            }
            let mut next = w.clone();
            scale_real(1.0 / beta, &mut next);
            basis.push(next);
            if j + 1 == m {
                beta_last = beta;
            }
        }

        let sub = t.view((0, 0), (size, size)).into_owned();
        let (theta, s) = symmetric_eigen(&sub);
        let residuals: Vec<f64> = (0..nev)
            .map(|i| (beta_last * s[(size - 1, i)]).abs())
            .collect();
        let converged = residuals.iter().all(|&r| r <= opts.tolerance);
        if converged || size < m {
            let vectors = (0..nev)
                .map(|i| {
                    let coeffs: Vec<f64> = (0..size).map(|r| s[(r, i)]).collect();
                    let mut y = vec![0.0; n];
                    combine_real(&basis[..size], &coeffs, &mut y);
                    let ny = norm_real(&y);
                    scale_real(1.0 / ny, &mut y);
                    y
                })
                .collect();
            return Ok(EigenPairs {
                values: theta[..nev].to_vec(),
                vectors,
                residuals,
                matvecs,
                restarts,
            });
        }
        if matvecs + (m - keep) > opts.max_matvecs {
            return Err(Error::NoConvergence {
                method: "thick-restart Lanczos",
                iterations: matvecs,
                residuals,
            });
        }

        // Thick restart: keep the lowest Ritz vectors plus the residual direction.
        let residual_dir = basis.pop().expect("residual direction present");
        let mut kept: Vec<Vec<f64>> = (0..keep)
            .map(|i| {
                let coeffs: Vec<f64> = (0..m).map(|r| s[(r, i)]).collect();
                let mut y = vec![0.0; n];
                combine_real(&basis[..m], &coeffs, &mut y);
                y
            })
            .collect();
        basis.clear();
        basis.append(&mut kept);
        basis.push(residual_dir);
        t.fill(0.0);
        for i in 0..keep {
            t[(i, i)] = theta[i];
            let c = beta_last * s[(m - 1, i)];
            t[(i, keep)] = c;
            t[(keep, i)] = c;
        }
        locked = keep;
        restarts += 1;
    }
}

/// Dense symmetric matrix as an operator; used for tests and small problems.
pub struct DenseSymmetric(pub DMatrix<f64>);

impl SymmetricOperator for DenseSymmetric {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.0.nrows();
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, xj) in x.iter().enumerate().take(n) {
                acc += self.0[(i, j)] * xj;
            }
            *yi = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_plus_tridiag(n: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = (i as f64).sqrt() - 3.0 * ((i % 7) as f64);
            if i + 1 < n {
                m[(i, i + 1)] = 0.3;
                m[(i + 1, i)] = 0.3;
            }
        }
        m
    }

    #[test]
    fn matches_dense_lowest() {
        let m = diag_plus_tridiag(300);
        let (exact, _) = symmetric_eigen(&m);
        let op = DenseSymmetric(m.clone());
        let res = lowest_eigenpairs(&op, 3, &LanczosOptions::default()).unwrap();
        for i in 0..3 {
            assert!((res.values[i] - exact[i]).abs() < 1e-9, "{} vs {}", res.values[i], exact[i]);
            let v = nalgebra::DVector::from_vec(res.vectors[i].clone());
            let r = (&m * &v - &v * res.values[i]).norm();
            assert!(r < 1e-9, "true residual {r}");
            assert!(res.residuals[i] <= 1e-10);
        }
        assert!(res.restarts > 0);
    }

    #[test]
    fn small_operator_exhausts_space() {
        let m = diag_plus_tridiag(6);
        let (exact, _) = symmetric_eigen(&m);
        let res = lowest_eigenpairs(&DenseSymmetric(m), 2, &LanczosOptions::default()).unwrap();
        assert!((res.values[0] - exact[0]).abs() < 1e-12);
        assert!((res.values[1] - exact[1]).abs() < 1e-12);
    }

    #[test]
    fn degenerate_identity_block() {
        // Exact invariant subspaces trigger the fresh-direction path.
        let mut m = DMatrix::<f64>::identity(50, 50);
        m[(0, 0)] = -1.0;
        let res = lowest_eigenpairs(&DenseSymmetric(m), 2, &LanczosOptions::default()).unwrap();
        assert!((res.values[0] + 1.0).abs() < 1e-12);
        assert!((res.values[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let m = diag_plus_tridiag(400);
        let opts = LanczosOptions {
            max_matvecs: 45,
            ..Default::default()
        };
        match lowest_eigenpairs(&DenseSymmetric(m), 2, &opts) {
            Err(Error::NoConvergence { residuals, .. }) => assert_eq!(residuals.len(), 2),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
