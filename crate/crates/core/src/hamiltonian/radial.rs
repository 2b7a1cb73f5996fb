use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::spin::binomial;

/// Tight-binding reduction of single-well hypercube hopping onto Hamming shells
/// `h = 0..=n_s`:
///
/// `-h lambda a_{h-1} + V_h a_h - (n_s - h) lambda a_{h+1} = E a_h`, `V_0 = -1`.
///
/// The operator is stored in this non-symmetric shell-amplitude form; spectra
/// are computed from the similar symmetric matrix obtained with
/// `u_h = sqrt(C(n_s, h)) a_h`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialOperator {
    n_s: usize,
    lambda: f64,
}

/// Eigenpairs of a [`RadialOperator`], ascending.
#[derive(Clone, Debug)]
pub struct RadialEigen {
    pub values: Vec<f64>,
    /// Per-state shell amplitudes `a_h`, normalized as `sum_h C(n_s,h) a_h^2 = 1`
    /// with `a_0 >= 0`.
    pub shell_amplitudes: Vec<Vec<f64>>,
}

impl RadialOperator {
    pub fn new(n_s: usize, lambda: f64) -> Result<Self> {
        if n_s == 0 {
            return Err(Error::domain("radial model needs n_s >= 1"));
        }
        Ok(Self { n_s, lambda })
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    pub fn dimension(&self) -> usize {
        self.n_s + 1
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..=self.n_s).map(|h| if h == 0 { -1.0 } else { 0.0 }).collect()
    }

    /// Coefficient of `a_{h-1}` in row `h` (`h >= 1`).
    pub fn lower(&self, h: usize) -> f64 {
        -(h as f64) * self.lambda
    }

    /// Coefficient of `a_{h+1}` in row `h` (`h < n_s`).
    pub fn upper(&self, h: usize) -> f64 {
        -((self.n_s - h) as f64) * self.lambda
    }

    /// Non-symmetric dense form.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dimension();
        let mut m = DMatrix::zeros(n, n);
        for (h, v) in self.diagonal().into_iter().enumerate() {
            m[(h, h)] = v;
            if h > 0 {
                m[(h, h - 1)] = self.lower(h);
            }
            if h < self.n_s {
                m[(h, h + 1)] = self.upper(h);
            }
        }
        m
    }

    /// `(diagonal, off_diagonal)` of the symmetrized tridiagonal matrix.
    pub fn symmetrized(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n_s as f64;
        let off = (0..self.n_s)
            .map(|h| -self.lambda * (((h + 1) as f64) * (n - h as f64)).sqrt())
            .collect();
        (self.diagonal(), off)
    }

    pub fn eigen(&self) -> RadialEigen {
        let (d, off) = self.symmetrized();
        let n = self.dimension();
        let mut m = DMatrix::zeros(n, n);
        for h in 0..n {
            m[(h, h)] = d[h];
            if h + 1 < n {
                m[(h, h + 1)] = off[h];
                m[(h + 1, h)] = off[h];
            }
        }
        let eig = SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let shell_amplitudes = order
            .iter()
            .map(|&k| {
                let col = eig.eigenvectors.column(k);
                let sign = if col[0] < 0.0 { -1.0 } else { 1.0 };
                (0..n)
                    .map(|h| sign * col[h] / binomial(self.n_s, h).sqrt())
                    .collect()
            })
            .collect();
        RadialEigen {
            values,
            shell_amplitudes,
        }
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigen().values[0]
    }
}
