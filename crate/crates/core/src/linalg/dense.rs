//! Dense eigendecompositions for oracle checks and small projected problems.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::spin::C64;

/// Eigenpairs of a hermitian matrix, eigenvalues ascending, eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

pub fn hermitian_eigen(m: &DMatrix<C64>) -> HermitianEigen {
    let eig = SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vectors = DMatrix::<C64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    HermitianEigen {
        values: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
        vectors,
    }
}

impl HermitianEigen {
    /// `exp(-i H t) psi` through the spectral decomposition.
    pub fn evolve(&self, psi: &[C64], t: f64) -> Vec<C64> {
        let v = DVector::from_column_slice(psi);
        let mut c = self.vectors.adjoint() * v;
        for (k, e) in self.values.iter().enumerate() {
            c[k] *= C64::new(0.0, -e * t).exp();
        }
        (&self.vectors * c).iter().copied().collect()
    }
}

/// Eigenpairs of a real symmetric matrix, ascending.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vectors = DMatrix::<f64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (order.iter().map(|&k| eig.eigenvalues[k]).collect(), vectors)
}
