//! Vector kernels, dense eigensolvers used as oracles, and the thick-restart
//! Lanczos eigensolver.
//!
//! Reductions are evaluated over fixed-size chunks whose partial sums are
//! combined in chunk order, so results do not depend on the thread count.

pub mod dense;
pub mod lanczos;

use rayon::prelude::*;

use crate::spin::C64;

const CHUNK: usize = 8192;

pub fn dot_real(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() < 2 * CHUNK {
        return a.iter().zip(b).map(|(x, y)| x * y).sum();
    }
    let partials: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum())
        .collect();
    partials.into_iter().sum()
}

pub fn norm_real(a: &[f64]) -> f64 {
    dot_real(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy_real(alpha: f64, x: &[f64], y: &mut [f64]) {
    if y.len() < 2 * CHUNK {
        y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
        return;
    }
    y.par_chunks_mut(CHUNK)
        .zip(x.par_chunks(CHUNK))
        .for_each(|(yc, xc)| yc.iter_mut().zip(xc).for_each(|(yi, xi)| *yi += alpha * xi));
}

pub fn scale_real(alpha: f64, x: &mut [f64]) {
    x.iter_mut().for_each(|v| *v *= alpha);
}

/// `sum conj(a_i) b_i`
pub fn dot_complex(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() < 2 * CHUNK {
        return crate::spin::dot(a, b);
    }
    let partials: Vec<C64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| crate::spin::dot(x, y))
        .collect();
    partials.into_iter().sum()
}

pub fn norm_complex(a: &[C64]) -> f64 {
    if a.len() < 2 * CHUNK {
        return a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    }
    let partials: Vec<f64> = a
        .par_chunks(CHUNK)
        .map(|x| x.iter().map(|v| v.norm_sqr()).sum())
        .collect();
    partials.into_iter().sum::<f64>().sqrt()
}

pub fn axpy_complex(alpha: C64, x: &[C64], y: &mut [C64]) {
    if y.len() < 2 * CHUNK {
        y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
        return;
    }
    y.par_chunks_mut(CHUNK)
        .zip(x.par_chunks(CHUNK))
        .for_each(|(yc, xc)| yc.iter_mut().zip(xc).for_each(|(yi, xi)| *yi += alpha * xi));
}

/// `y = sum_k coeffs[k] * basis[k]`, each element summed in `k` order.
pub fn combine_complex(basis: &[Vec<C64>], coeffs: &[C64], y: &mut [C64]) {
    let fill = |offset: usize, out: &mut [C64]| {
        for (e, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (v, c) in basis.iter().zip(coeffs) {
                acc += c * v[offset + e];
            }
            *o = acc;
        }
    };
    if y.len() < 2 * CHUNK {
        fill(0, y);
    } else {
        y.par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(c, out)| fill(c * CHUNK, out));
    }
}

/// `y = sum_k coeffs[k] * basis[k]` for real vectors.
pub fn combine_real(basis: &[Vec<f64>], coeffs: &[f64], y: &mut [f64]) {
    let fill = |offset: usize, out: &mut [f64]| {
        for (e, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (v, c) in basis.iter().zip(coeffs) {
                acc += c * v[offset + e];
            }
            *o = acc;
        }
    };
    if y.len() < 2 * CHUNK {
        fill(0, y);
    } else {
        y.par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(c, out)| fill(c * CHUNK, out));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunked_dot_matches_serial_to_rounding() {
        let n = 5 * CHUNK + 17;
        let a: Vec<f64> = (0..n).map(|i| ((i * 7919) % 1000) as f64 / 999.0 - 0.5).collect();
        let b: Vec<f64> = (0..n).map(|i| ((i * 104729) % 997) as f64 / 996.0 - 0.5).collect();
        let serial: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot_real(&a, &b) - serial).abs() < 1e-10);
        assert_eq!(dot_real(&a, &b), dot_real(&a, &b));
    }
}
