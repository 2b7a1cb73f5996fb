//! The non-local search model restricted to its invariant four-state subspace,
//! in the basis order `(|Y>, |beta>, |alpha>, |G>)`.

use nalgebra::Matrix4;

use crate::error::{Error, Result};

fn check(n_s: f64, n_b: f64) -> Result<()> {
    if !(n_s >= 2.0 && n_b >= 2.0) || !n_s.is_finite() || !n_b.is_finite() {
        return Err(Error::domain(format!(
            "register dimensions must be >= 2, got N_s = {n_s}, N_b = {n_b}"
        )));
    }
    Ok(())
}

/// Exact restriction of `-|g_s><g_s| - |g_b><g_b| - |xi><xi|`.
pub fn effective_4x4(n_s: f64, n_b: f64) -> Result<Matrix4<f64>> {
    check(n_s, n_b)?;
    let n_c = n_s * n_b;
    let y = n_c - n_s - n_b + 1.0;
    let b = n_b - 1.0;
    let a = n_s - 1.0;
    let m = Matrix4::new(
        y,
        (y * b).sqrt(),
        (y * a).sqrt(),
        y.sqrt(),
        (y * b).sqrt(),
        n_c + n_b - 1.0,
        (a * b).sqrt(),
        b.sqrt(),
        (y * a).sqrt(),
        (a * b).sqrt(),
        n_c + n_s - 1.0,
        a.sqrt(),
        y.sqrt(),
        b.sqrt(),
        a.sqrt(),
        2.0 * n_c + 1.0,
    );
    Ok(m * (-1.0 / n_c))
}

/// Leading-order form valid for `1 << N_s, N_b << N_c`.
pub fn effective_4x4_limit(n_s: f64, n_b: f64) -> Result<Matrix4<f64>> {
    check(n_s, n_b)?;
    let n_c = n_s * n_b;
    let ya = -(n_s / n_c).sqrt();
    let yb = -(n_b / n_c).sqrt();
    Ok(Matrix4::new(
        -1.0, yb, ya, 0.0, //
        yb, -1.0, 0.0, 0.0, //
        ya, 0.0, -1.0, 0.0, //
        0.0, 0.0, 0.0, -2.0,
    ))
}
