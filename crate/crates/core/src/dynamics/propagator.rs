use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::OperatorSpec;
use crate::linalg::dense::{hermitian_eigen, symmetric_eigen, HermitianEigen};
use crate::linalg::{axpy_complex, combine_complex, dot_complex, norm_complex};
use crate::spin::{StateVector, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagatorMethod {
    /// Full diagonalization of the dense matrix; small spaces only.
    DenseExponential,
    /// Lanczos approximation of `exp(-i H dt) psi` with adaptive sub-steps.
    Krylov,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PropagatorConfig {
    pub method: PropagatorMethod,
    /// Largest internal step; `None` picks `10 / ||H||` from the operator's norm bound.
    pub max_step: Option<f64>,
    /// Per-step error bound on the propagated (unit) state.
    pub tolerance: f64,
    /// Cap on the Krylov dimension.
    pub krylov_dim: usize,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            method: PropagatorMethod::Krylov,
            max_step: None,
            tolerance: 1e-10,
            krylov_dim: 30,
        }
    }
}

impl PropagatorConfig {
    pub fn dense() -> Self {
        Self {
            method: PropagatorMethod::DenseExponential,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::domain("propagator tolerance must be positive"));
        }
        if self.krylov_dim < 2 {
            return Err(Error::domain("Krylov dimension must be at least 2"));
        }
        if let Some(s) = self.max_step {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::domain(format!("step must be positive, got {s}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PropagationStats {
    pub steps: usize,
    pub matvecs: usize,
    pub max_error_estimate: f64,
    pub smallest_step: f64,
}

/// Time-evolution engine bound to one operator.
pub struct Propagator<'a> {
    op: &'a OperatorSpec,
    config: PropagatorConfig,
    dense: Option<HermitianEigen>,
    max_step: f64,
    stats: PropagationStats,
}

impl<'a> Propagator<'a> {
    pub fn new(op: &'a OperatorSpec, config: &PropagatorConfig) -> Result<Self> {
        config.validate()?;
        let dense = match config.method {
            PropagatorMethod::DenseExponential => Some(hermitian_eigen(&op.to_dense()?)),
            PropagatorMethod::Krylov => None,
        };
        let bound = op.norm_bound();
        let auto = if bound > 0.0 { 10.0 / bound } else { f64::INFINITY };
        Ok(Self {
            op,
            config: config.clone(),
            dense,
            max_step: config.max_step.map_or(auto, |s| s.min(auto)),
            stats: PropagationStats {
                smallest_step: f64::INFINITY,
                ..Default::default()
            },
        })
    }

    pub fn stats(&self) -> &PropagationStats {
        &self.stats
    }

    /// Advances `psi` in place by `dt >= 0`.
    pub fn advance(&mut self, psi: &mut Vec<C64>, dt: f64) -> Result<()> {
        if !(dt >= 0.0) {
            return Err(Error::domain(format!("cannot step by {dt}")));
        }
        if dt == 0.0 {
            return Ok(());
        }
        if let Some(eig) = &self.dense {
            *psi = eig.evolve(psi, dt);
            self.stats.steps += 1;
            self.stats.smallest_step = self.stats.smallest_step.min(dt);
            return Ok(());
        }
        let mut remaining = dt;
        while remaining > 0.0 {
            let h = remaining.min(self.max_step);
            let taken = self.krylov_step(psi, h)?;
            // Absorb round-off so the loop lands exactly on dt.
            if remaining - taken <= 1e-14 * dt {
                remaining = 0.0;
            } else {
                remaining -= taken;
            }
        }
        Ok(())
    }

    /// One Krylov step of at most `h`; returns the step actually taken.
    fn krylov_step(&mut self, psi: &mut [C64], h: f64) -> Result<f64> {
        let n = psi.len();
        let nu = norm_complex(psi);
        if nu == 0.0 {
            return Ok(h);
        }
        let cap = self.config.krylov_dim.min(n);
        let tol = self.config.tolerance;
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(cap);
        basis.push(psi.iter().map(|a| a / nu).collect());
        let mut alpha: Vec<f64> = Vec::with_capacity(cap);
        let mut beta: Vec<f64> = Vec::with_capacity(cap);
        let mut w = vec![C64::new(0.0, 0.0); n];

        let mut step = h;
        let mut coeffs: Vec<C64>;
        loop {
            let j = basis.len() - 1;
            self.op.apply_into(&basis[j], &mut w);
            self.stats.matvecs += 1;
            for _ in 0..2 {
                let proj: Vec<C64> = basis.par_iter().map(|q| dot_complex(q, &w)).collect();
                if alpha.len() == j {
                    alpha.push(proj[j].re);
                } else {
                    alpha[j] += proj[j].re;
                }
                for (q, c) in basis.iter().zip(&proj) {
                    axpy_complex(-c, q, &mut w);
                }
            }
            let b = norm_complex(&w);
            let k = basis.len();
            let exhausted = b <= 1e-14 * (alpha[j].abs() + beta.last().copied().unwrap_or(0.0)).max(1e-300) || k == n;
            let (c, err) = small_exponential(&alpha, &beta, if exhausted { 0.0 } else { b }, step);
            coeffs = c;
            let err = err * nu;
            if err <= tol || exhausted {
                self.stats.max_error_estimate = self.stats.max_error_estimate.max(err);
                break;
            }
            if k == cap {
                // Basis is full: shrink the step until the estimate is met.
                let mut err = err;
                while err > tol {
                    step *= 0.5;
                    if step < 1e-10 * h {
                        return Err(Error::NoConvergence {
                            method: "Krylov propagator",
                            iterations: self.stats.steps,
                            residuals: vec![err],
                        });
                    }
                    let (c, e) = small_exponential(&alpha, &beta, b, step);
                    coeffs = c;
                    err = e * nu;
                }
                self.stats.max_error_estimate = self.stats.max_error_estimate.max(err);
                break;
            }
            beta.push(b);
            let next: Vec<C64> = w.iter().map(|a| a / b).collect();
            basis.push(next);
        }
        let scaled: Vec<C64> = coeffs.iter().map(|c| c * nu).collect();
        combine_complex(&basis[..scaled.len()], &scaled, psi);
        self.stats.steps += 1;
        self.stats.smallest_step = self.stats.smallest_step.min(step);
        Ok(step)
    }
}

/// `exp(-i T h) e_1` for the tridiagonal `T(alpha, beta)` and the error estimate
/// `beta_next |[exp(-i T h) e_1]_last|`.
fn small_exponential(alpha: &[f64], beta: &[f64], beta_next: f64, h: f64) -> (Vec<C64>, f64) {
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let (theta, s) = symmetric_eigen(&t);
    let coeffs: Vec<C64> = (0..k)
        .map(|r| {
            (0..k)
                .map(|c| C64::new(0.0, -theta[c] * h).exp() * (s[(r, c)] * s[(0, c)]))
                .sum()
        })
        .collect();
    let err = beta_next * coeffs[k - 1].norm();
    (coeffs, err)
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !(t >= &0.0) || !t.is_finite()) {
        return Err(Error::domain("output times must be finite and non-negative"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("output times must be non-decreasing"));
    }
    Ok(())
}

/// Propagates `psi0` from `t = 0` and hands the state at each output time to `observe`.
pub fn evolve_with<F>(
    op: &OperatorSpec,
    psi0: &StateVector,
    times: &[f64],
    config: &PropagatorConfig,
    mut observe: F,
) -> Result<PropagationStats>
where
    F: FnMut(f64, &StateVector) -> Result<()>,
{
    op.check_space(psi0)?;
    check_times(times)?;
    let mut prop = Propagator::new(op, config)?;
    let space = psi0.space();
    let mut psi = psi0.amplitudes().to_vec();
    let mut now = 0.0;
    for &t in times {
        prop.advance(&mut psi, t - now)?;
        now = t;
        let snapshot = StateVector::from_amplitudes(space, std::mem::take(&mut psi))?;
        observe(t, &snapshot)?;
        psi = snapshot.into_amplitudes();
    }
    Ok(prop.stats().clone())
}

/// States at each output time.
pub fn evolve(
    op: &OperatorSpec,
    psi0: &StateVector,
    times: &[f64],
    config: &PropagatorConfig,
) -> Result<Vec<StateVector>> {
    let mut out = Vec::with_capacity(times.len());
    evolve_with(op, psi0, times, config, |_, s| {
        out.push(s.clone());
        Ok(())
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_toy_model, build_xxx_bath, Topology};
    use crate::spin::Space;

    fn random_state(space: Space, seed: u64) -> StateVector {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..space.dimension())
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        StateVector::normalized(space, amps).unwrap()
    }

    #[test]
    fn krylov_matches_dense() {
        let op = build_toy_model(7, 1.0, 0.7, 0.4).unwrap();
        let psi = random_state(op.space(), 3);
        let times = [0.0, 0.3, 1.0, 2.5, 6.0];
        let kry = evolve(&op, &psi, &times, &PropagatorConfig::default()).unwrap();
        let den = evolve(&op, &psi, &times, &PropagatorConfig::dense()).unwrap();
        for (a, b) in kry.iter().zip(&den) {
            assert!(a.max_abs_diff(b).unwrap() < 1e-9);
        }
        assert!(kry[0].max_abs_diff(&psi).unwrap() == 0.0);
    }

    #[test]
    fn conserves_norm_and_energy() {
        let op = build_xxx_bath(10, 1.0, &Topology::ChainPeriodic).unwrap();
        let psi = random_state(op.space(), 9);
        let e0 = op.expectation(&psi).unwrap();
        let states = evolve(&op, &psi, &[1.0, 5.0, 20.0], &PropagatorConfig::default()).unwrap();
        for s in &states {
            assert!((s.norm() - 1.0).abs() < 1e-10);
            assert!((op.expectation(s).unwrap() - e0).abs() < 1e-8);
        }
    }

    #[test]
    fn tiny_cap_forces_step_shrinking() {
        let op = build_xxx_bath(6, 1.0, &Topology::ChainOpen).unwrap();
        let psi = random_state(op.space(), 1);
        let cfg = PropagatorConfig {
            krylov_dim: 4,
            ..Default::default()
        };
        let a = evolve(&op, &psi, &[2.0], &cfg).unwrap();
        let b = evolve(&op, &psi, &[2.0], &PropagatorConfig::dense()).unwrap();
        assert!(a[0].max_abs_diff(&b[0]).unwrap() < 1e-8);
    }

    #[test]
    fn rejects_bad_input() {
        let op = build_xxx_bath(4, 1.0, &Topology::ChainOpen).unwrap();
        let psi = random_state(op.space(), 1);
        assert!(evolve(&op, &psi, &[1.0, 0.5], &PropagatorConfig::default()).is_err());
        assert!(evolve(&op, &psi, &[-1.0], &PropagatorConfig::default()).is_err());
        let cfg = PropagatorConfig {
            max_step: Some(0.0),
            ..Default::default()
        };
        assert!(evolve(&op, &psi, &[1.0], &cfg).is_err());
        let other = random_state(Space::bath(5).unwrap(), 1);
        assert!(evolve(&op, &other, &[1.0], &PropagatorConfig::default()).is_err());
    }
}
