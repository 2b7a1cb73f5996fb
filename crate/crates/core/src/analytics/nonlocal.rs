use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{effective_4x4, effective_4x4_limit};
use crate::spin::{Space, StateVector, SystemDims, C64};

fn check(n_s: f64, n_b: f64) -> Result<()> {
    if !(n_s >= 2.0 && n_b >= 2.0) || !n_s.is_finite() || !n_b.is_finite() {
        return Err(Error::domain(format!(
            "register dimensions must be >= 2, got N_s = {n_s}, N_b = {n_b}"
        )));
    }
    Ok(())
}

/// Amplitudes on the invariant states of the non-local model:
/// `|Y>` (neither register in its ground label), `|beta>` (system at `g_s`,
/// bath excited), `|alpha>` (system excited, bath at `g_b`) and `|G> = |g_s, g_b>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveBasis {
    pub y: C64,
    pub beta: C64,
    pub alpha: C64,
    pub g: C64,
}

impl EffectiveBasis {
    pub fn from_array(a: [C64; 4]) -> Self {
        Self {
            y: a[0],
            beta: a[1],
            alpha: a[2],
            g: a[3],
        }
    }

    pub fn to_array(&self) -> [C64; 4] {
        [self.y, self.beta, self.alpha, self.g]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.to_array().iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability of finding the system at `g_s`.
    pub fn ground_probability(&self) -> f64 {
        self.beta.norm_sqr() + self.g.norm_sqr()
    }

    /// The initial state `N_s^{-1/2} sum_i |i, g_b>` in this basis.
    pub fn initial(n_s: f64) -> Self {
        let z = C64::new(0.0, 0.0);
        Self {
            y: z,
            beta: z,
            alpha: C64::new(((n_s - 1.0) / n_s).sqrt(), 0.0),
            g: C64::new((1.0 / n_s).sqrt(), 0.0),
        }
    }

    /// Overlaps of a composite state with the four basis states.
    pub fn project(state: &StateVector, g_s: usize, g_b: usize) -> Result<Self> {
        let dims = match state.space() {
            Space::Composite(d) => d,
            other => return Err(Error::domain(format!("expected a composite state, got {other:?}"))),
        };
        let (ns, nb) = (dims.system_dim(), dims.bath_dim());
        if g_s >= ns || g_b >= nb {
            return Err(Error::domain("ground labels out of range"));
        }
        let mut acc = [C64::new(0.0, 0.0); 4];
        for (idx, a) in state.amplitudes().iter().enumerate() {
            let (i, j) = (idx / nb, idx % nb);
            let slot = match (i == g_s, j == g_b) {
                (false, false) => 0,
                (true, false) => 1,
                (false, true) => 2,
                (true, true) => 3,
            };
            acc[slot] += a;
        }
        let (ns, nb) = (ns as f64, nb as f64);
        let norms = [(ns * nb - ns - nb + 1.0).sqrt(), (nb - 1.0).sqrt(), (ns - 1.0).sqrt(), 1.0];
        for (a, n) in acc.iter_mut().zip(norms) {
            *a /= n;
        }
        Ok(Self::from_array(acc))
    }

    /// The composite state with these amplitudes.
    pub fn embed(&self, dims: SystemDims, g_s: usize, g_b: usize) -> Result<StateVector> {
        let (ns, nb) = (dims.system_dim(), dims.bath_dim());
        if g_s >= ns || g_b >= nb {
            return Err(Error::domain("ground labels out of range"));
        }
        let (nsf, nbf) = (ns as f64, nb as f64);
        let coef = [
            self.y / (nsf * nbf - nsf - nbf + 1.0).sqrt(),
            self.beta / (nbf - 1.0).sqrt(),
            self.alpha / (nsf - 1.0).sqrt(),
            self.g,
        ];
        let amps = (0..ns * nb)
            .map(|idx| {
                let (i, j) = (idx / nb, idx % nb);
                coef[match (i == g_s, j == g_b) {
                    (false, false) => 0,
                    (true, false) => 1,
                    (false, true) => 2,
                    (true, true) => 3,
                }]
            })
            .collect();
        StateVector::from_amplitudes(Space::Composite(dims), amps)
    }
}

/// `omega = sqrt((N_s + N_b) / (N_s N_b))`.
pub fn effective_frequency(n_s: f64, n_b: f64) -> Result<f64> {
    check(n_s, n_b)?;
    Ok(((n_s + n_b) / (n_s * n_b)).sqrt())
}

/// Large-N closed-form wave function of the non-local model.
///
/// Phases follow `exp(-iHt)` with the `-1` and `-2` eigenvalues of the limit
/// matrix, so the `|G>` amplitude carries `e^{+2it}` and the rest `e^{+it}`.
pub fn nonlocal_wavefunction(n_s: f64, n_b: f64, t: f64) -> Result<EffectiveBasis> {
    let w = effective_frequency(n_s, n_b)?;
    let (c, s) = ((w * t).cos(), (w * t).sin());
    let pre = C64::new(0.0, t).exp() * ((n_s - 1.0) / n_s).sqrt();
    let sum = n_s + n_b;
    Ok(EffectiveBasis {
        y: pre * C64::new(0.0, (n_s / sum).sqrt() * s),
        beta: pre * ((n_s * n_b).sqrt() * (c - 1.0) / sum),
        alpha: pre * ((n_s * c + n_b) / sum),
        g: C64::new(0.0, 2.0 * t).exp() * (1.0 / n_s).sqrt(),
    })
}

/// `4 N_s N_b / (N_s + N_b)^2 sin^4(omega t / 2)`.
pub fn nonlocal_pg(n_s: f64, n_b: f64, t: f64) -> Result<f64> {
    let w = effective_frequency(n_s, n_b)?;
    let peak = 4.0 * n_s * n_b / (n_s + n_b).powi(2);
    Ok(peak * (0.5 * w * t).sin().powi(4))
}

/// `pi (N_s + N_b)^{3/2} / (4 sqrt(N_s N_b))`.
pub fn mean_search_time(n_s: f64, n_b: f64) -> Result<f64> {
    check(n_s, n_b)?;
    Ok(std::f64::consts::PI * (n_s + n_b).powf(1.5) / (4.0 * (n_s * n_b).sqrt()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectiveForm {
    Exact,
    LargeN,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveEigensystem {
    /// Ascending.
    pub values: [f64; 4],
    /// `vectors[k]` is the eigenvector of `values[k]` in `(Y, beta, alpha, G)` order.
    pub vectors: [[f64; 4]; 4],
}

pub fn effective_eigensystem(n_s: f64, n_b: f64, form: EffectiveForm) -> Result<EffectiveEigensystem> {
    check(n_s, n_b)?;
    match form {
        EffectiveForm::LargeN => {
            let w = effective_frequency(n_s, n_b)?;
            let sum = n_s + n_b;
            let (a, b) = ((n_s / (2.0 * sum)).sqrt(), (n_b / (2.0 * sum)).sqrt());
            let r = std::f64::consts::FRAC_1_SQRT_2;
            Ok(EffectiveEigensystem {
                values: [-2.0, -1.0 - w, -1.0, -1.0 + w],
                vectors: [
                    [0.0, 0.0, 0.0, 1.0],
                    [r, b, a, 0.0],
                    [0.0, -(n_s / sum).sqrt(), (n_b / sum).sqrt(), 0.0],
                    [-r, b, a, 0.0],
                ],
            })
        }
        EffectiveForm::Exact => Ok(diagonalize(&effective_4x4(n_s, n_b)?)),
    }
}

fn diagonalize(m: &Matrix4<f64>) -> EffectiveEigensystem {
    let eig = SymmetricEigen::new(*m);
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut values = [0.0; 4];
    let mut vectors = [[0.0; 4]; 4];
    for (k, &src) in order.iter().enumerate() {
        values[k] = eig.eigenvalues[src];
        let col = eig.eigenvectors.column(src);
        // Fix the sign by the largest component.
        let lead = (0..4).max_by(|&a, &b| col[a].abs().total_cmp(&col[b].abs())).unwrap_or(0);
        let s = col[lead].signum();
        for r in 0..4 {
            vectors[k][r] = s * col[r];
        }
    }
    EffectiveEigensystem { values, vectors }
}

/// Propagates `amps` under a 4x4 effective Hamiltonian.
pub fn evolve_effective(m: &Matrix4<f64>, amps: &EffectiveBasis, t: f64) -> EffectiveBasis {
    let eig = SymmetricEigen::new(*m);
    let v = eig.eigenvectors;
    let psi = Vector4::from(amps.to_array());
    let mut out = [C64::new(0.0, 0.0); 4];
    for k in 0..4 {
        let col = v.column(k);
        let overlap: C64 = (0..4).map(|r| psi[r] * col[r]).sum();
        let phase = C64::new(0.0, -eig.eigenvalues[k] * t).exp() * overlap;
        for r in 0..4 {
            out[r] += phase * col[r];
        }
    }
    EffectiveBasis::from_array(out)
}

/// Exact evolution of the initial state in the four-state subspace.
pub fn exact_effective_evolution(n_s: f64, n_b: f64, t: f64) -> Result<EffectiveBasis> {
    let m = effective_4x4(n_s, n_b)?;
    Ok(evolve_effective(&m, &EffectiveBasis::initial(n_s), t))
}

/// Same as [`exact_effective_evolution`] with the large-N matrix.
pub fn limit_effective_evolution(n_s: f64, n_b: f64, t: f64) -> Result<EffectiveBasis> {
    let m = effective_4x4_limit(n_s, n_b)?;
    Ok(evolve_effective(&m, &EffectiveBasis::initial(n_s), t))
}
