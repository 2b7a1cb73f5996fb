//! Symbolic Hamiltonians with matrix-free application.
//!
//! An [`OperatorSpec`] is a list of tagged [`Term`]s over a [`Space`]. On
//! construction the terms are compiled into Pauli strings grouped by their
//! bit-flip mask plus diagonal and rank-one projector pieces, so one
//! application costs `O(dim * strings)` and each output amplitude is computed
//! independently (bit-reproducible under any thread count).

mod builders;
mod effective;
mod radial;

pub use builders::*;
pub use effective::{effective_4x4, effective_4x4_limit};
pub use radial::RadialOperator;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{z_sign, Axis, Register, Space, StateVector, C64};

/// Dense materialization is refused above this dimension.
pub const DENSE_DIM_LIMIT: usize = 1 << 14;

const PAR_CHUNK: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Site {
    pub register: Register,
    pub qubit: usize,
}

impl Site {
    pub fn system(qubit: usize) -> Self {
        Self {
            register: Register::System,
            qubit,
        }
    }

    pub fn bath(qubit: usize) -> Self {
        Self {
            register: Register::Bath,
            qubit,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProjectorTarget {
    Basis { index: usize },
    /// Uniform superposition over the projector's register.
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Term {
    /// `-J (XX + YY + ZZ)` on the pair `(a, b)`.
    XxxBond { a: Site, b: Site, coupling: f64 },
    /// `strength * sigma^axis` on one qubit.
    OnsiteField {
        site: Site,
        axis: Axis,
        strength: f64,
    },
    /// `weight * |target><target|` on `register`, identity on the rest.
    /// `register: None` projects in the full space.
    Projector {
        register: Option<Register>,
        target: ProjectorTarget,
        weight: f64,
    },
    /// `strength * s^axis_{system_qubit} sigma^axis_{bath_qubit}`.
    PairCoupling {
        system_qubit: usize,
        bath_qubit: usize,
        axis: Axis,
        strength: f64,
    },
    /// `-strength * sum_m sigma^x_m` over every qubit of `register`.
    HypercubeHop { register: Register, strength: f64 },
}

#[derive(Clone, Debug)]
struct FlipGroup {
    flip: usize,
    /// `(zmask, coefficient)`; element `<j^flip|P|j> = c * prod_{q in zmask} z(j_q)`.
    strings: Vec<(usize, C64)>,
}

#[derive(Clone, Debug)]
struct UniformPiece {
    /// bit offset and width of the register being averaged over
    offset: usize,
    width: usize,
    weight: f64,
}

#[derive(Clone, Debug, Default)]
struct Kernel {
    diag_strings: Vec<(usize, f64)>,
    /// `(mask, value, weight)`: adds `weight` where `i & mask == value`
    diag_projectors: Vec<(usize, usize, f64)>,
    groups: Vec<FlipGroup>,
    uniform: Vec<UniformPiece>,
    norm_bound: f64,
}

#[inline]
fn string_sign(j: usize, zmask: usize) -> f64 {
    // product of z(j_q) over zmask: -1 for each zero bit
    if ((zmask.count_ones() - (j & zmask).count_ones()) & 1) == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Gathers the rows of a block-diagonal piece: register bits removed from the index.
#[inline]
fn outer_key(i: usize, offset: usize, width: usize) -> usize {
    ((i >> (offset + width)) << offset) | (i & ((1usize << offset) - 1))
}

impl Kernel {
    fn push_string(&mut self, factors: &[(usize, Axis)], coeff: f64) {
        let mut flip = 0usize;
        let mut zmask = 0usize;
        let mut ny = 0u32;
        for &(bit, axis) in factors {
            let m = 1usize << bit;
            match axis {
                Axis::X => flip ^= m,
                Axis::Z => zmask ^= m,
                Axis::Y => {
                    flip ^= m;
                    zmask ^= m;
                    ny += 1;
                }
            }
        }
        // sigma^y = -i * X Z on each qubit
        let phase = match ny % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, -1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, 1.0),
        };
        let c = phase * coeff;
        self.norm_bound += coeff.abs();
        if flip == 0 {
            if let Some(entry) = self.diag_strings.iter_mut().find(|(z, _)| *z == zmask) {
                entry.1 += c.re;
            } else {
                self.diag_strings.push((zmask, c.re));
            }
            return;
        }
        let group = match self.groups.iter_mut().position(|g| g.flip == flip) {
            Some(p) => &mut self.groups[p],
            None => {
                self.groups.push(FlipGroup {
                    flip,
                    strings: Vec::new(),
                });
                self.groups.last_mut().unwrap()
            }
        };
        if let Some(entry) = group.strings.iter_mut().find(|(z, _)| *z == zmask) {
            entry.1 += c;
        } else {
            group.strings.push((zmask, c));
        }
    }

    fn finish(&mut self) {
        for g in &mut self.groups {
            g.strings.retain(|(_, c)| c.norm() > 0.0);
        }
        self.groups.retain(|g| !g.strings.is_empty());
        self.diag_strings.retain(|(_, c)| *c != 0.0);
        self.groups.sort_by_key(|g| g.flip);
    }

    #[inline]
    fn diagonal(&self, i: usize) -> f64 {
        let mut d = 0.0;
        for &(zmask, c) in &self.diag_strings {
            d += c * string_sign(i, zmask);
        }
        for &(mask, value, w) in &self.diag_projectors {
            if i & mask == value {
                d += w;
            }
        }
        d
    }
}

/// A Hamiltonian as a sum of tagged terms over one Hilbert space.
#[derive(Clone, Debug)]
pub struct OperatorSpec {
    label: String,
    space: Space,
    terms: Vec<Term>,
    kernel: Kernel,
}

#[derive(Serialize)]
struct Description<'a> {
    label: &'a str,
    space: Space,
    terms: &'a [Term],
}

impl OperatorSpec {
    pub fn new(label: impl Into<String>, space: Space, terms: Vec<Term>) -> Result<Self> {
        if space == Space::Effective4 {
            return Err(Error::domain(
                "the effective four-state space has no qubit structure; use effective_4x4",
            ));
        }
        let mut kernel = Kernel::default();
        let mut bonds = Vec::new();
        for term in &terms {
            compile_term(space, term, &mut kernel, &mut bonds)?;
        }
        kernel.finish();
        Ok(Self {
            label: label.into(),
            space,
            terms,
            kernel,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dimension(&self) -> usize {
        self.space.dimension()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Upper bound on the spectral norm (sum of term norms).
    pub fn norm_bound(&self) -> f64 {
        self.kernel.norm_bound
    }

    pub fn describe(&self) -> serde_json::Value {
        serde_json::to_value(Description {
            label: &self.label,
            space: self.space,
            terms: &self.terms,
        })
        .expect("operator description is always serializable")
    }

    /// Sum of several operators on the same space.
    pub fn sum(label: impl Into<String>, parts: &[&OperatorSpec]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::domain("empty operator sum"))?;
        let mut terms = Vec::new();
        for p in parts {
            if p.space != first.space {
                return Err(Error::domain(format!(
                    "cannot add operators on {:?} and {:?}",
                    first.space, p.space
                )));
            }
            terms.extend(p.terms.iter().cloned());
        }
        Self::new(label, first.space, terms)
    }

    /// Lifts a single-register operator into the composite space (identity on the other register).
    pub fn embed(&self, dims: crate::spin::SystemDims) -> Result<Self> {
        let target = Space::Composite(dims);
        let own = match self.space {
            Space::System { qubits } if qubits == dims.n_s() => Register::System,
            Space::Bath { qubits } if qubits == dims.n_b() => Register::Bath,
            Space::Composite(d) if d == dims => return Ok(self.clone()),
            _ => {
                return Err(Error::domain(format!(
                    "cannot embed {:?} into {:?}",
                    self.space, target
                )))
            }
        };
        let terms = self
            .terms
            .iter()
            .cloned()
            .map(|t| match t {
                Term::Projector {
                    register: None,
                    target,
                    weight,
                } => Term::Projector {
                    register: Some(own),
                    target,
                    weight,
                },
                other => other,
            })
            .collect();
        Self::new(self.label.clone(), target, terms)
    }

    /// `y = H x` on raw amplitude slices.
    pub fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        let n = self.dimension();
        assert_eq!(x.len(), n, "input length mismatch");
        assert_eq!(y.len(), n, "output length mismatch");
        let k = &self.kernel;
        let sums: Vec<(usize, usize, f64, Vec<C64>)> = k
            .uniform
            .iter()
            .map(|u| {
                let outer = n >> u.width;
                let mut s = vec![C64::new(0.0, 0.0); outer];
                for (j, &a) in x.iter().enumerate() {
                    s[outer_key(j, u.offset, u.width)] += a;
                }
                let scale = u.weight / (1usize << u.width) as f64;
                (u.offset, u.width, scale, s)
            })
            .collect();
        let row = |i: usize| -> C64 {
            let mut acc = x[i] * k.diagonal(i);
            for g in &k.groups {
                let j = i ^ g.flip;
                let xj = x[j];
                for &(zmask, c) in &g.strings {
                    acc += c * xj * string_sign(j, zmask);
                }
            }
            for (offset, width, scale, s) in &sums {
                acc += s[outer_key(i, *offset, *width)] * *scale;
            }
            acc
        };
        if n >= 2 * PAR_CHUNK {
            y.par_chunks_mut(PAR_CHUNK)
                .enumerate()
                .for_each(|(c, chunk)| {
                    let base = c * PAR_CHUNK;
                    for (o, out) in chunk.iter_mut().enumerate() {
                        *out = row(base + o);
                    }
                });
        } else {
            for (i, out) in y.iter_mut().enumerate() {
                *out = row(i);
            }
        }
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        self.check_space(state)?;
        let mut out = StateVector::zeros(self.space);
        self.apply_into(state.amplitudes(), out.amplitudes_mut());
        Ok(out)
    }

    /// `<psi|H|psi>` (real part; imaginary part vanishes for hermitian terms).
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        let h = self.apply(state)?;
        Ok(state.inner(&h)?.re)
    }

    pub(crate) fn check_space(&self, state: &StateVector) -> Result<()> {
        if state.space() != self.space {
            return Err(Error::domain(format!(
                "state lives in {:?}, operator in {:?}",
                state.space(),
                self.space
            )));
        }
        Ok(())
    }

    /// Dense matrix assembled term by term from single-qubit actions.
    ///
    /// This path does not use the compiled kernel and serves as its oracle.
    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        let n = self.dimension();
        if n > DENSE_DIM_LIMIT {
            return Err(Error::Capacity(format!(
                "dense materialization of dimension {n} exceeds {DENSE_DIM_LIMIT}"
            )));
        }
        let mut m = DMatrix::<C64>::zeros(n, n);
        for term in &self.terms {
            match term {
                Term::Projector {
                    register,
                    target,
                    weight,
                } => {
                    let (offset, width) = match register {
                        None => (0, self.space.qubit_count().unwrap_or(0)),
                        Some(r) => (
                            self.space.register_offset(*r)?,
                            self.space.register_qubits(*r),
                        ),
                    };
                    let reg_mask = ((1usize << width) - 1) << offset;
                    let reg_dim = 1usize << width;
                    for col in 0..n {
                        for row in 0..n {
                            if row & !reg_mask != col & !reg_mask {
                                continue;
                            }
                            let (r, c) = ((row & reg_mask) >> offset, (col & reg_mask) >> offset);
                            let v = match target {
                                ProjectorTarget::Basis { index } => {
                                    if r == *index && c == *index {
                                        1.0
                                    } else {
                                        0.0
                                    }
                                }
                                ProjectorTarget::Uniform => 1.0 / reg_dim as f64,
                            };
                            m[(row, col)] += C64::new(weight * v, 0.0);
                        }
                    }
                }
                other => {
                    for (factors, coeff) in pauli_products(self.space, other)? {
                        for col in 0..n {
                            let mut idx = col;
                            let mut amp = C64::new(coeff, 0.0);
                            for &(bit, axis) in &factors {
                                let b = (idx >> bit) & 1;
                                match axis {
                                    Axis::X => idx ^= 1 << bit,
                                    Axis::Z => amp *= z_sign(b),
                                    Axis::Y => {
                                        amp *= if b == 0 { C64::i() } else { -C64::i() };
                                        idx ^= 1 << bit;
                                    }
                                }
                            }
                            m[(idx, col)] += amp;
                        }
                    }
                }
            }
        }
        Ok(m)
    }
}

/// Expands a non-projector term into Pauli products `(factors, coefficient)`.
fn pauli_products(space: Space, term: &Term) -> Result<Vec<(Vec<(usize, Axis)>, f64)>> {
    let out = match *term {
        Term::XxxBond { a, b, coupling } => {
            let ba = space.bit_position(a.register, a.qubit)?;
            let bb = space.bit_position(b.register, b.qubit)?;
            [Axis::X, Axis::Y, Axis::Z]
                .into_iter()
                .map(|ax| (vec![(ba, ax), (bb, ax)], -coupling))
                .collect()
        }
        Term::OnsiteField {
            site,
            axis,
            strength,
        } => vec![(
            vec![(space.bit_position(site.register, site.qubit)?, axis)],
            strength,
        )],
        Term::PairCoupling {
            system_qubit,
            bath_qubit,
            axis,
            strength,
        } => {
            if !matches!(space, Space::Composite(_)) {
                return Err(Error::domain("pair coupling needs a composite space"));
            }
            vec![(
                vec![
                    (space.bit_position(Register::System, system_qubit)?, axis),
                    (space.bit_position(Register::Bath, bath_qubit)?, axis),
                ],
                strength,
            )]
        }
        Term::HypercubeHop { register, strength } => {
            let n = space.register_qubits(register);
            if n == 0 {
                return Err(Error::domain(format!("{register:?} register absent from {space:?}")));
            }
            (0..n)
                .map(|m| {
                    Ok((
                        vec![(space.bit_position(register, m)?, Axis::X)],
                        -strength,
                    ))
                })
                .collect::<Result<Vec<_>>>()?
        }
        Term::Projector { .. } => Vec::new(),
    };
    Ok(out)
}

fn compile_term(
    space: Space,
    term: &Term,
    kernel: &mut Kernel,
    bonds: &mut Vec<(usize, usize)>,
) -> Result<()> {
    match term {
        Term::XxxBond { a, b, .. } => {
            let ba = space.bit_position(a.register, a.qubit)?;
            let bb = space.bit_position(b.register, b.qubit)?;
            if ba == bb {
                return Err(Error::domain(format!("self-loop bond on {a:?}")));
            }
            let key = (ba.min(bb), ba.max(bb));
            if bonds.contains(&key) {
                return Err(Error::domain(format!("duplicate bond {a:?}-{b:?}")));
            }
            bonds.push(key);
        }
        Term::Projector {
            register,
            target,
            weight,
        } => {
            let (offset, width) = match register {
                None => (0, space.qubit_count().unwrap_or(0)),
                Some(r) => {
                    let w = space.register_qubits(*r);
                    if w == 0 {
                        return Err(Error::domain(format!("{r:?} register absent from {space:?}")));
                    }
                    (space.register_offset(*r)?, w)
                }
            };
            kernel.norm_bound += weight.abs();
            match target {
                ProjectorTarget::Basis { index } => {
                    if *index >= 1usize << width {
                        return Err(Error::domain(format!(
                            "projector target {index} outside a {width}-qubit register"
                        )));
                    }
                    let mask = ((1usize << width) - 1) << offset;
                    kernel.diag_projectors.push((mask, index << offset, *weight));
                }
                ProjectorTarget::Uniform => kernel.uniform.push(UniformPiece {
                    offset,
                    width,
                    weight: *weight,
                }),
            }
            return Ok(());
        }
        _ => {}
    }
    for (factors, coeff) in pauli_products(space, term)? {
        kernel.push_string(&factors, coeff);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::SystemDims;

    fn random_vec(n: usize, seed: u64) -> Vec<C64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn outer_key_removes_register_bits() {
        // composite with 2 system bits above 3 bath bits
        assert_eq!(outer_key(0b10_101, 3, 2), 0b101);
        assert_eq!(outer_key(0b10_101, 0, 3), 0b10);
    }

    #[test]
    fn rejects_bad_terms() {
        let sp = Space::bath(3).unwrap();
        let bond = |a, b| Term::XxxBond {
            a: Site::bath(a),
            b: Site::bath(b),
            coupling: 1.0,
        };
        assert!(OperatorSpec::new("x", sp, vec![bond(0, 0)]).is_err());
        assert!(OperatorSpec::new("x", sp, vec![bond(0, 1), bond(1, 0)]).is_err());
        assert!(OperatorSpec::new("x", sp, vec![bond(0, 3)]).is_err());
        let pc = Term::PairCoupling {
            system_qubit: 0,
            bath_qubit: 0,
            axis: Axis::X,
            strength: 1.0,
        };
        assert!(OperatorSpec::new("x", sp, vec![pc]).is_err());
    }

    #[test]
    fn dense_limit_enforced() {
        let sp = Space::system(15).unwrap();
        let op = OperatorSpec::new(
            "hop",
            sp,
            vec![Term::HypercubeHop {
                register: Register::System,
                strength: 1.0,
            }],
        )
        .unwrap();
        assert!(matches!(op.to_dense(), Err(Error::Capacity(_))));
    }

    #[test]
    fn parallel_and_serial_paths_agree() {
        // dimension 2^13 crosses the parallel threshold; compare with dense rows on a few indices
        let dims = SystemDims::new(1, 12).unwrap();
        let op = build_toy_model(12, 1.0, 0.7, 0.4).unwrap();
        assert_eq!(op.space(), Space::Composite(dims));
        let x = random_vec(op.dimension(), 3);
        let mut y = vec![C64::new(0.0, 0.0); x.len()];
        op.apply_into(&x, &mut y);
        let mut y2 = vec![C64::new(0.0, 0.0); x.len()];
        op.apply_into(&x, &mut y2);
        assert_eq!(y, y2);
        let small = build_toy_model(5, 1.0, 0.7, 0.4).unwrap();
        let d = small.to_dense().unwrap();
        let xs = random_vec(small.dimension(), 4);
        let mut ys = vec![C64::new(0.0, 0.0); xs.len()];
        small.apply_into(&xs, &mut ys);
        let yd = &d * nalgebra::DVector::from_vec(xs);
        for i in 0..ys.len() {
            assert!((ys[i] - yd[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn embed_lifts_register_operators() {
        let dims = SystemDims::new(2, 3).unwrap();
        let (hs, hb) = build_projector_hamiltonians(1, 0, dims).unwrap();
        let hs_c = hs.embed(dims).unwrap();
        let hb_c = hb.embed(dims).unwrap();
        let s = StateVector::basis(Space::Composite(dims), dims.encode(1, 5).unwrap()).unwrap();
        assert_eq!(hs_c.apply(&s).unwrap().amplitude(dims.encode(1, 5).unwrap()).re, -1.0);
        assert_eq!(hb_c.apply(&s).unwrap().norm(), 0.0);
        assert!(hs.embed(SystemDims::new(3, 3).unwrap()).is_err());
    }
}
