//! Basis bookkeeping for system/bath qubit registers and state vectors.
//!
//! Conventions used throughout the crate:
//!
//! * `|0>` is spin-down and `|1>` is spin-up, so `sigma^z |1> = +|1>`.
//! * Qubit `m` of a register is bit `m` of the register's integer label.
//! * A composite label stores the system index in the high bits:
//!   `index = i_s * N_b + j_b`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest total qubit count addressable by a single label.
pub const MAX_QUBITS: usize = 40;

/// Qubit counts of the system and bath registers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemDims {
    n_s: usize,
    n_b: usize,
}

impl SystemDims {
    pub fn new(n_s: usize, n_b: usize) -> Result<Self> {
        if n_s == 0 {
            return Err(Error::domain("system register needs at least one qubit"));
        }
        if n_s + n_b > MAX_QUBITS {
            return Err(Error::domain(format!(
                "{} qubits exceed the addressable maximum of {MAX_QUBITS}",
                n_s + n_b
            )));
        }
        Ok(Self { n_s, n_b })
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    /// `N_s = 2^n_s`
    pub fn system_dim(&self) -> usize {
        1 << self.n_s
    }

    /// `N_b = 2^n_b`
    pub fn bath_dim(&self) -> usize {
        1 << self.n_b
    }

    /// `N_c = N_s * N_b`
    pub fn composite_dim(&self) -> usize {
        1 << (self.n_s + self.n_b)
    }

    pub fn encode(&self, i_s: usize, j_b: usize) -> Result<usize> {
        if i_s >= self.system_dim() || j_b >= self.bath_dim() {
            return Err(Error::domain(format!(
                "pair ({i_s}, {j_b}) outside {}x{} composite basis",
                self.system_dim(),
                self.bath_dim()
            )));
        }
        Ok((i_s << self.n_b) | j_b)
    }

    pub fn decode(&self, index: usize) -> Result<(usize, usize)> {
        if index >= self.composite_dim() {
            return Err(Error::domain(format!(
                "composite index {index} >= {}",
                self.composite_dim()
            )));
        }
        Ok((index >> self.n_b, index & (self.bath_dim() - 1)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Register {
    System,
    Bath,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

/// The Hilbert space a state or operator lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    System { qubits: usize },
    Bath { qubits: usize },
    Composite(SystemDims),
    /// The four-state invariant subspace of the non-local search model.
    Effective4,
}

impl Space {
    pub fn system(qubits: usize) -> Result<Self> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(Error::domain(format!("invalid system qubit count {qubits}")));
        }
        Ok(Space::System { qubits })
    }

    pub fn bath(qubits: usize) -> Result<Self> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(Error::domain(format!("invalid bath qubit count {qubits}")));
        }
        Ok(Space::Bath { qubits })
    }

    pub fn dimension(&self) -> usize {
        match *self {
            Space::System { qubits } | Space::Bath { qubits } => 1 << qubits,
            Space::Composite(d) => d.composite_dim(),
            Space::Effective4 => 4,
        }
    }

    /// Qubit count of `register` within this space, zero if absent.
    pub fn register_qubits(&self, register: Register) -> usize {
        match (*self, register) {
            (Space::System { qubits }, Register::System) => qubits,
            (Space::Bath { qubits }, Register::Bath) => qubits,
            (Space::Composite(d), Register::System) => d.n_s(),
            (Space::Composite(d), Register::Bath) => d.n_b(),
            _ => 0,
        }
    }

    /// Bit offset of `register`'s qubit 0 in a label of this space.
    pub fn register_offset(&self, register: Register) -> Result<usize> {
        match (*self, register) {
            (Space::System { .. }, Register::System) | (Space::Bath { .. }, Register::Bath) => {
                Ok(0)
            }
            (Space::Composite(d), Register::System) => Ok(d.n_b()),
            (Space::Composite(_), Register::Bath) => Ok(0),
            _ => Err(Error::domain(format!("{register:?} register absent from {self:?}"))),
        }
    }

    /// Bit position of `qubit` of `register` inside a basis label.
    pub fn bit_position(&self, register: Register, qubit: usize) -> Result<usize> {
        let offset = self.register_offset(register)?;
        let n = self.register_qubits(register);
        if qubit >= n {
            return Err(Error::domain(format!(
                "qubit {qubit} out of range for {register:?} register of {n} qubits"
            )));
        }
        Ok(offset + qubit)
    }

    pub fn qubit_count(&self) -> Option<usize> {
        match *self {
            Space::System { qubits } | Space::Bath { qubits } => Some(qubits),
            Space::Composite(d) => Some(d.n_s() + d.n_b()),
            Space::Effective4 => None,
        }
    }
}

/// A basis state index tagged with the space it indexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisLabel {
    pub index: usize,
    pub space: Space,
}

impl BasisLabel {
    pub fn new(index: usize, space: Space) -> Result<Self> {
        if index >= space.dimension() {
            return Err(Error::domain(format!(
                "index {index} >= dimension {}",
                space.dimension()
            )));
        }
        Ok(Self { index, space })
    }

    /// State (0 or 1) of `qubit` in `register`.
    pub fn qubit_state(&self, register: Register, qubit: usize) -> Result<u8> {
        let bit = self.space.bit_position(register, qubit)?;
        Ok(((self.index >> bit) & 1) as u8)
    }
}

/// Complex amplitudes over the basis of a [`Space`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    space: Space,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn zeros(space: Space) -> Self {
        Self {
            space,
            amplitudes: vec![C64::new(0.0, 0.0); space.dimension()],
        }
    }

    pub fn basis(space: Space, index: usize) -> Result<Self> {
        BasisLabel::new(index, space)?;
        let mut s = Self::zeros(space);
        s.amplitudes[index] = C64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn from_amplitudes(space: Space, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != space.dimension() {
            return Err(Error::domain(format!(
                "{} amplitudes given for a {}-dimensional space",
                amplitudes.len(),
                space.dimension()
            )));
        }
        Ok(Self { space, amplitudes })
    }

    /// Normalized copy of the given amplitudes.
    pub fn normalized(space: Space, amplitudes: Vec<C64>) -> Result<Self> {
        let mut s = Self::from_amplitudes(space, amplitudes)?;
        s.normalize()?;
        Ok(s)
    }

    /// Uniform superposition of all basis states.
    pub fn uniform(space: Space) -> Self {
        let n = space.dimension();
        let a = C64::new(1.0 / (n as f64).sqrt(), 0.0);
        Self {
            space,
            amplitudes: vec![a; n],
        }
    }

    /// `N_s^{-1/2} sum_{i_s} |i_s, g_b>`: every system label, bath in `g_b`.
    pub fn uniform_system_with_bath(dims: SystemDims, g_b: usize) -> Result<Self> {
        let space = Space::Composite(dims);
        let mut s = Self::zeros(space);
        let a = C64::new(1.0 / (dims.system_dim() as f64).sqrt(), 0.0);
        for i_s in 0..dims.system_dim() {
            s.amplitudes[dims.encode(i_s, g_b)?] = a;
        }
        Ok(s)
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::domain("cannot normalize a zero or non-finite vector"));
        }
        let inv = 1.0 / n;
        self.amplitudes.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    fn check_same_space(&self, other: &StateVector) -> Result<()> {
        if self.space != other.space {
            return Err(Error::domain(format!(
                "space mismatch: {:?} vs {:?}",
                self.space, other.space
            )));
        }
        Ok(())
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_same_space(other)?;
        Ok(dot(&self.amplitudes, &other.amplitudes))
    }

    /// `self += alpha * other`
    pub fn add_scaled(&mut self, alpha: C64, other: &StateVector) -> Result<()> {
        self.check_same_space(other)?;
        self.amplitudes
            .iter_mut()
            .zip(&other.amplitudes)
            .for_each(|(a, b)| *a += alpha * b);
        Ok(())
    }

    pub fn scale(&mut self, alpha: C64) {
        self.amplitudes.iter_mut().for_each(|a| *a *= alpha);
    }

    /// Largest componentwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        self.check_same_space(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Conjugate-linear dot product `sum conj(a_i) b_i` in index order.
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn check_index(x: usize, qubits: usize) -> Result<()> {
    if qubits > MAX_QUBITS || (qubits < usize::BITS as usize && x >> qubits != 0) {
        return Err(Error::domain(format!(
            "index {x} out of range for {qubits} qubits"
        )));
    }
    Ok(())
}

/// Number of bit positions where `a` and `b` differ.
pub fn hamming_distance(a: usize, b: usize, qubits: usize) -> Result<u32> {
    check_index(a, qubits)?;
    check_index(b, qubits)?;
    Ok((a ^ b).count_ones())
}

/// Bitwise parity label `nu = i_s XOR j_b`; requires equal register sizes.
pub fn xor_parity(i_s: usize, j_b: usize, dims: SystemDims) -> Result<usize> {
    if dims.n_s() != dims.n_b() {
        return Err(Error::domain(format!(
            "parity labels need equal registers, got n_s = {}, n_b = {}",
            dims.n_s(),
            dims.n_b()
        )));
    }
    check_index(i_s, dims.n_s())?;
    check_index(j_b, dims.n_b())?;
    Ok(i_s ^ j_b)
}

/// `sigma^z` eigenvalue of a bit: -1 for `|0>`, +1 for `|1>`.
#[inline]
pub fn z_sign(bit: usize) -> f64 {
    if bit & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Applies a single Pauli matrix to one qubit of `state`.
pub fn apply_pauli(
    state: &StateVector,
    axis: Axis,
    qubit: usize,
    register: Register,
) -> Result<StateVector> {
    let bit = state.space.bit_position(register, qubit)?;
    let mask = 1usize << bit;
    let mut out = StateVector::zeros(state.space);
    for (j, &a) in state.amplitudes.iter().enumerate() {
        let b = (j >> bit) & 1;
        match axis {
            Axis::X => out.amplitudes[j ^ mask] = a,
            Axis::Z => out.amplitudes[j] = a * z_sign(b),
            // sigma^y |0> = i|1>, sigma^y |1> = -i|0>
            Axis::Y => {
                let phase = if b == 0 { C64::i() } else { -C64::i() };
                out.amplitudes[j ^ mask] = a * phase;
            }
        }
    }
    Ok(out)
}

/// Binomial coefficient as a float; exact for the register sizes used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_distance(12, 10, 4).unwrap(), 2);
        assert_eq!(hamming_distance(9, 9, 4).unwrap(), 0);
        for n in 1..=10 {
            assert_eq!(hamming_distance(0, (1 << n) - 1, n).unwrap(), n as u32);
        }
        assert!(hamming_distance(16, 0, 4).is_err());
    }

    #[test]
    fn xor_examples() {
        let d = SystemDims::new(4, 4).unwrap();
        assert_eq!(xor_parity(12, 10, d).unwrap(), 6);
        assert_eq!(xor_parity(12, 6, d).unwrap(), 10);
        assert_eq!(xor_parity(11, 0, d).unwrap(), 11);
        assert!(xor_parity(1, 1, SystemDims::new(4, 3).unwrap()).is_err());
        assert!(xor_parity(16, 1, d).is_err());
    }

    #[test]
    fn pauli_examples() {
        let sp = Space::system(3).unwrap();
        let s = StateVector::basis(sp, 0b110).unwrap();
        let x = apply_pauli(&s, Axis::X, 0, Register::System).unwrap();
        assert_eq!(x.amplitude(0b111), C64::new(1.0, 0.0));

        let s = StateVector::basis(sp, 0).unwrap();
        let z = apply_pauli(&s, Axis::Z, 2, Register::System).unwrap();
        assert_eq!(z.amplitude(0), C64::new(-1.0, 0.0));

        let sp2 = Space::system(2).unwrap();
        let s = StateVector::basis(sp2, 0).unwrap();
        let y = apply_pauli(&s, Axis::Y, 0, Register::System).unwrap();
        let yy = apply_pauli(&y, Axis::Y, 1, Register::System).unwrap();
        assert_eq!(yy.amplitude(0b11), C64::new(-1.0, 0.0));
        assert!(apply_pauli(&s, Axis::X, 2, Register::System).is_err());
        assert!(apply_pauli(&s, Axis::X, 0, Register::Bath).is_err());
    }

    #[test]
    fn composite_register_bits() {
        let d = SystemDims::new(2, 3).unwrap();
        let sp = Space::Composite(d);
        let s = StateVector::basis(sp, d.encode(0, 0).unwrap()).unwrap();
        let out = apply_pauli(&s, Axis::X, 1, Register::System).unwrap();
        assert_eq!(out.amplitude(d.encode(0b10, 0).unwrap()).re, 1.0);
        let out = apply_pauli(&s, Axis::X, 2, Register::Bath).unwrap();
        assert_eq!(out.amplitude(d.encode(0, 0b100).unwrap()).re, 1.0);
        let label = BasisLabel::new(d.encode(0b01, 0b100).unwrap(), sp).unwrap();
        assert_eq!(label.qubit_state(Register::System, 0).unwrap(), 1);
        assert_eq!(label.qubit_state(Register::Bath, 2).unwrap(), 1);
        assert_eq!(label.qubit_state(Register::Bath, 0).unwrap(), 0);
    }

    #[test]
    fn composite_roundtrip_exhaustive() {
        for n_s in 1..=8 {
            for n_b in 0..=8 {
                let d = SystemDims::new(n_s, n_b).unwrap();
                for i_s in 0..d.system_dim() {
                    for j_b in 0..d.bath_dim() {
                        let idx = d.encode(i_s, j_b).unwrap();
                        assert_eq!(idx, i_s * d.bath_dim() + j_b);
                        assert_eq!(d.decode(idx).unwrap(), (i_s, j_b));
                    }
                }
            }
        }
    }

    #[test]
    fn dims_validation() {
        assert!(SystemDims::new(0, 3).is_err());
        let d = SystemDims::new(3, 2).unwrap();
        assert_eq!((d.system_dim(), d.bath_dim(), d.composite_dim()), (8, 4, 32));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(18, 9), 48620.0);
        assert_eq!(binomial(5, 0), 1.0);
        assert_eq!(binomial(5, 6), 0.0);
    }

    fn random_state(space: Space, seed: &[(f64, f64)]) -> StateVector {
        let amps: Vec<C64> = (0..space.dimension())
            .map(|i| {
                let (a, b) = seed[i % seed.len()];
                C64::new(a + i as f64 * 0.01, b)
            })
            .collect();
        StateVector::normalized(space, amps).unwrap()
    }

    proptest! {
        #[test]
        fn hamming_is_popcount_of_parity(a in 0usize..256, b in 0usize..256, c in 0usize..256) {
            let d = SystemDims::new(8, 8).unwrap();
            let h = hamming_distance(a, b, 8).unwrap();
            prop_assert_eq!(h, xor_parity(a, b, d).unwrap().count_ones());
            prop_assert_eq!(h, hamming_distance(b, a, 8).unwrap());
            let via_c = hamming_distance(a, c, 8).unwrap() + hamming_distance(c, b, 8).unwrap();
            prop_assert!(h <= via_c);
            prop_assert_eq!(xor_parity(a, xor_parity(a, b, d).unwrap(), d).unwrap(), b);
        }

        #[test]
        fn pauli_is_involution_and_isometry(
            seed in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..8),
            axis in prop_oneof![Just(Axis::X), Just(Axis::Y), Just(Axis::Z)],
            qubit in 0usize..3,
            bath in proptest::bool::ANY,
        ) {
            let d = SystemDims::new(3, 3).unwrap();
            let s = random_state(Space::Composite(d), &seed);
            let reg = if bath { Register::Bath } else { Register::System };
            let once = apply_pauli(&s, axis, qubit, reg).unwrap();
            prop_assert!((once.norm_sqr() - s.norm_sqr()).abs() < 1e-14);
            let twice = apply_pauli(&once, axis, qubit, reg).unwrap();
            prop_assert_eq!(twice, s);
        }
    }
}
