use crate::error::{Error, Result};
use crate::spin::{Register, Space, StateVector, SystemDims};

fn composite(state: &StateVector) -> Result<SystemDims> {
    match state.space() {
        Space::Composite(d) => Ok(d),
        other => Err(Error::domain(format!(
            "expected a composite state, got {other:?}"
        ))),
    }
}

/// `P_g = sum_{j_b} |<g_s, j_b|psi>|^2`.
pub fn ground_state_probability(state: &StateVector, g_s: usize) -> Result<f64> {
    let dims = composite(state)?;
    if g_s >= dims.system_dim() {
        return Err(Error::domain(format!("system label {g_s} out of range")));
    }
    let nb = dims.bath_dim();
    let start = g_s * nb;
    Ok(state.amplitudes()[start..start + nb]
        .iter()
        .map(|a| a.norm_sqr())
        .sum())
}

/// `<sigma^z>` of one qubit (`+1` for spin-up).
pub fn local_magnetization(state: &StateVector, register: Register, qubit: usize) -> Result<f64> {
    let bit = state.space().bit_position(register, qubit)?;
    let norm = state.norm_sqr();
    if norm == 0.0 {
        return Err(Error::domain("zero state has no magnetization"));
    }
    let s: f64 = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let p = a.norm_sqr();
            if (i >> bit) & 1 == 1 {
                p
            } else {
                -p
            }
        })
        .sum();
    Ok(s / norm)
}

/// `<sigma^z_q>` for every qubit of a register.
pub fn magnetization_profile(state: &StateVector, register: Register) -> Result<Vec<f64>> {
    let n = state.space().register_qubits(register);
    if n == 0 {
        return Err(Error::domain(format!("state has no {register:?} register")));
    }
    (0..n)
        .map(|q| local_magnetization(state, register, q))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::C64;

    #[test]
    fn ground_probability_sums_bath_block() {
        let d = SystemDims::new(2, 2).unwrap();
        let s = StateVector::uniform(Space::Composite(d));
        assert!((ground_state_probability(&s, 3).unwrap() - 0.25).abs() < 1e-15);
        let s = StateVector::uniform_system_with_bath(d, 1).unwrap();
        assert!((ground_state_probability(&s, 0).unwrap() - 0.25).abs() < 1e-15);
        assert!(ground_state_probability(&s, 4).is_err());
    }

    #[test]
    fn magnetization_of_basis_states() {
        let space = Space::bath(3).unwrap();
        let s = StateVector::basis(space, 0b101).unwrap();
        assert_eq!(
            magnetization_profile(&s, Register::Bath).unwrap(),
            vec![1.0, -1.0, 1.0]
        );
        let mut amps = vec![C64::new(0.0, 0.0); 8];
        amps[0] = C64::new(0.6, 0.0);
        amps[1] = C64::new(0.0, 0.8);
        let s = StateVector::from_amplitudes(space, amps).unwrap();
        assert!((local_magnetization(&s, Register::Bath, 0).unwrap() - 0.28).abs() < 1e-15);
        assert!(local_magnetization(&s, Register::System, 0).is_err());
    }
}
