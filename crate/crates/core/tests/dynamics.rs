use icebox_core::dynamics::*;
use icebox_core::hamiltonian::*;
use icebox_core::linalg::dense::hermitian_eigen;
use icebox_core::spin::{xor_parity, Register, Space, StateVector, SystemDims, C64};
use icebox_core::Axis;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(space: Space, rng: &mut ChaCha8Rng) -> StateVector {
    let amps = (0..space.dimension())
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(space, amps).unwrap()
}

/// A dense random operator on 3 + 3 qubits assembled from every term kind.
fn random_operator(seed: u64) -> OperatorSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = SystemDims::new(3, 3).unwrap();
    let mut terms = Vec::new();
    let axes = [Axis::X, Axis::Y, Axis::Z];
    for q in 0..3 {
        for axis in axes {
            terms.push(Term::OnsiteField { site: Site::system(q), axis, strength: rng.gen_range(-1.0..1.0) });
            terms.push(Term::OnsiteField { site: Site::bath(q), axis, strength: rng.gen_range(-1.0..1.0) });
            terms.push(Term::PairCoupling {
                system_qubit: q,
                bath_qubit: rng.gen_range(0..3),
                axis,
                strength: rng.gen_range(-1.0..1.0),
            });
        }
        terms.push(Term::XxxBond { a: Site::bath(q), b: Site::bath((q + 1) % 3), coupling: rng.gen_range(0.0..1.0) });
    }
    terms.push(Term::Projector {
        register: Some(Register::System),
        target: ProjectorTarget::Basis { index: rng.gen_range(0..8) },
        weight: -1.0,
    });
    terms.push(Term::Projector { register: None, target: ProjectorTarget::Uniform, weight: -0.5 });
    OperatorSpec::new("random", Space::Composite(dims), terms).unwrap()
}

#[test]
fn zero_time_returns_initial_state() {
    let op = random_operator(1);
    let psi = random_state(op.space(), &mut ChaCha8Rng::seed_from_u64(2));
    let out = evolve(&op, &psi, &[0.0], &PropagatorConfig::default()).unwrap();
    assert_eq!(out[0].amplitudes(), psi.amplitudes());
}

#[test]
fn single_projector_phase() {
    let space = Space::system(3).unwrap();
    let op = OperatorSpec::new(
        "well",
        space,
        vec![Term::Projector {
            register: Some(Register::System),
            target: ProjectorTarget::Basis { index: 5 },
            weight: -1.0,
        }],
    )
    .unwrap();
    let psi = StateVector::basis(space, 5).unwrap();
    for cfg in [PropagatorConfig::default(), PropagatorConfig::dense()] {
        let out = evolve(&op, &psi, &[0.7, 2.3], &cfg).unwrap();
        for (s, t) in out.iter().zip([0.7f64, 2.3]) {
            let a = s.amplitude(5);
            assert!((a - C64::new(t.cos(), t.sin())).norm() < 1e-12);
        }
    }
}

#[test]
fn krylov_matches_dense_oracle_at_t10() {
    for seed in 0..3 {
        let op = random_operator(seed);
        let psi = random_state(op.space(), &mut ChaCha8Rng::seed_from_u64(seed + 100));
        let eig = hermitian_eigen(&op.to_dense().unwrap());
        let exact = eig.evolve(psi.amplitudes(), 10.0);
        let out = evolve(&op, &psi, &[10.0], &PropagatorConfig::default()).unwrap();
        let err = out[0]
            .amplitudes()
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "seed {seed}: {err}");
        let dense = evolve(&op, &psi, &[10.0], &PropagatorConfig::dense()).unwrap();
        assert!(dense[0].max_abs_diff(&out[0]).unwrap() < 1e-9);
    }
}

#[test]
fn norm_and_energy_are_conserved() {
    let op = build_toy_model(9, 1.0, 1.0, 1.0).unwrap();
    let dims = SystemDims::new(1, 9).unwrap();
    let psi = StateVector::basis(op.space(), dims.encode(1, 0).unwrap()).unwrap();
    let e0 = op.expectation(&psi).unwrap();
    let times = time_grid(20.0, 0.25);
    evolve_with(&op, &psi, &times, &PropagatorConfig::default(), |_, s| {
        assert!((s.norm() - 1.0).abs() <= 1e-9);
        assert!((op.expectation(s).unwrap() - e0).abs() <= 1e-9);
        Ok(())
    })
    .unwrap();
}

#[test]
fn evolution_is_linear() {
    let op = random_operator(7);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (p1, p2) = (random_state(op.space(), &mut rng), random_state(op.space(), &mut rng));
    let (a, b) = (C64::new(0.3, -0.8), C64::new(-1.1, 0.25));
    let mut mix = StateVector::zeros(op.space());
    mix.add_scaled(a, &p1).unwrap();
    mix.add_scaled(b, &p2).unwrap();
    let cfg = PropagatorConfig::default();
    let t = [3.0];
    let e1 = evolve(&op, &p1, &t, &cfg).unwrap().remove(0);
    let e2 = evolve(&op, &p2, &t, &cfg).unwrap().remove(0);
    let em = evolve(&op, &mix, &t, &cfg).unwrap().remove(0);
    let mut combo = StateVector::zeros(op.space());
    combo.add_scaled(a, &e1).unwrap();
    combo.add_scaled(b, &e2).unwrap();
    assert!(combo.max_abs_diff(&em).unwrap() < 1e-9);
}

#[test]
fn local_model_keeps_parity_blocks_closed() {
    let n = 4;
    let (op, _) = build_local_model(0b1011, 0, n, &[1.0, 1.16]).unwrap();
    let dims = SystemDims::new(n, n).unwrap();
    for nu in [0usize, 6, 15] {
        // Random state supported on block nu.
        let mut rng = ChaCha8Rng::seed_from_u64(nu as u64);
        let mut amps = vec![C64::new(0.0, 0.0); dims.composite_dim()];
        for i in 0..dims.system_dim() {
            amps[dims.encode(i, i ^ nu).unwrap()] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let psi = StateVector::normalized(op.space(), amps).unwrap();
        evolve_with(&op, &psi, &time_grid(30.0, 1.5), &PropagatorConfig::default(), |_, s| {
            let leak: f64 = s
                .amplitudes()
                .iter()
                .enumerate()
                .filter(|(k, _)| {
                    let (i, j) = dims.decode(*k).unwrap();
                    xor_parity(i, j, dims).unwrap() != nu
                })
                .map(|(_, a)| a.norm())
                .fold(0.0, f64::max);
            assert!(leak <= 1e-12, "nu={nu}: leak {leak}");
            Ok(())
        })
        .unwrap();
    }
}

#[test]
fn ground_probability_examples() {
    let dims = SystemDims::new(4, 3).unwrap();
    let uniform = StateVector::uniform_system_with_bath(dims, 2).unwrap();
    assert!((ground_state_probability(&uniform, 9).unwrap() - 1.0 / 16.0).abs() < 1e-15);
    for j in 0..8 {
        let s = StateVector::basis(Space::Composite(dims), dims.encode(9, j).unwrap()).unwrap();
        assert_eq!(ground_state_probability(&s, 9).unwrap(), 1.0);
        assert_eq!(ground_state_probability(&s, 8).unwrap(), 0.0);
    }
    assert!(ground_state_probability(&uniform, 16).is_err());
}

#[test]
fn magnetization_examples() {
    let dims = SystemDims::new(1, 7).unwrap();
    let space = Space::Composite(dims);
    let down = StateVector::basis(space, dims.encode(1, 0).unwrap()).unwrap();
    assert_eq!(magnetization_profile(&down, Register::Bath).unwrap(), vec![-1.0; 7]);
    assert_eq!(local_magnetization(&down, Register::System, 0).unwrap(), 1.0);
    let magnon = StateVector::basis(space, dims.encode(0, 1 << 3).unwrap()).unwrap();
    let prof = magnetization_profile(&magnon, Register::Bath).unwrap();
    for (q, m) in prof.iter().enumerate() {
        assert_eq!(*m, if q == 3 { 1.0 } else { -1.0 });
    }
}

#[test]
fn toy_model_disturbance_spreads_from_the_middle() {
    let n_b = 11;
    let op = build_toy_model(n_b, 1.0, 1.0, 1.0).unwrap();
    let dims = SystemDims::new(1, n_b).unwrap();
    let psi = StateVector::basis(op.space(), dims.encode(1, 0).unwrap()).unwrap();
    let times = [0.5, 1.0, 1.5];
    let mut fronts = Vec::new();
    evolve_with(&op, &psi, &times, &PropagatorConfig::default(), |_, s| {
        let prof = magnetization_profile(s, Register::Bath).unwrap();
        let mid = n_b / 2;
        // The coupled site carries the largest disturbance at early times.
        let dev: Vec<f64> = prof.iter().map(|m| m + 1.0).collect();
        let peak = dev.iter().cloned().fold(0.0, f64::max);
        assert_eq!(dev[mid], peak);
        let reach = dev
            .iter()
            .enumerate()
            .filter(|(_, d)| **d > 1e-2 * peak)
            .map(|(q, _)| (q as isize - mid as isize).unsigned_abs())
            .max()
            .unwrap();
        fronts.push(reach);
        Ok(())
    })
    .unwrap();
    assert!(fronts.windows(2).all(|w| w[1] > w[0]), "{fronts:?}");
}

#[test]
fn spectrum_of_sin_squared() {
    let omega = 0.37;
    let dt = 0.5;
    let values: Vec<f64> = (0..2000).map(|k| (omega * k as f64 * dt).sin().powi(2)).collect();
    let series = TimeSeries::new("p", 0.0, dt, values).unwrap();
    let spec = fourier_spectrum(&series, &SpectrumOptions::default()).unwrap();
    assert!(spec.frequencies.windows(2).all(|w| w[1] > w[0]));
    assert!(spec.frequencies[0] >= 0.0);
    assert!(spec.peaks.windows(2).all(|w| w[0].magnitude >= w[1].magnitude));
    assert!((spec.peaks[0].frequency - 2.0 * omega).abs() < spec.resolution);
}

#[test]
fn spectrum_of_two_tones_and_constant() {
    let dt = 1.0;
    let values: Vec<f64> = (0..3000)
        .map(|k| {
            let t = k as f64 * dt;
            (0.1 * t).sin().powi(2) + 0.5 * (0.04 * t).sin().powi(2)
        })
        .collect();
    let series = TimeSeries::new("p", 0.0, dt, values).unwrap();
    let spec = fourier_spectrum(&series, &SpectrumOptions::default()).unwrap();
    let mut top: Vec<f64> = spec.peaks.iter().take(2).map(|p| p.frequency).collect();
    top.sort_by(f64::total_cmp);
    assert!((top[0] - 0.08).abs() < spec.resolution);
    assert!((top[1] - 0.2).abs() < spec.resolution);

    let flat = TimeSeries::new("c", 0.0, 0.1, vec![0.25; 64]).unwrap();
    assert!(fourier_spectrum(&flat, &SpectrumOptions::default()).unwrap().peaks.is_empty());
    let short = TimeSeries::new("s", 0.0, 0.1, vec![0.0; 15]).unwrap();
    assert!(fourier_spectrum(&short, &SpectrumOptions::default()).is_err());
}

#[test]
fn sin_squared_fit_recovers_parameters() {
    let values: Vec<f64> = (0..400).map(|k| 0.83 * (0.113 * k as f64 * 0.25).sin().powi(2)).collect();
    let series = TimeSeries::new("p", 0.0, 0.25, values).unwrap();
    let fit = fit_sin_squared(&series, 0.01, 1.0).unwrap();
    assert!((fit.omega - 0.113).abs() < 1e-6);
    assert!((fit.amplitude - 0.83).abs() < 1e-6);
}

#[test]
fn time_series_csv_round_trip() {
    let series = TimeSeries::new("P_g", 0.0, 0.1, vec![0.1, 1.0 / 3.0, 2f64.sqrt()]).unwrap();
    let back = TimeSeries::from_csv(&series.to_csv()).unwrap();
    assert_eq!(back.values, series.values);
    assert_eq!(back.label, "P_g");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    series.write_csv(&path).unwrap();
    TimeSeries::write_sidecar(&path.with_extension("json"), &serde_json::json!({"seed": 3})).unwrap();
    assert!(path.with_extension("json").exists());
    assert!(TimeSeries::new("x", 0.0, 0.1, vec![1.0]).is_err());
    assert!(TimeSeries::new("x", 0.0, 0.0, vec![1.0, 2.0]).is_err());
}

#[test]
fn invalid_configuration_is_rejected() {
    let op = random_operator(3);
    let psi = random_state(op.space(), &mut ChaCha8Rng::seed_from_u64(3));
    let bad = PropagatorConfig { tolerance: 0.0, ..Default::default() };
    assert!(evolve(&op, &psi, &[1.0], &bad).is_err());
    let bad = PropagatorConfig { max_step: Some(-1.0), ..Default::default() };
    assert!(evolve(&op, &psi, &[1.0], &bad).is_err());
    assert!(evolve(&op, &psi, &[2.0, 1.0], &PropagatorConfig::default()).is_err());
    let wrong = StateVector::uniform(Space::system(6).unwrap());
    assert!(evolve(&op, &wrong, &[1.0], &PropagatorConfig::default()).is_err());
}
