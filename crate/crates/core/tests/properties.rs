use icebox_core::analytics::{nonlocal_pg, wavepacket_iteration};
use icebox_core::dynamics::{fourier_spectrum, ground_state_probability, SpectrumOptions, TimeSeries};
use icebox_core::hamiltonian::{build_xxx_bath, Topology};
use icebox_core::spin::{Space, StateVector, SystemDims, C64};
use icebox_core::subspace::fit_log_slope;
use proptest::prelude::*;

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<C64>> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composite_encoding_round_trips(n_s in 1usize..=8, n_b in 0usize..=8, i in 0usize..256, j in 0usize..256) {
        let d = SystemDims::new(n_s, n_b).unwrap();
        let (i, j) = (i % d.system_dim(), j % d.bath_dim());
        let k = d.encode(i, j).unwrap();
        prop_assert_eq!(k, i * d.bath_dim() + j);
        prop_assert_eq!(d.decode(k).unwrap(), (i, j));
    }

    #[test]
    fn nonlocal_pg_is_symmetric_and_bounded(a in 1u32..14, b in 1u32..14, t in 0.0f64..500.0) {
        let (ns, nb) = (2f64.powi(a as i32), 2f64.powi(b as i32));
        let p = nonlocal_pg(ns, nb, t).unwrap();
        prop_assert!((p - nonlocal_pg(nb, ns, t).unwrap()).abs() < 1e-12);
        let peak = 4.0 * ns * nb / (ns + nb).powi(2);
        prop_assert!(p <= peak + 1e-15);
        prop_assert!(peak <= 1.0);
        prop_assert_eq!(peak == 1.0, a == b);
    }

    #[test]
    fn slope_ignores_a_common_factor(ys in proptest::collection::vec(0.001f64..10.0, 4..10), k in 0.01f64..100.0) {
        let xs: Vec<f64> = (0..ys.len()).map(|i| 8.0 + i as f64).collect();
        let scaled: Vec<f64> = ys.iter().map(|y| y * k).collect();
        let (s1, _, r1) = fit_log_slope(&xs, &ys).unwrap();
        let (s2, _, r2) = fit_log_slope(&xs, &scaled).unwrap();
        prop_assert!((s1 - s2).abs() < 1e-9);
        prop_assert!((r1 - r2).abs() < 1e-9);
    }

    #[test]
    fn ground_probability_is_a_probability(amps in complex_vec(64), g in 0usize..8) {
        let d = SystemDims::new(3, 3).unwrap();
        prop_assume!(amps.iter().any(|a| a.norm() > 1e-3));
        let s = StateVector::normalized(Space::Composite(d), amps).unwrap();
        let p = ground_state_probability(&s, g).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&p));
        let total: f64 = (0..8).map(|x| ground_state_probability(&s, x).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matrix_free_apply_is_linear(x in complex_vec(32), y in complex_vec(32), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let op = build_xxx_bath(5, 0.9, &Topology::ChainPeriodic).unwrap();
        let space = op.space();
        let sx = StateVector::from_amplitudes(space, x.clone()).unwrap();
        let sy = StateVector::from_amplitudes(space, y.clone()).unwrap();
        let mix: Vec<C64> = x.iter().zip(&y).map(|(p, q)| p * a + q * b).collect();
        let lhs = op.apply(&StateVector::from_amplitudes(space, mix).unwrap()).unwrap();
        let mut rhs = StateVector::zeros(space);
        rhs.add_scaled(C64::new(a, 0.0), &op.apply(&sx).unwrap()).unwrap();
        rhs.add_scaled(C64::new(b, 0.0), &op.apply(&sy).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn second_order_energy_is_lower(n_s in 2usize..=20, frac in 0.05f64..1.0) {
        let lambda = frac * 1.2 / n_s as f64;
        let e1 = wavepacket_iteration(n_s, lambda, 1, n_s).unwrap().energy;
        let e2 = wavepacket_iteration(n_s, lambda, 2, n_s).unwrap().energy;
        prop_assert!(e1 >= e2);
    }

    #[test]
    fn spectrum_is_ordered(values in proptest::collection::vec(-1.0f64..1.0, 16..200), dt in 0.01f64..2.0) {
        let s = TimeSeries::new("x", 0.0, dt, values).unwrap();
        let r = fourier_spectrum(&s, &SpectrumOptions::default()).unwrap();
        prop_assert!(r.frequencies[0] >= 0.0);
        prop_assert!(r.frequencies.windows(2).all(|w| w[1] > w[0]));
        prop_assert!(r.peaks.windows(2).all(|w| w[0].magnitude >= w[1].magnitude));
    }
}
