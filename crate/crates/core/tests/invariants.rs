mod common;

use common::*;
use decosim::measure::{self, lambda_norm, Deviation, SearchPolicy};
use decosim::oracle::{self, SectorSampler};
use decosim::propagation::PropagationContext;
use decosim::qubit::{DensityMatrix2, QubitParams};
use decosim::BathSpec;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn fast_policy() -> SearchPolicy {
    SearchPolicy { theta_points: 16, phi_points: 32, ..SearchPolicy::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn w_factors_are_conjugate_and_bounded(bath in bath_strategy(4), t in -10.0f64..10.0) {
        let (w1, w2) = bath.w_factors(t);
        prop_assert_eq!(w2, w1.conj());
        prop_assert!(w1.norm() <= 1.0 + 1e-15);
        let (m1, _) = bath.w_factors(-t);
        prop_assert!((m1 - w1.conj()).norm() <= 1e-15);
    }

    #[test]
    fn trace_factor_is_one_for_equal_charges(bath in bath_strategy(3), t in -10.0f64..10.0) {
        prop_assert_eq!(bath.trace_factor(1.0, 1.0, t), C64::new(1.0, 0.0));
        prop_assert_eq!(bath.trace_factor(-1.0, -1.0, t), C64::new(1.0, 0.0));
    }

    #[test]
    fn mode_order_does_not_matter(bath in bath_strategy(5), t in 0.0f64..5.0) {
        let mut pairs: Vec<(f64, f64)> = bath.modes().iter().map(|m| (m.omega, m.g_prime)).collect();
        pairs.reverse();
        let permuted = BathSpec::from_modes(&pairs, bath.beta()).unwrap();
        let (a, _) = bath.w_factors(t);
        let (b, _) = permuted.w_factors(t);
        prop_assert!(rel(b, a) <= 1e-12);
    }

    #[test]
    fn closed_form_matches_thermal_series(bath in bath_strategy(3), t in 0.0f64..5.0) {
        let mut series = C64::new(1.0, 0.0);
        for m in bath.modes() {
            series *= oracle::bath_factor_series(m.omega, m.g_prime, bath.beta(), 2.0, t, 0).unwrap();
        }
        let (w1, _) = bath.w_factors(t);
        prop_assert!(rel(w1, series) <= 1e-10, "{} vs {}", w1, series);
    }

    #[test]
    fn reduced_density_stays_physical(
        q in qubit_strategy(), bath in bath_strategy(4), s in state_strategy(), t in 0.0f64..0.1,
    ) {
        let ctx = PropagationContext::new(q, bath);
        let rho = ctx.at(t).unwrap().reduced_density(&s.density());
        prop_assert!(rho.validate(1e-10).is_ok(), "{:?}", rho);
    }

    #[test]
    fn deviation_is_traceless_and_norm_is_spectral_radius(
        q in qubit_strategy(), bath in bath_strategy(3), s in state_strategy(), t in 0.0f64..0.1,
    ) {
        let ctx = PropagationContext::new(q, bath);
        let step = ctx.at(t).unwrap();
        let rho0 = s.density();
        let raw = step.reduced_density(&rho0).to_matrix() - step.ideal_density(&rho0).to_matrix();
        prop_assert!(raw.trace().norm() <= 1e-10);
        let d = Deviation::from_matrix(&raw);
        prop_assert!((lambda_norm(&d) - oracle::spectral_radius_generic(&d.to_matrix())).abs() <= 1e-12);
    }

    #[test]
    fn lambda_norm_matches_eigensolver(s11 in -1.0f64..1.0, re in -1.0f64..1.0, im in -1.0f64..1.0, e in -8.0f64..2.0) {
        let k = 10f64.powf(e);
        let m = traceless_hermitian(s11 * k, re * k, im * k);
        let d = Deviation::from_matrix(&m);
        prop_assert!((lambda_norm(&d) - oracle::spectral_radius_generic(&m)).abs() <= 1e-12 * k.max(1.0));
    }

    #[test]
    fn norm_ignores_global_phase(bath in bath_strategy(3), s in state_strategy(), alpha in 0.0f64..6.3, t in 0.0f64..0.1) {
        let ctx = PropagationContext::new(QubitParams::new(0.0, 51.8, 0.5).unwrap(), bath);
        let a = measure::norm_at(&ctx, &s, t).unwrap().norm;
        let b = measure::norm_at(&ctx, &s.with_global_phase(alpha), t).unwrap().norm;
        prop_assert!((a - b).abs() <= 1e-15 + 1e-13 * a);
    }

    #[test]
    fn exact_oracle_outputs_are_physical(bath in bath_strategy(2), s in state_strategy(), t in 0.0f64..0.1) {
        let ctx = PropagationContext::new(QubitParams::new(3.0, 51.8, 0.3).unwrap(), bath);
        let est = oracle::exact_reduced_density(&ctx, &s.density(), t, &SectorSampler::enumerate(60)).unwrap();
        prop_assert!(est.rho.validate(1e-10).is_ok(), "{:?}", est.rho);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn supremum_dominates_presets(q in qubit_strategy(), bath in bath_strategy(3), t in 0.0f64..0.1) {
        let ctx = PropagationContext::new(q, bath);
        let d = measure::d_of_t(&ctx, t, &fast_policy()).unwrap().norm;
        for s in ctx.eigensystem().preset_states() {
            prop_assert!(d >= measure::norm_at(&ctx, &s, t).unwrap().norm);
        }
    }

    #[test]
    fn low_temperature_dephases_less(t in 1e-6f64..1e-3, eta in 1e-9f64..1e-4) {
        let temps = [0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0];
        let mut last = 0.0;
        for temp in temps {
            let (w1, _) = preset_ctx(temp, eta).bath().w_factors(t);
            let loss = (C64::new(1.0, 0.0) - w1).norm();
            prop_assert!(loss >= last * (1.0 - 1e-12), "T = {} mK", temp);
            last = loss;
        }
    }
}

#[test]
fn density_validation_flags_bad_inputs() {
    assert!(DensityMatrix2::new(0.6, 0.6, C64::new(0.0, 0.0)).is_err());
    assert!(DensityMatrix2::new(0.5, 0.5, C64::new(0.6, 0.0)).is_err());
    assert!(DensityMatrix2::new(0.5, 0.5, C64::new(0.5, 0.0)).is_ok());
}
