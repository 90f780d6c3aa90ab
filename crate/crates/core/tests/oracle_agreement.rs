mod common;

use common::*;
use decosim::bath::BathSpec;
use decosim::error::Error;
use decosim::oracle::{self, SectorSampler};
use decosim::propagation::PropagationContext;
use decosim::qubit::{PureState2, QubitParams};
use num_complex::Complex64 as C64;

fn two_mode(beta: f64, g: [f64; 2]) -> PropagationContext {
    let bath = BathSpec::from_modes(&[(1.0 / beta, g[0]), (2.0 / beta, g[1])], beta).unwrap();
    PropagationContext::new(QubitParams::new(0.0, 51.8, 0.5).unwrap(), bath)
}

#[test]
fn series_reference_value() {
    let q = (-1.0f64).exp();
    let expected = C64::from(1.0 - q) / (C64::from(1.0) - C64::from_polar(q, 0.02));
    let series = oracle::bath_factor_series(1.0, 0.01, 1.0, 2.0, 1.0, 10).unwrap();
    let bath = BathSpec::from_modes(&[(1.0, 0.01)], 1.0).unwrap();
    assert!(rel(series, expected) < 1e-12);
    assert!(rel(bath.w_factors(1.0).0, series) < 1e-10);
}

#[test]
fn preset_w_factors_agree_with_series() {
    let ctx = preset_ctx(30.0, 2.332e-8);
    let bath = ctx.bath();
    let t = 8e-5;
    let (w1, w2) = bath.w_factors(t);
    assert_eq!(w2, w1.conj());
    assert!(w1.norm() <= 1.0);
    // βω ~ 2.5e-4: a long but finite series
    let mut series = C64::new(1.0, 0.0);
    for m in bath.modes() {
        series *= oracle::bath_factor_series(m.omega, m.g_prime, bath.beta(), 2.0, t, 0).unwrap();
    }
    assert!(rel(w1, series) < 1e-10, "{w1} vs {series}");
}

#[test]
fn enumerate_is_stable_under_doubling_n_max() {
    let ctx = two_mode(0.3868, [10.36, 5.18]);
    let rho0 = PureState2::from_bloch(1.1, 0.7).density();
    for t in [1e-4, 1e-3, 1e-2] {
        let a = oracle::exact_reduced_density(&ctx, &rho0, t, &SectorSampler::enumerate(40)).unwrap();
        let b = oracle::exact_reduced_density(&ctx, &rho0, t, &SectorSampler::enumerate(80)).unwrap();
        assert!((a.rho.to_matrix() - b.rho.to_matrix()).max_abs() < 1e-12, "t = {t}");
        assert!((a.captured_weight - 1.0).abs() < 1e-12, "{}", a.captured_weight);
    }
}

#[test]
fn monte_carlo_agrees_with_enumeration() {
    let ctx = two_mode(0.5, [8.0, 3.0]);
    let rho0 = PureState2::from_bloch(1.2, 0.4).density();
    let t = 0.02;
    let exact = oracle::exact_reduced_density(&ctx, &rho0, t, &SectorSampler::enumerate(60)).unwrap();
    let mc = oracle::exact_reduced_density(&ctx, &rho0, t, &SectorSampler::monte_carlo(1_000_000, 11)).unwrap();
    let se = mc.std_err.unwrap();
    let pairs = [
        (mc.rho.rho00, exact.rho.rho00, se[0]),
        (mc.rho.rho11, exact.rho.rho11, se[1]),
        (mc.rho.rho10.re, exact.rho.rho10.re, se[2]),
        (mc.rho.rho10.im, exact.rho.rho10.im, se[3]),
    ];
    for (i, (m, e, s)) in pairs.iter().enumerate() {
        assert!((m - e).abs() <= 4.0 * s + 1e-15, "element {i}: {m} vs {e} (se {s})");
    }
    // statistical validity of the estimate itself
    let trace = mc.rho.rho00 + mc.rho.rho11;
    assert!((trace - 1.0).abs() <= 3.0 * (se[0] + se[1]) + 1e-12);
}

#[test]
fn monte_carlo_seed_determines_result() {
    let ctx = two_mode(0.5, [8.0, 3.0]);
    let rho0 = PureState2::basis0().density();
    let s = SectorSampler::monte_carlo(50_000, 99);
    let a = oracle::exact_reduced_density(&ctx, &rho0, 0.01, &s).unwrap();
    let b = oracle::exact_reduced_density(&ctx, &rho0, 0.01, &s).unwrap();
    assert_eq!(a.rho.rho10.re.to_bits(), b.rho.rho10.re.to_bits());
    assert_eq!(a, b);
}

#[test]
fn parallel_and_serial_sums_agree() {
    let ctx = two_mode(0.4, [6.0, -2.0]);
    let rho0 = PureState2::from_bloch(0.9, 2.0).density();
    let run = |threads: usize, sampler: SectorSampler| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| oracle::exact_reduced_density(&ctx, &rho0, 0.03, &sampler).unwrap())
    };
    for sampler in [SectorSampler::enumerate(90), SectorSampler::monte_carlo(40_000, 5)] {
        let serial = run(1, sampler);
        let parallel = run(4, sampler);
        assert!((serial.rho.to_matrix() - parallel.rho.to_matrix()).max_abs() <= 1e-14);
    }
}

#[test]
fn enumeration_limit_points_to_monte_carlo() {
    let bath = BathSpec::from_modes(&[(1.0, 0.1), (2.0, 0.1), (3.0, 0.1), (4.0, 0.1), (5.0, 0.1)], 1.0).unwrap();
    let ctx = PropagationContext::new(QubitParams::new(0.0, 51.8, 0.5).unwrap(), bath);
    let err = oracle::exact_reduced_density(&ctx, &PureState2::basis0().density(), 0.1, &SectorSampler::enumerate(40))
        .unwrap_err();
    assert!(matches!(err, Error::EnumerationTooLarge { .. }));
    assert!(err.to_string().contains("monte_carlo"));
}

#[test]
fn strang_order_on_a_two_mode_bath() {
    let ctx = two_mode(0.3868, [10.36, 5.18]);
    let t_g = 1.0 / 51.8;
    let times: Vec<f64> = (0..12).map(|i| t_g * 1e-3 * 100f64.powf(i as f64 / 11.0)).collect();
    for state in ctx.eigensystem().preset_states() {
        let fit = oracle::trotter_order_fit(&ctx, &state.density(), &times, &SectorSampler::enumerate(40)).unwrap();
        assert!((fit.slope - 3.0).abs() <= 0.3, "slope {}", fit.slope);
    }
}

#[test]
fn commuting_split_is_exact() {
    let bath = BathSpec::from_modes(&[(1.0, 4.0), (2.0, 2.0)], 1.0).unwrap();
    let ctx = PropagationContext::new(QubitParams::from_fields(10.0, 0.0).unwrap(), bath);
    let times: Vec<f64> = (0..8).map(|i| 1e-5 * 10f64.powf(i as f64 * 2.0 / 7.0)).collect();
    let rho0 = PureState2::from_bloch(1.0, 1.0).density();
    let errs = oracle::split_errors(&ctx, &rho0, &times, &SectorSampler::enumerate(40)).unwrap();
    assert!(errs.iter().all(|&e| e <= oracle::ERROR_FLOOR), "{errs:?}");
    assert!(matches!(
        oracle::trotter_order_fit(&ctx, &rho0, &times, &SectorSampler::enumerate(40)),
        Err(Error::Inconclusive(_))
    ));
}
