mod common;

use common::*;
use decosim::bath::BathSpec;
use decosim::measure::{self, lambda_norm, Deviation, SearchPolicy};
use decosim::oracle::linear_fit;
use decosim::propagation::PropagationContext;
use decosim::qubit::{PureState2, QubitParams};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn grid_search_matches_dense_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..3 {
        let beta = rng.gen_range(0.2..3.0);
        let modes: Vec<(f64, f64)> =
            (0..3).map(|_| (rng.gen_range(0.1..3.0) / beta, rng.gen_range(-2.0..2.0))).collect();
        let q = QubitParams::new(rng.gen_range(0.0..40.0), rng.gen_range(5.0..60.0), rng.gen_range(0.0..1.0)).unwrap();
        let ctx = PropagationContext::new(q, BathSpec::from_modes(&modes, beta).unwrap());
        let t = rng.gen_range(0.001..0.1);
        let step = ctx.at(t).unwrap();
        let mut brute = 0.0f64;
        for _ in 0..1_000_000 {
            let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let Ok(s) = PureState2::normalized(C64::new(v[0], v[1]), C64::new(v[2], v[3])) else { continue };
            brute = brute.max(lambda_norm(&Deviation::from_matrix(&step.deviation_matrix(&s.density()))));
        }
        let d = measure::d_of_t(&ctx, t, &SearchPolicy::default()).unwrap().norm;
        assert!((d - brute).abs() <= 1e-6 * brute, "grid {d} vs dense {brute}");
    }
}

#[test]
fn small_time_norm_is_linear() {
    let ctx = preset_ctx(30.0, 2.332e-8);
    let horizon = measure::default_horizon(&ctx);
    let s0 = ctx.eigensystem().preset_states()[0];
    let pts: Vec<(f64, f64)> = (0..9)
        .map(|i| {
            let t = horizon * 1e-7 * 100f64.powf(i as f64 / 8.0);
            (t.ln(), measure::norm_at(&ctx, &s0, t).unwrap().norm.ln())
        })
        .collect();
    let (slope, _) = linear_fit(pts.iter().copied());
    assert!((slope - 1.0).abs() <= 0.1, "slope {slope}");
}

#[test]
fn preset_norm_at_reference_crossing() {
    let ctx = preset_ctx(30.0, 2.332e-8);
    let s0 = ctx.eigensystem().preset_states()[0];
    let n = measure::norm_at(&ctx, &s0, 8e-5).unwrap().norm;
    assert!((n / 1e-4 - 1.0).abs() < 1e-3, "{n}");
}

#[test]
fn crossing_is_first_up_crossing() {
    let ctx = preset_ctx(30.0, 2.332e-8);
    let policy = SearchPolicy::default();
    let t = measure::low_decoherence_time(&ctx, 1e-4, measure::default_horizon(&ctx), &policy).unwrap().unwrap();
    assert!(measure::d_of_t(&ctx, t, &policy).unwrap().norm >= 1e-4);
    assert!(measure::d_of_t(&ctx, t * (1.0 - 1e-3), &policy).unwrap().norm < 1e-4);
    for k in 1..50 {
        let early = t * k as f64 / 50.0;
        assert!(measure::d_of_t(&ctx, early, &policy).unwrap().norm < 1e-4);
    }
}

#[test]
fn no_crossing_without_coupling() {
    let ctx = preset_ctx(30.0, 0.0);
    let policy = SearchPolicy::default();
    assert_eq!(measure::low_decoherence_time(&ctx, 1e-4, 1.0, &policy).unwrap(), None);
    let r = measure::d_of_t(&ctx, 0.01, &policy).unwrap();
    assert_eq!(r.norm, 0.0);
}

#[test]
fn scan_refines_grid_crossing() {
    let ctx = preset_ctx(30.0, 2.332e-8);
    let times: Vec<f64> = (0..50).map(|i| i as f64 * 4e-6).collect();
    let r = measure::scan(&ctx, &times, 1e-4, &SearchPolicy::default()).unwrap();
    let t_ld = r.t_ld.unwrap();
    assert!((t_ld / 8e-5 - 1.0).abs() < 1e-3, "{t_ld}");
    for (i, d) in r.d_of_t.iter().enumerate() {
        for s in 0..3 {
            assert!(*d >= r.per_state_norms[s][i]);
        }
    }
}

#[test]
fn search_policy_rejects_degenerate_grids() {
    let ctx = preset_ctx(30.0, 2.332e-8);
    let bad = SearchPolicy { theta_points: 1, ..SearchPolicy::default() };
    assert!(measure::d_of_t(&ctx, 1e-4, &bad).is_err());
    assert!(measure::low_decoherence_time(&ctx, 0.0, 1.0, &SearchPolicy::default()).is_err());
}
