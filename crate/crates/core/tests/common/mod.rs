#![allow(dead_code)]

use decosim::bath::BathSpec;
use decosim::config::ScenarioConfig;
use decosim::mat2::Mat2;
use decosim::propagation::PropagationContext;
use decosim::qubit::{PureState2, QubitParams};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

pub fn preset_ctx(t_mk: f64, eta: f64) -> PropagationContext {
    let mut cfg = ScenarioConfig::fig1();
    cfg.bath.t_mk = t_mk;
    cfg.bath.eta = eta;
    cfg.context().unwrap()
}

/// `(βω, g')` pairs and `β`.
pub fn bath_strategy(max_modes: usize) -> impl Strategy<Value = BathSpec> {
    (prop::collection::vec((0.05f64..5.0, -1.0f64..1.0, -3.0f64..0.5), 1..=max_modes), -1.0f64..1.0).prop_map(
        |(modes, log_beta)| {
            let beta = 10f64.powf(log_beta);
            let pairs: Vec<(f64, f64)> = modes.iter().map(|&(x, s, e)| (x / beta, s * 10f64.powf(e))).collect();
            BathSpec::from_modes(&pairs, beta).unwrap()
        },
    )
}

pub fn qubit_strategy() -> impl Strategy<Value = QubitParams> {
    (0.0f64..100.0, 1.0f64..100.0, 0.0f64..1.0).prop_map(|(e_ch, e_j, n_g)| QubitParams::new(e_ch, e_j, n_g).unwrap())
}

pub fn state_strategy() -> impl Strategy<Value = PureState2> {
    (0.0f64..std::f64::consts::PI, 0.0f64..std::f64::consts::TAU).prop_map(|(t, p)| PureState2::from_bloch(t, p))
}

pub fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

pub fn traceless_hermitian(s11: f64, re10: f64, im10: f64) -> Mat2 {
    let s10 = C64::new(re10, im10);
    Mat2::new(C64::from(-s11), s10.conj(), s10, C64::from(s11))
}
