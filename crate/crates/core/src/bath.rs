//! Finite bosonic bath with number-conserving dephasing coupling
//! `σ_z Σ_j g'_j b†_j b_j`, prepared in a thermal product state.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, require_finite, require_positive, Result};
use crate::units::{self, FrequencyConvention};

/// Sign of the exponent in the ohmic cutoff factor `exp(±ω/ω_c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffSign {
    /// `exp(+ω/ω_c)`
    #[default]
    PaperLiteral,
    /// `exp(-ω/ω_c)`, the usual exponential cutoff.
    Standard,
}

impl CutoffSign {
    fn sign(self) -> f64 {
        match self {
            CutoffSign::PaperLiteral => 1.0,
            CutoffSign::Standard => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OhmicSpec {
    pub eta: f64,
    /// Cutoff energy in μeV.
    pub omega_c: f64,
    pub cutoff_sign: CutoffSign,
}

impl OhmicSpec {
    pub fn new(eta: f64, omega_c: f64, cutoff_sign: CutoffSign) -> Result<Self> {
        if !(eta.is_finite() && eta >= 0.0) {
            return domain(format!("eta must be non-negative, got {eta}"));
        }
        require_positive("omega_c", omega_c)?;
        Ok(OhmicSpec { eta, omega_c, cutoff_sign })
    }
}

/// Ohmic spectral weight `g²(ω) D(ω) = η ω exp(±ω/ω_c)`.
pub fn ohmic_weight(omega: f64, spec: &OhmicSpec) -> f64 {
    spec.eta * omega * (spec.cutoff_sign.sign() * omega / spec.omega_c).exp()
}

/// Damping coefficient `η = (R/R_Q)(C_t/C_J)²` from circuit values in Ω and F.
pub fn damping_eta(r_ohm: f64, c_t: f64, c_j: f64) -> Result<f64> {
    require_positive("R", r_ohm)?;
    require_positive("C_t", c_t)?;
    require_positive("C_J", c_j)?;
    Ok(r_ohm / units::resistance_quantum() * (c_t / c_j).powi(2))
}

/// Dephasing coupling `g'_j = ½ √η exp(±ω_j / 2ω_c)` under the density-of-states
/// approximation `D(ω) ≈ ħω`. The dimensionless result is read as μeV.
pub fn coupling_from_ohmic(omega_j: f64, spec: &OhmicSpec) -> Result<f64> {
    require_positive("omega_j", omega_j)?;
    if spec.eta < 0.0 {
        return domain("eta must be non-negative");
    }
    Ok(0.5 * spec.eta.sqrt() * (spec.cutoff_sign.sign() * omega_j / (2.0 * spec.omega_c)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BathMode {
    pub index: usize,
    /// Bare frequency ω_j in μeV.
    pub omega: f64,
    /// Coupling g'_j in μeV.
    pub g_prime: f64,
    /// Shifted frequency ω'_j = ω_j + g'_j. Stored only; it cancels from the
    /// reduced dynamics.
    pub omega_prime: f64,
}

impl BathMode {
    pub fn new(index: usize, omega: f64, g_prime: f64) -> Result<Self> {
        require_positive("mode frequency", omega)?;
        require_finite("g'", g_prime)?;
        Ok(BathMode { index, omega, g_prime, omega_prime: omega + g_prime })
    }
}

/// Linear frequency grid for modes `j = n0..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BathGrid {
    pub n0: usize,
    pub n: usize,
    pub f_low_mhz: f64,
    pub f_high_mhz: f64,
    pub convention: FrequencyConvention,
}

impl BathGrid {
    /// Modes `j = 1..=20` spanning 1–20 MHz.
    pub fn standard() -> Self {
        BathGrid { n0: 1, n: 20, f_low_mhz: 1.0, f_high_mhz: 20.0, convention: FrequencyConvention::Angular }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n0 < 1 || self.n < self.n0 {
            return domain(format!("need N >= N0 >= 1, got N0 = {}, N = {}", self.n0, self.n));
        }
        require_positive("f_low", self.f_low_mhz)?;
        require_positive("f_high", self.f_high_mhz)?;
        if self.f_low_mhz > self.f_high_mhz {
            return domain(format!("f_low = {} exceeds f_high = {}", self.f_low_mhz, self.f_high_mhz));
        }
        Ok(())
    }

    /// Frequency of mode `j` in MHz: linear from `f_low` at `n0` to `f_high` at `n`.
    pub fn frequency_mhz(&self, j: usize) -> f64 {
        if self.n == self.n0 {
            return self.f_low_mhz;
        }
        let s = (j - self.n0) as f64 / (self.n - self.n0) as f64;
        self.f_low_mhz + s * (self.f_high_mhz - self.f_low_mhz)
    }

    pub fn len(&self) -> usize {
        self.n - self.n0 + 1
    }

    pub fn is_empty(&self) -> bool {
        self.n < self.n0
    }
}

/// Per-mode thermal trace factor in log form,
/// `ln[(1 - q) / (1 - q e^{iφ})]` with `q = e^{-βω}` and `φ = g'·Δχ·t`.
///
/// Both the modulus and the phase are formed without cancellation, so the
/// result stays accurate when `βω` or `φ` are tiny.
pub(crate) fn ln_mode_factor(beta_omega: f64, phase: f64) -> C64 {
    if phase == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let q = (-beta_omega).exp();
    let one_minus_q = -(-beta_omega).exp_m1();
    let s2 = (0.5 * phase).sin().powi(2);
    // |1 - q e^{iφ}|² = (1-q)² + 4 q sin²(φ/2)
    let ln_mod = -0.5 * (4.0 * q * s2 / (one_minus_q * one_minus_q)).ln_1p();
    let arg = (q * phase.sin()).atan2(one_minus_q + 2.0 * q * s2);
    C64::new(ln_mod, arg)
}

/// `e^z - 1` without cancellation for small `|z|`.
pub(crate) fn complex_exp_m1(z: C64) -> C64 {
    let (s, c) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    C64::new(z.re.exp_m1() * c - 2.0 * half * half, z.re.exp() * s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BathSpec {
    modes: Vec<BathMode>,
    beta: f64,
    temperature_mk: f64,
    ohmic: Option<OhmicSpec>,
    grid: Option<BathGrid>,
}

impl BathSpec {
    /// Bath on a linear mode grid with couplings from the ohmic prescription.
    pub fn build(grid: BathGrid, temperature_mk: f64, ohmic: OhmicSpec) -> Result<Self> {
        grid.validate()?;
        let beta = units::temperature_to_beta(temperature_mk)?;
        let mut modes = Vec::with_capacity(grid.len());
        for j in grid.n0..=grid.n {
            let omega = units::mode_frequency_to_energy(grid.frequency_mhz(j), grid.convention)?;
            modes.push(BathMode::new(j, omega, coupling_from_ohmic(omega, &ohmic)?)?);
        }
        Ok(BathSpec { modes, beta, temperature_mk, ohmic: Some(ohmic), grid: Some(grid) })
    }

    /// Bath from explicit `(ω_j, g'_j)` pairs in μeV at inverse temperature `beta`.
    pub fn from_modes(modes: &[(f64, f64)], beta: f64) -> Result<Self> {
        require_positive("beta", beta)?;
        let mut built = modes
            .iter()
            .enumerate()
            .map(|(i, &(w, g))| BathMode::new(i + 1, w, g))
            .collect::<Result<Vec<_>>>()?;
        built.sort_by(|a, b| a.omega.total_cmp(&b.omega));
        Ok(BathSpec { modes: built, beta, temperature_mk: units::beta_to_temperature(beta)?, ohmic: None, grid: None })
    }

    /// Replaces every coupling with the given list (one value per mode, in order).
    pub fn with_couplings(mut self, g_prime: &[f64]) -> Result<Self> {
        if g_prime.len() != self.modes.len() {
            return domain(format!("{} coupling overrides given for {} modes", g_prime.len(), self.modes.len()));
        }
        for (m, &g) in self.modes.iter_mut().zip(g_prime) {
            *m = BathMode::new(m.index, m.omega, g)?;
        }
        Ok(self)
    }

    /// Same modes at a different temperature.
    pub fn at_temperature(&self, temperature_mk: f64) -> Result<Self> {
        let beta = units::temperature_to_beta(temperature_mk)?;
        Ok(BathSpec { beta, temperature_mk, ..self.clone() })
    }

    pub fn modes(&self) -> &[BathMode] {
        &self.modes
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn temperature_mk(&self) -> f64 {
        self.temperature_mk
    }

    pub fn ohmic(&self) -> Option<&OhmicSpec> {
        self.ohmic.as_ref()
    }

    pub fn grid(&self) -> Option<&BathGrid> {
        self.grid.as_ref()
    }

    /// Thermal occupation ratio `q_j = e^{-βω_j}` of each mode.
    pub fn occupation_ratios(&self) -> Vec<f64> {
        self.modes.iter().map(|m| (-self.beta * m.omega).exp()).collect()
    }

    pub fn is_decoupled(&self) -> bool {
        self.modes.iter().all(|m| m.g_prime == 0.0)
    }

    /// `ln` of the bath trace factor for a σ_z eigenvalue difference `chi_diff = χ_ς - χ_ξ`.
    pub fn ln_trace_factor(&self, chi_diff: f64, t: f64) -> C64 {
        self.modes
            .iter()
            .map(|m| ln_mode_factor(self.beta * m.omega, m.g_prime * chi_diff * t))
            .sum()
    }

    /// `Π_j (1 - e^{-βω_j}) / (1 - e^{i g'_j (χ_ς - χ_ξ) t} e^{-βω_j})`.
    pub fn trace_factor(&self, chi_xi: f64, chi_sigma: f64, t: f64) -> C64 {
        if chi_xi == chi_sigma {
            return C64::new(1.0, 0.0);
        }
        self.ln_trace_factor(chi_sigma - chi_xi, t).exp()
    }

    /// `trace_factor - 1`, accurate when the factor is close to one.
    pub fn trace_factor_excess(&self, chi_xi: f64, chi_sigma: f64, t: f64) -> C64 {
        if chi_xi == chi_sigma {
            return C64::new(0.0, 0.0);
        }
        complex_exp_m1(self.ln_trace_factor(chi_sigma - chi_xi, t))
    }

    /// `(W_1, W_2)`: the trace factors for `χ_ς - χ_ξ = +2` and `-2`.
    pub fn w_factors(&self, t: f64) -> (C64, C64) {
        (self.trace_factor(-1.0, 1.0, t), self.trace_factor(1.0, -1.0, t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn preset_bath(t_mk: f64, eta: f64) -> BathSpec {
        let grid = BathGrid::standard();
        let wc = units::mode_frequency_to_energy(grid.f_high_mhz, grid.convention).unwrap();
        BathSpec::build(grid, t_mk, OhmicSpec::new(eta, wc, CutoffSign::PaperLiteral).unwrap()).unwrap()
    }

    #[test]
    fn ohmic_weight_cases() {
        let zero = OhmicSpec::new(0.0, 3.0, CutoffSign::PaperLiteral).unwrap();
        assert_eq!(ohmic_weight(1.7, &zero), 0.0);
        let lit = OhmicSpec::new(0.3, 2.0, CutoffSign::PaperLiteral).unwrap();
        assert!((ohmic_weight(2.0, &lit) - 0.3 * 2.0 * std::f64::consts::E).abs() < 1e-14);
        let std_ = OhmicSpec { cutoff_sign: CutoffSign::Standard, ..lit };
        assert!((ohmic_weight(2.0, &std_) - 0.3 * 2.0 / std::f64::consts::E).abs() < 1e-14);
        assert!(OhmicSpec::new(-1.0, 2.0, CutoffSign::Standard).is_err());
        assert!(OhmicSpec::new(1.0, 0.0, CutoffSign::Standard).is_err());
    }

    #[test]
    fn damping_eta_cases() {
        let rq = units::resistance_quantum();
        assert!((damping_eta(rq, 1e-15, 1e-15).unwrap() - 1.0).abs() < 1e-14);
        // 50/6453.2 × 0.01
        let eta = damping_eta(50.0, 1e-16, 1e-15).unwrap();
        assert!((eta - 7.748e-5).abs() < 1e-8, "{eta}");
        assert!(damping_eta(50.0, 0.0, 1e-15).is_err());
    }

    #[test]
    fn coupling_cases() {
        let zero = OhmicSpec::new(0.0, 1.0, CutoffSign::PaperLiteral).unwrap();
        assert_eq!(coupling_from_ohmic(0.5, &zero).unwrap(), 0.0);
        let one = OhmicSpec::new(1.0, 1.0, CutoffSign::PaperLiteral).unwrap();
        let g = coupling_from_ohmic(1.0, &one).unwrap();
        assert!((g - 0.824_360_635_350_064).abs() < 1e-12, "{g}");
        assert!((coupling_from_ohmic(1e-12, &one).unwrap() - 0.5).abs() < 1e-12);
        assert!(coupling_from_ohmic(0.0, &one).is_err());
    }

    #[test]
    fn standard_grid() {
        let b = preset_bath(30.0, 1e-8);
        assert_eq!(b.modes().len(), 20);
        let w1 = units::mode_frequency_to_energy(1.0, FrequencyConvention::Angular).unwrap();
        for (j, m) in b.modes().iter().enumerate() {
            assert_eq!(m.index, j + 1);
            assert!((m.omega - (j + 1) as f64 * w1).abs() < 1e-15);
            assert_eq!(m.omega_prime, m.omega + m.g_prime);
        }
        let cold = preset_bath(0.3, 1e-8);
        assert_eq!(cold.modes(), b.modes());
        assert!((cold.beta() / b.beta() - 100.0).abs() < 1e-10);
    }

    #[test]
    fn single_mode_grid_and_bad_bounds() {
        let grid = BathGrid { n0: 1, n: 1, f_low_mhz: 3.0, f_high_mhz: 3.0, convention: FrequencyConvention::Angular };
        let spec = OhmicSpec::new(1e-6, 1.0, CutoffSign::PaperLiteral).unwrap();
        let b = BathSpec::build(grid, 30.0, spec).unwrap();
        assert_eq!(b.modes().len(), 1);
        assert!((b.modes()[0].omega - units::mode_frequency_to_energy(3.0, grid.convention).unwrap()).abs() < 1e-18);
        for bad in [
            BathGrid { n0: 0, ..grid },
            BathGrid { n0: 3, n: 2, ..grid },
            BathGrid { f_low_mhz: 5.0, f_high_mhz: 4.0, ..grid },
        ] {
            assert!(BathSpec::build(bad, 30.0, spec).is_err());
        }
        assert!(BathSpec::build(grid, 0.0, spec).is_err());
    }

    #[test]
    fn trivial_trace_factors() {
        let b = preset_bath(30.0, 1e-6);
        assert_eq!(b.trace_factor(1.0, 1.0, 3.0), C64::new(1.0, 0.0));
        assert_eq!(b.trace_factor(1.0, -1.0, 0.0), C64::new(1.0, 0.0));
        assert_eq!(b.w_factors(0.0), (C64::new(1.0, 0.0), C64::new(1.0, 0.0)));
        let free = b.clone().with_couplings(&[0.0; 20]).unwrap();
        for t in [0.1, 1.0, 1e3] {
            assert_eq!(free.w_factors(t), (C64::new(1.0, 0.0), C64::new(1.0, 0.0)));
        }
    }

    #[test]
    fn single_mode_factor_matches_direct_formula() {
        // βω = 1, g' = 0.01, t = 1, χ difference 2
        let b = BathSpec::from_modes(&[(1.0, 0.01)], 1.0).unwrap();
        let q = (-1.0f64).exp();
        let direct = C64::from(1.0 - q) / (C64::from(1.0) - C64::from_polar(q, 0.02));
        let got = b.trace_factor(-1.0, 1.0, 1.0);
        assert!((got - direct).norm() < 1e-15);
    }

    #[test]
    fn w2_is_conjugate_of_w1() {
        let b = preset_bath(30.0, 2.3e-8);
        for t in [8e-5, 1e-3, 0.05, 2.0] {
            let (w1, w2) = b.w_factors(t);
            assert_eq!(w2, w1.conj());
            assert!(w1.norm() <= 1.0);
            let (wm, _) = b.w_factors(-t);
            assert!((wm - w1.conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn excess_is_accurate_for_tiny_phases() {
        let b = BathSpec::from_modes(&[(1e-3, 1e-7)], 0.5).unwrap();
        let t = 1e-6;
        let ex = b.trace_factor_excess(-1.0, 1.0, t);
        // first order: i·2g't·n̄, n̄ = 1/(e^{βω}-1)
        let nbar = 1.0 / (0.5e-3f64).exp_m1();
        let expect = 2.0 * 1e-7 * t * nbar;
        assert!((ex.im - expect).abs() / expect < 1e-9, "{ex} vs {expect}");
    }

    #[test]
    fn huge_beta_omega_does_not_overflow() {
        let b = BathSpec::from_modes(&[(50.0, 0.3), (1e3, 2.0)], 40.0).unwrap();
        let (w1, _) = b.w_factors(1.3);
        assert!(w1.is_finite());
        assert!((w1 - C64::new(1.0, 0.0)).norm() < 1e-12);
    }
}
