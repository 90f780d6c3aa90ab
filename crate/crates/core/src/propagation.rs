//! Reduced qubit dynamics under one symmetric split step
//! `e^{-iH_s t/2} e^{-i(H_I+H_B)t} e^{-iH_s t/2}`, traced over the thermal bath.
//!
//! The reduced state is linear in the initial state, so for a fixed time the
//! whole evolution is a 2×2 → 2×2 map. [`SplitStep`] builds that map once from
//! the eigenbasis expansion and applies it to any number of initial states.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::bath::BathSpec;
use crate::error::{require_finite, Result};
use crate::mat2::{Mat2, I, ZERO};
use crate::qubit::{DensityMatrix2, Eigensystem2, QubitParams};

#[derive(Debug, Clone, Serialize)]
pub struct PropagationContext {
    qubit: QubitParams,
    eig: Eigensystem2,
    bath: BathSpec,
}

impl PropagationContext {
    pub fn new(qubit: QubitParams, bath: BathSpec) -> Self {
        let eig = qubit.eigensystem();
        PropagationContext { qubit, eig, bath }
    }

    pub fn qubit(&self) -> &QubitParams {
        &self.qubit
    }

    pub fn eigensystem(&self) -> &Eigensystem2 {
        &self.eig
    }

    pub fn bath(&self) -> &BathSpec {
        &self.bath
    }

    pub fn with_bath(&self, bath: BathSpec) -> Self {
        PropagationContext { bath, ..self.clone() }
    }

    /// Precomputes the split-step map at time `t`.
    pub fn at(&self, t: f64) -> Result<SplitStep> {
        SplitStep::new(self, t)
    }
}

/// A linear map on 2×2 matrices: `out[m][n] = Σ_pq k[m][n][p][q] in[p][q]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    k: [[[[C64; 2]; 2]; 2]; 2],
}

impl Channel {
    pub fn apply(&self, x: &Mat2) -> Mat2 {
        let mut out = [[ZERO; 2]; 2];
        for (m, row) in out.iter_mut().enumerate() {
            for (n, o) in row.iter_mut().enumerate() {
                let k = &self.k[m][n];
                *o = k[0][0] * x.0[0][0] + k[0][1] * x.0[0][1] + k[1][0] * x.0[1][0] + k[1][1] * x.0[1][1];
            }
        }
        Mat2(out)
    }

    /// Re-expresses a map acting on eigenbasis components as one acting on
    /// computational-basis components.
    fn to_computational(&self, v: &Mat2) -> Channel {
        let vd = v.adjoint();
        let mut k = [[[[ZERO; 2]; 2]; 2]; 2];
        for p in 0..2 {
            for q in 0..2 {
                let mut e = Mat2::ZERO;
                e.0[p][q] = C64::new(1.0, 0.0);
                let out = *v * self.apply(&(vd * e * *v)) * vd;
                for (m, km) in k.iter_mut().enumerate() {
                    for (n, kmn) in km.iter_mut().enumerate() {
                        kmn[p][q] = out.0[m][n];
                    }
                }
            }
        }
        Channel { k }
    }
}

/// Eightfold eigenbasis expansion of the reduced split-step dynamics, with
/// the initial-state components `ρ_pq(0)` factored out. `bath(ξ, ς)` supplies
/// the thermal trace factor for the σ_z projector pair `(|ψ_ξ⟩, |ψ_ς⟩)`.
fn eigenbasis_expansion(eig: &Eigensystem2, t: f64, bath: impl Fn(usize, usize) -> C64) -> Channel {
    let phi = &eig.phi;
    // ⟨φ_a|φ_b⟩
    let ov = |a: usize, b: usize| phi[a].inner(&phi[b]);
    // ⟨φ_a|ψ_x⟩ and ⟨ψ_x|φ_b⟩
    let phi_psi = |a: usize, x: usize| phi[a].amplitudes()[x].conj();
    let psi_phi = |x: usize, b: usize| phi[b].amplitudes()[x];
    // half-step phases e^{∓i λ t/2}
    let half = |j: usize| C64::from_polar(1.0, 0.5 * eig.lambda[j] * t);
    let factors = [[bath(0, 0), bath(0, 1)], [bath(1, 0), bath(1, 1)]];

    let mut k = [[[[ZERO; 2]; 2]; 2]; 2];
    for m in 0..2 {
        for n in 0..2 {
            for p in 0..2 {
                for q in 0..2 {
                    let mut acc = ZERO;
                    for alpha in 0..2 {
                        for beta in 0..2 {
                            let left_phase = (half(alpha) * half(beta)).conj();
                            for xi in 0..2 {
                                let left = left_phase
                                    * ov(m, alpha)
                                    * phi_psi(alpha, xi)
                                    * psi_phi(xi, beta)
                                    * ov(beta, p);
                                if left == ZERO {
                                    continue;
                                }
                                for mu in 0..2 {
                                    for nu in 0..2 {
                                        let right_phase = half(mu) * half(nu);
                                        for sigma in 0..2 {
                                            let right = right_phase
                                                * ov(q, mu)
                                                * phi_psi(mu, sigma)
                                                * psi_phi(sigma, nu)
                                                * ov(nu, n);
                                            acc += left * right * factors[xi][sigma];
                                        }
                                    }
                                }
                            }
                        }
                    }
                    k[m][n][p][q] = acc;
                }
            }
        }
    }
    Channel { k }
}

/// The split-step dynamics at one fixed time.
#[derive(Debug, Clone, Copy)]
pub struct SplitStep {
    t: f64,
    reduced: Channel,
    excess: Channel,
    ideal: Mat2,
    w1: C64,
    w2: C64,
}

impl SplitStep {
    pub fn new(ctx: &PropagationContext, t: f64) -> Result<Self> {
        require_finite("time", t)?;
        let eig = &ctx.eig;
        let bath = &ctx.bath;
        let chi = eig.chi;
        let v = eig.basis_matrix();
        let reduced = eigenbasis_expansion(eig, t, |xi, s| bath.trace_factor(chi[xi], chi[s], t)).to_computational(&v);
        // Same expansion with (factor - 1): the unit factor reproduces the
        // interaction-free evolution exactly, so this is ρ(t) - ρ_ideal(t)
        // without cancellation.
        let excess =
            eigenbasis_expansion(eig, t, |xi, s| bath.trace_factor_excess(chi[xi], chi[s], t)).to_computational(&v);
        let (w1, w2) = bath.w_factors(t);
        Ok(SplitStep { t, reduced, excess, ideal: ctx.qubit.evolution(t), w1, w2 })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn w_factors(&self) -> (C64, C64) {
        (self.w1, self.w2)
    }

    pub fn reduced_density(&self, rho0: &DensityMatrix2) -> DensityMatrix2 {
        DensityMatrix2::from_matrix_unchecked(&self.reduced.apply(&rho0.to_matrix()))
    }

    pub fn ideal_density(&self, rho0: &DensityMatrix2) -> DensityMatrix2 {
        rho0.evolve(&self.ideal)
    }

    /// `ρ(t) - ρ_ideal(t)` in the computational basis, Hermitian and traceless.
    pub fn deviation_matrix(&self, rho0: &DensityMatrix2) -> Mat2 {
        let d = self.excess.apply(&rho0.to_matrix());
        // hermitize and remove the trace left by rounding
        let s11 = 0.5 * (d.0[1][1].re - d.0[0][0].re);
        let s10 = 0.5 * (d.0[1][0] + d.0[0][1].conj());
        Mat2::new(C64::from(-s11), s10.conj(), s10, C64::from(s11))
    }
}

/// Reduced density matrix after the split-step evolution of duration `t`.
pub fn reduced_density(ctx: &PropagationContext, rho0: &DensityMatrix2, t: f64) -> Result<DensityMatrix2> {
    Ok(ctx.at(t)?.reduced_density(rho0))
}

/// Interaction-free evolution `e^{-iH_s t} ρ_0 e^{iH_s t}`.
pub fn ideal_density(qubit: &QubitParams, rho0: &DensityMatrix2, t: f64) -> Result<DensityMatrix2> {
    require_finite("time", t)?;
    Ok(rho0.evolve(&qubit.evolution(t)))
}

/// Deviation components `(σ_11, σ_10)` at the degeneracy point `B_z = 0`,
/// in the eigenbasis of `H_s = -(E_J/2)σ_x`, for an initial state given by
/// its eigenbasis components `rho0_eig`.
///
/// This is the closed form obtained by carrying out the eightfold sum with
/// the degeneracy-point eigenvectors; it holds for complex `ρ_10` as well.
pub fn deviation_elements_closed_form(rho0_eig: &DensityMatrix2, e_j: f64, w1: C64, w2: C64, t: f64) -> (C64, C64) {
    let d = rho0_eig.rho00 - rho0_eig.rho11;
    let rot = C64::from_polar(1.0, 0.5 * t * e_j);
    let coherence = (rho0_eig.rho10 * rot).im;
    let s11 = 0.25 * d * (2.0 - w1 - w2) + 0.5 * I * coherence * (w1 - w2);
    let d10 = 0.5 * I * coherence * (w1 + w2 - 2.0) - 0.25 * d * (w1 - w2);
    (s11, d10 * rot)
}

/// The degeneracy-point deviation components exactly as they were published.
///
/// Kept for comparison only: the published expressions carry a missing factor
/// of `i` in the second term of `σ_11`, a flipped sign on the first term of
/// `σ_10`, and `2(1 + e^{itE_J})` where the expansion gives `2(1 - e^{itE_J})`.
/// They agree with [`deviation_elements_closed_form`] in modulus only for
/// initial states with `ρ_10 = 0`.
pub fn deviation_elements_as_published(rho0_eig: &DensityMatrix2, e_j: f64, w1: C64, w2: C64, t: f64) -> (C64, C64) {
    let d = rho0_eig.rho00 - rho0_eig.rho11;
    let r10 = rho0_eig.rho10;
    let s11 = 0.25 * d * (2.0 - w1 - w2) + 0.5 * r10 * (0.5 * t * e_j).sin() * (w2 - w1);
    let e_half = C64::from_polar(1.0, 0.5 * t * e_j);
    let e_full = C64::from_polar(1.0, t * e_j);
    let s10 = 0.25 * d * e_half * (w1 - w2) + 0.25 * r10 * (2.0 * (1.0 + e_full) + (w1 + w2) * (e_full - 1.0));
    (s11, s10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{BathGrid, CutoffSign, OhmicSpec};
    use crate::qubit::{preset_amplitudes, PureState2};
    use crate::units;

    const EJ: f64 = 51.8;

    fn preset_ctx(t_mk: f64, eta: f64) -> PropagationContext {
        let grid = BathGrid::standard();
        let wc = units::mode_frequency_to_energy(20.0, grid.convention).unwrap();
        let bath = BathSpec::build(grid, t_mk, OhmicSpec::new(eta, wc, CutoffSign::PaperLiteral).unwrap()).unwrap();
        PropagationContext::new(QubitParams::new(0.0, EJ, 0.5).unwrap(), bath)
    }

    fn strong_ctx(bz: f64) -> PropagationContext {
        let bath = BathSpec::from_modes(&[(1.0, 3.0), (2.5, -1.5), (0.4, 0.7)], 0.8).unwrap();
        PropagationContext::new(QubitParams::from_fields(bz, EJ).unwrap(), bath)
    }

    fn dist(a: &DensityMatrix2, b: &DensityMatrix2) -> f64 {
        (a.to_matrix() - b.to_matrix()).max_abs()
    }

    #[test]
    fn zero_coupling_is_exact_unitary() {
        let ctx = preset_ctx(30.0, 0.0);
        let rho0 = PureState2::from_bloch(0.7, 1.9).density();
        for t in [1e-5, 0.01, 0.3, 2.0] {
            let r = reduced_density(&ctx, &rho0, t).unwrap();
            let i = ideal_density(ctx.qubit(), &rho0, t).unwrap();
            assert!(dist(&r, &i) < 1e-12, "t = {t}");
            let dev = ctx.at(t).unwrap().deviation_matrix(&rho0);
            assert_eq!(dev.max_abs(), 0.0);
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let ctx = strong_ctx(1.1);
        let rho0 = PureState2::from_bloch(2.0, 0.3).density();
        let r = reduced_density(&ctx, &rho0, 0.0).unwrap();
        assert!(dist(&r, &rho0) < 1e-14);
    }

    #[test]
    fn ideal_evolution_cases() {
        let q = QubitParams::new(0.0, EJ, 0.5).unwrap();
        let rho0 = PureState2::basis0().density();
        let flipped = ideal_density(&q, &rho0, std::f64::consts::PI / EJ).unwrap();
        assert!(dist(&flipped, &PureState2::basis1().density()) < 1e-14);
        let eig = q.eigensystem().phi[0].density();
        for t in [0.1, 3.3, 40.0] {
            assert!(dist(&ideal_density(&q, &eig, t).unwrap(), &eig) < 1e-13);
        }
    }

    #[test]
    fn deviation_matches_difference_of_paths() {
        let ctx = strong_ctx(-0.6);
        for (th, ph, t) in [(0.3, 0.1, 0.004), (1.9, 4.0, 0.02), (3.0, 2.2, 0.2)] {
            let rho0 = PureState2::from_bloch(th, ph).density();
            let step = ctx.at(t).unwrap();
            let diff = step.reduced_density(&rho0).to_matrix() - step.ideal_density(&rho0).to_matrix();
            assert!((diff - step.deviation_matrix(&rho0)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn outputs_are_valid_states() {
        let ctx = strong_ctx(0.9);
        for k in 0..50 {
            let rho0 = PureState2::from_bloch(0.06 * k as f64, 0.4 * k as f64).density();
            let r = reduced_density(&ctx, &rho0, 0.01 * k as f64).unwrap();
            r.validate(1e-10).unwrap();
        }
    }

    #[test]
    fn zero_coupling_composes_in_time() {
        let ctx = strong_ctx(2.0).with_bath(BathSpec::from_modes(&[(1.0, 0.0)], 1.0).unwrap());
        let rho0 = PureState2::from_bloch(1.0, 0.5).density();
        let (t1, t2) = (0.013, 0.071);
        let whole = reduced_density(&ctx, &rho0, t1 + t2).unwrap();
        let parts = reduced_density(&ctx, &reduced_density(&ctx, &rho0, t1).unwrap(), t2).unwrap();
        assert!(dist(&whole, &parts) < 1e-10);
    }

    fn general_path_eig(ctx: &PropagationContext, rho0_eig: &DensityMatrix2, t: f64) -> Mat2 {
        let v = ctx.eigensystem().basis_matrix();
        let step = ctx.at(t).unwrap();
        let dev = step.deviation_matrix(&rho0_eig.from_basis(&v));
        v.adjoint() * dev * v
    }

    #[test]
    fn closed_form_trivial_cases() {
        let one = C64::new(1.0, 0.0);
        let rho = PureState2::from_bloch(1.0, 0.4).density();
        let (a, b) = deviation_elements_closed_form(&rho, EJ, one, one, 0.3);
        assert_eq!((a, b), (ZERO, ZERO));
        let w = C64::new(0.9, 0.2);
        let (a, b) = deviation_elements_closed_form(&DensityMatrix2::maximally_mixed(), EJ, w, w.conj(), 0.3);
        assert!(a.norm() < 1e-16 && b.norm() < 1e-16);
    }

    #[test]
    fn closed_form_matches_general_path() {
        let mut ctx = preset_ctx(30.0, 2.3e-8);
        for round in 0..2 {
            if round == 1 {
                ctx = ctx.with_bath(BathSpec::from_modes(&[(0.5, 0.8), (1.5, 0.3)], 0.6).unwrap());
            }
            for t in [8e-5, 3e-3, 0.05] {
                let (w1, w2) = ctx.bath().w_factors(t);
                let mut states: Vec<PureState2> = preset_amplitudes().to_vec();
                states.push(PureState2::from_bloch(1.2, 2.5));
                for s in states {
                    let rho_eig = s.density();
                    let general = general_path_eig(&ctx, &rho_eig, t);
                    let (s11, s10) = deviation_elements_closed_form(&rho_eig, EJ, w1, w2, t);
                    let scale = general.max_abs().max(1e-300);
                    assert!((s11 - general.get(1, 1)).norm() / scale < 1e-10, "t={t} {s11} vs {}", general.get(1, 1));
                    assert!((s10 - general.get(1, 0)).norm() / scale < 1e-10, "t={t} {s10} vs {}", general.get(1, 0));
                }
            }
        }
    }

    #[test]
    fn published_form_disagrees_once_coherences_enter() {
        let ctx = preset_ctx(30.0, 1e-4);
        let t = 0.01;
        let (w1, w2) = ctx.bath().w_factors(t);
        // diagonal initial state: same moduli
        let rho_eig = preset_amplitudes()[0].density();
        let (p11, p10) = deviation_elements_as_published(&rho_eig, EJ, w1, w2, t);
        let (c11, c10) = deviation_elements_closed_form(&rho_eig, EJ, w1, w2, t);
        assert!((p11 - c11).norm() < 1e-15);
        assert!((p10.norm() - c10.norm()).abs() < 1e-15);
        // with a coherence the published σ_10 is not even zero at W = 1
        let rho_eig = preset_amplitudes()[2].density();
        let one = C64::new(1.0, 0.0);
        let (_, p10) = deviation_elements_as_published(&rho_eig, EJ, one, one, t);
        assert!(p10.norm() > 0.1);
    }
}
