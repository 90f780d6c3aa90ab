//! Josephson charge qubit as an effective two-level system.
//!
//! The truncated Hamiltonian is `H_s = -½ B_z σ_z - ½ B_x σ_x` with
//! `B_z = E_ch (1 - 2 n_g)` and `B_x = E_J`. Energies are in μeV.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{domain, require_finite, require_positive, Error, Result};
use crate::mat2::{Mat2, I, ONE, ZERO};
use crate::units;

/// Tolerance on |a0|² + |a1|² for a pure state.
pub const STATE_NORM_TOL: f64 = 1e-12;
/// Tolerance on trace and positivity of a density matrix.
pub const DENSITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitParams {
    e_ch: f64,
    e_j: f64,
    n_g: f64,
    b_z: f64,
    b_x: f64,
}

impl QubitParams {
    /// Builds the qubit from its charging energy, Josephson energy and gate charge.
    pub fn new(e_ch: f64, e_j: f64, n_g: f64) -> Result<Self> {
        require_positive("E_J", e_j)?;
        if !(e_ch.is_finite() && e_ch >= 0.0) {
            return domain(format!("E_ch must be non-negative, got {e_ch}"));
        }
        require_finite("n_g", n_g)?;
        // exact zero at the degeneracy point
        let b_z = if n_g == 0.5 { 0.0 } else { e_ch * (1.0 - 2.0 * n_g) };
        Ok(QubitParams { e_ch, e_j, n_g, b_z, b_x: e_j })
    }

    /// Builds the qubit directly from its effective fields. `B_x = 0` is
    /// accepted here (a pure σ_z Hamiltonian), unlike in [`QubitParams::new`].
    pub fn from_fields(b_z: f64, b_x: f64) -> Result<Self> {
        require_finite("B_z", b_z)?;
        if !(b_x.is_finite() && b_x >= 0.0) {
            return domain(format!("B_x must be non-negative, got {b_x}"));
        }
        let (e_ch, n_g) = if b_z >= 0.0 { (b_z, 0.0) } else { (-b_z, 1.0) };
        Ok(QubitParams { e_ch, e_j: b_x, n_g, b_z, b_x })
    }

    pub fn e_ch(&self) -> f64 {
        self.e_ch
    }
    pub fn e_j(&self) -> f64 {
        self.e_j
    }
    pub fn n_g(&self) -> f64 {
        self.n_g
    }
    pub fn b_z(&self) -> f64 {
        self.b_z
    }
    pub fn b_x(&self) -> f64 {
        self.b_x
    }

    pub fn hamiltonian(&self) -> Mat2 {
        Mat2::pauli_z().scale(C64::from(-0.5 * self.b_z)) + Mat2::pauli_x().scale(C64::from(-0.5 * self.b_x))
    }

    /// `exp(-i H_s t)` in closed form.
    pub fn evolution(&self, t: f64) -> Mat2 {
        Mat2::exp_pauli(0.0, -0.5 * self.b_x, 0.0, -0.5 * self.b_z, t)
    }

    pub fn eigensystem(&self) -> Eigensystem2 {
        Eigensystem2::of(self)
    }
}

/// A normalized two-component state vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PureState2 {
    a0: C64,
    a1: C64,
}

impl PureState2 {
    /// Validating constructor; the amplitudes must already be normalized.
    pub fn new(a0: C64, a1: C64) -> Result<Self> {
        let n = a0.norm_sqr() + a1.norm_sqr();
        if !n.is_finite() || (n - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::InvalidState(format!("|a0|²+|a1|² = {n}, expected 1")));
        }
        Ok(PureState2 { a0, a1 })
    }

    pub fn normalized(a0: C64, a1: C64) -> Result<Self> {
        let n = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidState("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(PureState2 { a0: a0 / n, a1: a1 / n })
    }

    /// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        let (s, c) = (0.5 * theta).sin_cos();
        PureState2 { a0: C64::from(c), a1: C64::from_polar(s, phi) }
    }

    pub fn basis0() -> Self {
        PureState2 { a0: ONE, a1: ZERO }
    }

    pub fn basis1() -> Self {
        PureState2 { a0: ZERO, a1: ONE }
    }

    pub fn a0(&self) -> C64 {
        self.a0
    }

    pub fn a1(&self) -> C64 {
        self.a1
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        [self.a0, self.a1]
    }

    pub fn inner(&self, other: &PureState2) -> C64 {
        self.a0.conj() * other.a0 + self.a1.conj() * other.a1
    }

    /// |⟨self|other⟩|²
    pub fn fidelity(&self, other: &PureState2) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Bloch angles `(θ, φ)` with θ ∈ [0, π], φ ∈ [0, 2π).
    pub fn bloch_angles(&self) -> (f64, f64) {
        let theta = 2.0 * self.a1.norm().atan2(self.a0.norm());
        let mut phi = self.a1.arg() - self.a0.arg();
        if self.a0.norm() == 0.0 || self.a1.norm() == 0.0 {
            phi = 0.0;
        }
        (theta, phi.rem_euclid(std::f64::consts::TAU))
    }

    pub fn with_global_phase(&self, phase: f64) -> Self {
        let p = C64::from_polar(1.0, phase);
        PureState2 { a0: self.a0 * p, a1: self.a1 * p }
    }

    pub fn density(&self) -> DensityMatrix2 {
        DensityMatrix2 {
            rho00: self.a0.norm_sqr(),
            rho11: self.a1.norm_sqr(),
            rho10: self.a1 * self.a0.conj(),
        }
    }
}

/// The three initial states used for the figure scenarios, as amplitudes on
/// the eigenbasis `(|φ_0⟩, |φ_1⟩)` of `H_s`.
pub fn preset_amplitudes() -> [PureState2; 3] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [
        PureState2 { a0: ONE, a1: ZERO },
        PureState2 { a0: C64::from(0.75f64.sqrt()), a1: C64::from(0.5) },
        PureState2 { a0: C64::from(h), a1: C64::from(h) },
    ]
}

/// Eigendecomposition of `H_s`, ordered so that `λ_0 ≥ λ_1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigensystem2 {
    pub lambda: [f64; 2],
    pub phi: [PureState2; 2],
    /// Eigenvalues of σ_z for |ψ_0⟩ = |0⟩ and |ψ_1⟩ = |1⟩.
    pub chi: [f64; 2],
}

impl Eigensystem2 {
    pub fn of(q: &QubitParams) -> Self {
        let (bz, bx) = (q.b_z(), q.b_x());
        let r = bz.hypot(bx);
        if r == 0.0 {
            return Eigensystem2 {
                lambda: [0.0, 0.0],
                phi: [PureState2::basis0(), PureState2::basis1()],
                chi: [1.0, -1.0],
            };
        }
        // H = -½ r (cos θ σz + sin θ σx)
        let theta = bx.atan2(bz);
        let (s, c) = (0.5 * theta).sin_cos();
        Eigensystem2 {
            lambda: [0.5 * r, -0.5 * r],
            phi: [
                PureState2 { a0: C64::from(s), a1: C64::from(-c) },
                PureState2 { a0: C64::from(c), a1: C64::from(s) },
            ],
            chi: [1.0, -1.0],
        }
    }

    /// Unitary whose columns are `|φ_0⟩, |φ_1⟩` in the computational basis.
    pub fn basis_matrix(&self) -> Mat2 {
        Mat2::from_columns(self.phi[0].amplitudes(), self.phi[1].amplitudes())
    }

    /// State `c0|φ_0⟩ + c1|φ_1⟩` expressed in the computational basis.
    pub fn from_eigen_coords(&self, coords: &PureState2) -> PureState2 {
        let [a0, a1] = self.basis_matrix().apply(coords.amplitudes());
        PureState2 { a0, a1 }
    }

    /// Eigenbasis coordinates of a computational-basis state.
    pub fn to_eigen_coords(&self, state: &PureState2) -> PureState2 {
        let [a0, a1] = self.basis_matrix().adjoint().apply(state.amplitudes());
        PureState2 { a0, a1 }
    }

    /// The preset initial states, in the computational basis.
    pub fn preset_states(&self) -> [PureState2; 3] {
        preset_amplitudes().map(|c| self.from_eigen_coords(&c))
    }
}

/// A 2×2 density matrix stored as its independent components; `ρ_01` is the
/// conjugate of `ρ_10`, so Hermiticity holds by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityMatrix2 {
    pub rho00: f64,
    pub rho11: f64,
    pub rho10: C64,
}

impl DensityMatrix2 {
    /// Validating constructor: unit trace and positivity within [`DENSITY_TOL`].
    pub fn new(rho00: f64, rho11: f64, rho10: C64) -> Result<Self> {
        let rho = DensityMatrix2 { rho00, rho11, rho10 };
        rho.validate(DENSITY_TOL)?;
        Ok(rho)
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix2 { rho00: 0.5, rho11: 0.5, rho10: ZERO }
    }

    /// Takes the Hermitian part of `m` without validating it.
    pub fn from_matrix_unchecked(m: &Mat2) -> Self {
        DensityMatrix2 {
            rho00: m.get(0, 0).re,
            rho11: m.get(1, 1).re,
            rho10: 0.5 * (m.get(1, 0) + m.get(0, 1).conj()),
        }
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        if !(self.rho00.is_finite() && self.rho11.is_finite() && self.rho10.re.is_finite() && self.rho10.im.is_finite()) {
            return Err(Error::InvalidState("non-finite density matrix entry".into()));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > tol {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let (lo, _) = self.eigenvalues();
        if lo < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {lo}")));
        }
        Ok(())
    }

    pub fn rho01(&self) -> C64 {
        self.rho10.conj()
    }

    pub fn trace(&self) -> f64 {
        self.rho00 + self.rho11
    }

    /// Eigenvalues `(smaller, larger)`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.rho00 + self.rho11);
        let half = (0.5 * (self.rho00 - self.rho11)).hypot(self.rho10.norm());
        (mean - half, mean + half)
    }

    pub fn to_matrix(&self) -> Mat2 {
        Mat2::new(C64::from(self.rho00), self.rho01(), self.rho10, C64::from(self.rho11))
    }

    /// Components in the basis given by the columns of the unitary `v`.
    pub fn in_basis(&self, v: &Mat2) -> DensityMatrix2 {
        DensityMatrix2::from_matrix_unchecked(&(v.adjoint() * self.to_matrix() * *v))
    }

    /// Inverse of [`DensityMatrix2::in_basis`].
    pub fn from_basis(&self, v: &Mat2) -> DensityMatrix2 {
        DensityMatrix2::from_matrix_unchecked(&v.conjugate(&self.to_matrix()))
    }

    /// `u ρ u†`
    pub fn evolve(&self, u: &Mat2) -> DensityMatrix2 {
        DensityMatrix2::from_matrix_unchecked(&u.conjugate(&self.to_matrix()))
    }
}

/// The single-qubit rotation `exp(i E_J t σ_x / 2)` produced by parking the
/// qubit at the degeneracy point for a time `t`.
pub fn gate_unitary(e_j: f64, t: f64) -> Mat2 {
    let (s, c) = (0.5 * t * e_j).sin_cos();
    Mat2::new(C64::from(c), I * s, I * s, C64::from(c))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateTime {
    /// In units of ħ/μeV.
    pub internal: f64,
    pub seconds: f64,
}

impl GateTime {
    pub fn picoseconds(&self) -> f64 {
        self.seconds * 1e12
    }
}

/// Elementary gate time ħ/E_J.
pub fn gate_time(e_j: f64) -> Result<GateTime> {
    let e = require_positive("E_J", e_j)?;
    let internal = 1.0 / e;
    Ok(GateTime { internal, seconds: units::time_to_seconds(internal)? })
}
