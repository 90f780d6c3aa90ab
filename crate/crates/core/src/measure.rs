//! Decoherence measure: the deviation `σ(t) = ρ(t) - ρ_ideal(t)`, its λ-norm,
//! the maximal norm `D(t)` over pure initial states, and the first time at
//! which `D(t)` reaches a threshold.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, require_positive, Result};
use crate::mat2::Mat2;
use crate::propagation::{PropagationContext, SplitStep};
use crate::qubit::{preset_amplitudes, DensityMatrix2, PureState2};

/// Fidelity-loss benchmark used as the default threshold.
pub const DEFAULT_THRESHOLD: f64 = 1e-4;

/// Traceless Hermitian 2×2 matrix `[[-σ_11, σ_10*], [σ_10, σ_11]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Deviation {
    pub sigma11: f64,
    pub sigma10: C64,
}

impl Deviation {
    pub const ZERO: Deviation = Deviation { sigma11: 0.0, sigma10: C64::new(0.0, 0.0) };

    pub fn from_matrix(m: &Mat2) -> Self {
        Deviation {
            sigma11: 0.5 * (m.get(1, 1).re - m.get(0, 0).re),
            sigma10: 0.5 * (m.get(1, 0) + m.get(0, 1).conj()),
        }
    }

    pub fn to_matrix(&self) -> Mat2 {
        Mat2::new(C64::from(-self.sigma11), self.sigma10.conj(), self.sigma10, C64::from(self.sigma11))
    }
}

/// `σ = ρ_real - ρ_ideal`.
pub fn deviation(real: &DensityMatrix2, ideal: &DensityMatrix2) -> Deviation {
    Deviation::from_matrix(&(real.to_matrix() - ideal.to_matrix()))
}

/// `‖σ‖_λ = √(σ_11² + |σ_10|²)`, the spectral radius of a traceless
/// Hermitian 2×2 matrix.
pub fn lambda_norm(sigma: &Deviation) -> f64 {
    sigma.sigma11.hypot(sigma.sigma10.norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationReport {
    pub t: f64,
    pub sigma: Deviation,
    pub norm: f64,
    /// The maximizing initial state (computational basis); only set by [`d_of_t`].
    pub argmax_state: Option<PureState2>,
    /// Bloch angles of the maximizer relative to the eigenbasis of `H_s`.
    pub argmax_angles: Option<(f64, f64)>,
}

/// Grid and refinement settings for the supremum over pure states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchPolicy {
    pub theta_points: usize,
    pub phi_points: usize,
    pub refinement_rounds: usize,
    /// Values within this relative distance of the maximum count as ties.
    pub tie_rel_tol: f64,
    /// Log-spaced points of the coarse scan in [`low_decoherence_time`].
    pub coarse_time_points: usize,
    /// Relative bracket width at which bisection on `t` stops.
    pub time_rel_tol: f64,
}

impl Default for SearchPolicy {
    fn default() -> Self {
        SearchPolicy {
            theta_points: 64,
            phi_points: 128,
            refinement_rounds: 3,
            tie_rel_tol: 1e-10,
            coarse_time_points: 256,
            time_rel_tol: 1e-6,
        }
    }
}

impl SearchPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.theta_points < 2 || self.phi_points < 1 {
            return domain("Bloch grid needs at least 2 polar and 1 azimuthal points");
        }
        if self.coarse_time_points < 2 {
            return domain("coarse time scan needs at least 2 points");
        }
        require_positive("time_rel_tol", self.time_rel_tol)?;
        if !(self.tie_rel_tol >= 0.0) {
            return domain("tie tolerance must be non-negative");
        }
        Ok(())
    }
}

/// λ-norm of the deviation at time `t` for one initial pure state.
pub fn norm_at(ctx: &PropagationContext, state: &PureState2, t: f64) -> Result<DeviationReport> {
    let step = ctx.at(t)?;
    Ok(report_for(&step, state))
}

fn report_for(step: &SplitStep, state: &PureState2) -> DeviationReport {
    let sigma = Deviation::from_matrix(&step.deviation_matrix(&state.density()));
    DeviationReport { t: step.t(), sigma, norm: lambda_norm(&sigma), argmax_state: None, argmax_angles: None }
}

struct Candidate {
    theta: f64,
    phi: f64,
    norm: f64,
}

/// Picks the maximum; among values within `tol` (relative) of it, the
/// lexicographically smallest `(θ, φ)`. Independent of evaluation order.
fn select(cands: &[Candidate], tol: f64) -> usize {
    let best = cands.iter().map(|c| c.norm).fold(f64::NEG_INFINITY, f64::max);
    let floor = best - tol * best.abs();
    let mut pick = None::<usize>;
    for (i, c) in cands.iter().enumerate() {
        if c.norm < floor {
            continue;
        }
        pick = match pick {
            Some(j) if (cands[j].theta, cands[j].phi) <= (c.theta, c.phi) => Some(j),
            _ => Some(i),
        };
    }
    pick.unwrap_or(0)
}

fn canonical_angles(theta: f64, phi: f64) -> (f64, f64) {
    let theta = theta.clamp(0.0, PI);
    let phi = if theta == 0.0 || theta == PI { 0.0 } else { phi.rem_euclid(TAU) };
    (theta, phi)
}

/// `D(t)`: supremum of the λ-norm over pure initial states.
///
/// States are parameterized by Bloch angles on the eigenbasis of `H_s`
/// (θ = 0 is `|φ_0⟩`). A coarse `θ × φ` grid, seeded with the three preset
/// states, is followed by rounds of local refinement with 4× zoom.
pub fn d_of_t(ctx: &PropagationContext, t: f64, policy: &SearchPolicy) -> Result<DeviationReport> {
    policy.validate()?;
    let step = ctx.at(t)?;
    Ok(d_of_t_at(ctx, &step, policy))
}

pub(crate) fn d_of_t_at(ctx: &PropagationContext, step: &SplitStep, policy: &SearchPolicy) -> DeviationReport {
    let eig = ctx.eigensystem();
    let eval = |theta: f64, phi: f64| {
        let state = eig.from_eigen_coords(&PureState2::from_bloch(theta, phi));
        lambda_norm(&Deviation::from_matrix(&step.deviation_matrix(&state.density())))
    };

    let d_theta = PI / (policy.theta_points - 1) as f64;
    let d_phi = TAU / policy.phi_points as f64;
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(policy.theta_points * policy.phi_points + 3);
    points.extend(preset_amplitudes().iter().map(|s| {
        let (th, ph) = s.bloch_angles();
        canonical_angles(th, ph)
    }));
    for i in 0..policy.theta_points {
        let theta = if i + 1 == policy.theta_points { PI } else { i as f64 * d_theta };
        if theta == 0.0 || theta == PI {
            points.push((theta, 0.0));
            continue;
        }
        points.extend((0..policy.phi_points).map(|k| (theta, k as f64 * d_phi)));
    }
    let score = |pts: &[(f64, f64)]| -> Vec<Candidate> {
        pts.par_iter().map(|&(theta, phi)| Candidate { theta, phi, norm: eval(theta, phi) }).collect()
    };

    let mut cands = score(&points);
    let mut best = select(&cands, policy.tie_rel_tol);
    let (mut h_theta, mut h_phi) = (d_theta, d_phi);
    for _ in 0..policy.refinement_rounds {
        let (t0, p0) = (cands[best].theta, cands[best].phi);
        let mut local = Vec::with_capacity(81);
        for a in -4i32..=4 {
            for b in -4i32..=4 {
                local.push(canonical_angles(t0 + a as f64 * h_theta / 4.0, p0 + b as f64 * h_phi / 4.0));
            }
        }
        local.sort_by(|x, y| x.partial_cmp(y).unwrap());
        local.dedup();
        let mut next = score(&local);
        next.push(Candidate { theta: t0, phi: p0, norm: cands[best].norm });
        best = select(&next, policy.tie_rel_tol);
        cands = next;
        h_theta /= 4.0;
        h_phi /= 4.0;
    }

    let win = &cands[best];
    let coords = PureState2::from_bloch(win.theta, win.phi);
    let state = eig.from_eigen_coords(&coords);
    let mut report = report_for(step, &state);
    report.argmax_state = Some(state);
    report.argmax_angles = Some((win.theta, win.phi));
    report
}

/// Log-spaced times `t_max·10^{-decades} .. t_max`.
fn log_times(t_max: f64, decades: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| t_max * 10f64.powf(-decades * (1.0 - i as f64 / (points - 1) as f64)))
        .collect()
}

/// Span of the coarse scan below the horizon, in decades.
const COARSE_DECADES: f64 = 10.0;

/// First time in `(0, horizon]` at which `D(t)` reaches `threshold`.
///
/// A log-spaced coarse scan brackets the first up-crossing, then bisection
/// narrows it to `policy.time_rel_tol`. Later returns below the threshold are
/// ignored. `None` when there is no crossing within the horizon.
pub fn low_decoherence_time(
    ctx: &PropagationContext,
    threshold: f64,
    horizon: f64,
    policy: &SearchPolicy,
) -> Result<Option<f64>> {
    require_positive("threshold", threshold)?;
    require_positive("horizon", horizon)?;
    policy.validate()?;
    if ctx.bath().is_decoupled() {
        return Ok(None);
    }
    let d = |t: f64| -> Result<f64> { Ok(d_of_t_at(ctx, &ctx.at(t)?, policy).norm) };
    let grid = log_times(horizon, COARSE_DECADES, policy.coarse_time_points);
    let mut lo = 0.0;
    let mut hi = None;
    for &t in &grid {
        if d(t)? >= threshold {
            hi = Some(t);
            break;
        }
        lo = t;
    }
    let Some(mut hi) = hi else { return Ok(None) };
    bisect_crossing(&d, threshold, &mut lo, &mut hi, policy.time_rel_tol)?;
    Ok(Some(hi))
}

fn bisect_crossing(
    d: &impl Fn(f64) -> Result<f64>,
    threshold: f64,
    lo: &mut f64,
    hi: &mut f64,
    rel_tol: f64,
) -> Result<()> {
    while (*hi - *lo) > rel_tol * *hi {
        let mid = 0.5 * (*lo + *hi);
        if mid <= *lo || mid >= *hi {
            break;
        }
        if d(mid)? >= threshold {
            *hi = mid;
        } else {
            *lo = mid;
        }
    }
    Ok(())
}

/// Default horizon for the crossing search: four gate times.
pub fn default_horizon(ctx: &PropagationContext) -> f64 {
    4.0 / ctx.qubit().e_j().max(f64::MIN_POSITIVE)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Time grid for a scan. Log grids require `t_min > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl TimeGrid {
    pub fn times(&self) -> Result<Vec<f64>> {
        if self.points < 2 {
            return domain("time grid needs at least 2 points");
        }
        if !(self.t_min.is_finite() && self.t_max.is_finite() && self.t_min >= 0.0 && self.t_max > self.t_min) {
            return domain(format!("bad time range [{}, {}]", self.t_min, self.t_max));
        }
        let n = (self.points - 1) as f64;
        Ok(match self.spacing {
            Spacing::Linear => (0..self.points).map(|i| self.t_min + (self.t_max - self.t_min) * i as f64 / n).collect(),
            Spacing::Log => {
                if self.t_min <= 0.0 {
                    return domain("log time grid needs t_min > 0");
                }
                let r = (self.t_max / self.t_min).ln();
                (0..self.points).map(|i| self.t_min * (r * i as f64 / n).exp()).collect()
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub t_grid: Vec<f64>,
    /// `per_state_norms[s][i]`: preset state `s` at `t_grid[i]`.
    pub per_state_norms: Vec<Vec<f64>>,
    pub d_of_t: Vec<f64>,
    /// Maximizer Bloch angles (eigenbasis) at each grid time.
    pub argmax_angles: Vec<(f64, f64)>,
    pub t_ld: Option<f64>,
    pub threshold: f64,
}

/// Evaluates the preset-state norms and `D(t)` on a grid, and refines the
/// first grid crossing of `threshold` by bisection.
pub fn scan(ctx: &PropagationContext, times: &[f64], threshold: f64, policy: &SearchPolicy) -> Result<ScanResult> {
    require_positive("threshold", threshold)?;
    policy.validate()?;
    let presets = ctx.eigensystem().preset_states();
    let rows: Vec<([f64; 3], DeviationReport)> = times
        .iter()
        .map(|&t| {
            let step = ctx.at(t)?;
            let norms = presets.map(|s| report_for(&step, &s).norm);
            Ok((norms, d_of_t_at(ctx, &step, policy)))
        })
        .collect::<Result<_>>()?;

    let mut per_state_norms = vec![Vec::with_capacity(times.len()); 3];
    for (norms, _) in &rows {
        for (s, n) in norms.iter().enumerate() {
            per_state_norms[s].push(*n);
        }
    }
    let d: Vec<f64> = rows.iter().map(|(_, r)| r.norm).collect();
    let angles = rows.iter().map(|(_, r)| r.argmax_angles.unwrap_or((0.0, 0.0))).collect();

    let mut t_ld = None;
    if let Some(i) = d.iter().position(|&x| x >= threshold) {
        if i == 0 {
            t_ld = Some(times[0]);
        } else {
            let (mut lo, mut hi) = (times[i - 1], times[i]);
            let f = |t: f64| -> Result<f64> { Ok(d_of_t_at(ctx, &ctx.at(t)?, policy).norm) };
            bisect_crossing(&f, threshold, &mut lo, &mut hi, policy.time_rel_tol)?;
            t_ld = Some(hi);
        }
    }
    Ok(ScanResult { t_grid: times.to_vec(), per_state_norms, d_of_t: d, argmax_angles: angles, t_ld, threshold })
}
