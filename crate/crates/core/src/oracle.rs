//! Independent reference computations.
//!
//! Every `b†_j b_j` commutes with the full Hamiltonian, so each occupation
//! configuration `{n_j}` evolves the qubit under the closed 2×2 Hamiltonian
//! `H_s + (Σ_j g'_j n_j) σ_z`. Averaging those exact evolutions over the
//! thermal occupation distribution gives the exact reduced dynamics, with no
//! splitting and no closed-form bath trace involved.

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, require_finite, require_positive, Error, Result};
use crate::mat2::Mat2;
use crate::measure::{lambda_norm, Deviation};
use crate::propagation::PropagationContext;
use crate::qubit::{DensityMatrix2, QubitParams};

/// Largest enumerable number of occupation configurations.
pub const ENUMERATION_LIMIT: f64 = 1e7;
/// Smallest Monte Carlo sample count.
pub const MIN_SAMPLES: usize = 1000;
/// Errors at or below this are treated as numerical noise by the order fit.
pub const ERROR_FLOOR: f64 = 1e-13;
/// Target tail weight `e^{-βω n_max}` of the truncated thermal series.
pub const SERIES_TAIL: f64 = 1e-14;

const ENUMERATION_BLOCK: usize = 4096;
const SAMPLE_BLOCK: usize = 8192;

/// Neumaier-compensated running sum.
#[derive(Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Direct thermal trace of one mode,
/// `Σ_{n=0}^{n_max} (1 - e^{-βω}) e^{-βωn} e^{i g' Δχ n t}`.
///
/// `n_max` is raised as needed so that the neglected tail is below [`SERIES_TAIL`].
pub fn bath_factor_series(omega: f64, g_prime: f64, beta: f64, chi_diff: f64, t: f64, n_max: usize) -> Result<C64> {
    require_positive("beta", beta)?;
    require_positive("omega", omega)?;
    require_finite("g'", g_prime)?;
    require_finite("time", t)?;
    let x = beta * omega;
    let needed = (-SERIES_TAIL.ln() / x).ceil();
    if needed > 1e9 {
        return domain(format!("series needs {needed} terms for βω = {x}"));
    }
    let n_max = n_max.max(needed as usize);
    let weight0 = -(-x).exp_m1();
    let phase = g_prime * chi_diff * t;
    let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
    for n in 0..=n_max {
        let nf = n as f64;
        let w = weight0 * (-x * nf).exp();
        let (s, c) = (phase * nf).sin_cos();
        re.add(w * c);
        im.add(w * s);
    }
    Ok(C64::new(re.value(), im.value()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SamplerMode {
    /// Full product over `n_j ≤ n_max` for every mode.
    #[default]
    Enumerate,
    /// Independent thermal draws per mode.
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorSampler {
    pub mode: SamplerMode,
    pub n_max: usize,
    pub samples: usize,
    pub seed: u64,
}

impl SectorSampler {
    pub fn enumerate(n_max: usize) -> Self {
        SectorSampler { mode: SamplerMode::Enumerate, n_max, samples: 0, seed: 0 }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        SectorSampler { mode: SamplerMode::MonteCarlo, n_max: 0, samples, seed }
    }

    pub fn validate(&self, num_modes: usize) -> Result<()> {
        match self.mode {
            SamplerMode::Enumerate => {
                let configs = (self.n_max as f64 + 1.0).powi(num_modes as i32);
                if configs > ENUMERATION_LIMIT {
                    return Err(Error::EnumerationTooLarge { configurations: configs, limit: ENUMERATION_LIMIT });
                }
            }
            SamplerMode::MonteCarlo => {
                if self.samples < MIN_SAMPLES {
                    return domain(format!("monte_carlo needs at least {MIN_SAMPLES} samples, got {}", self.samples));
                }
            }
        }
        Ok(())
    }
}

/// Sector-averaged reduced state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactEstimate {
    pub rho: DensityMatrix2,
    /// Standard errors of `(ρ_00, ρ_11, Re ρ_10, Im ρ_10)`; Monte Carlo only.
    pub std_err: Option<[f64; 4]>,
    /// Thermal weight covered by the enumeration (1 for Monte Carlo). The
    /// estimate is normalized by it.
    pub captured_weight: f64,
}

fn components(m: &Mat2) -> [f64; 4] {
    [m.0[0][0].re, m.0[1][1].re, m.0[1][0].re, m.0[1][0].im]
}

fn from_components(c: [f64; 4]) -> DensityMatrix2 {
    DensityMatrix2 { rho00: c[0], rho11: c[1], rho10: C64::new(c[2], c[3]) }
}

/// Pairwise summation of per-block partial sums, in block order.
fn pairwise(parts: &[[f64; 5]]) -> [f64; 5] {
    match parts.len() {
        0 => [0.0; 5],
        1 => parts[0],
        n => {
            let (a, b) = (pairwise(&parts[..n / 2]), pairwise(&parts[n / 2..]));
            std::array::from_fn(|i| a[i] + b[i])
        }
    }
}

/// Evolution of one occupation sector with total coupling `G = Σ g'_j n_j`.
type SectorEvolution<'a> = dyn Fn(f64) -> Mat2 + Sync + 'a;

fn sector_average(
    ctx: &PropagationContext,
    rho0: &DensityMatrix2,
    sampler: &SectorSampler,
    evolve: &SectorEvolution<'_>,
) -> Result<ExactEstimate> {
    let modes = ctx.bath().modes();
    sampler.validate(modes.len())?;
    let beta = ctx.bath().beta();
    let x: Vec<f64> = modes.iter().map(|m| beta * m.omega).collect();
    let g: Vec<f64> = modes.iter().map(|m| m.g_prime).collect();
    let rho_m = rho0.to_matrix();
    let evolved = |coupling: f64| components(&evolve(coupling).conjugate(&rho_m));

    match sampler.mode {
        SamplerMode::Enumerate => {
            let base = sampler.n_max + 1;
            let total = base.pow(modes.len() as u32);
            let blocks = total.div_ceil(ENUMERATION_BLOCK);
            let parts: Vec<[f64; 5]> = (0..blocks)
                .into_par_iter()
                .map(|b| {
                    let mut acc = [0.0; 5];
                    for idx in b * ENUMERATION_BLOCK..((b + 1) * ENUMERATION_BLOCK).min(total) {
                        let (mut rest, mut coupling, mut ln_w) = (idx, 0.0, 0.0);
                        for j in 0..modes.len() {
                            let n = (rest % base) as f64;
                            rest /= base;
                            coupling += g[j] * n;
                            ln_w += (-(-x[j]).exp_m1()).ln() - x[j] * n;
                        }
                        let w = ln_w.exp();
                        let c = evolved(coupling);
                        for k in 0..4 {
                            acc[k] += w * c[k];
                        }
                        acc[4] += w;
                    }
                    acc
                })
                .collect();
            let sum = pairwise(&parts);
            let captured = sum[4];
            Ok(ExactEstimate {
                rho: from_components(std::array::from_fn(|k| sum[k] / captured)),
                std_err: None,
                captured_weight: captured,
            })
        }
        SamplerMode::MonteCarlo => {
            let blocks = sampler.samples.div_ceil(SAMPLE_BLOCK);
            // per block: count, mean[4], M2[4]
            let parts: Vec<(f64, [f64; 4], [f64; 4])> = (0..blocks)
                .into_par_iter()
                .map(|b| {
                    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
                    rng.set_stream(b as u64);
                    let count = SAMPLE_BLOCK.min(sampler.samples - b * SAMPLE_BLOCK);
                    let (mut mean, mut m2) = ([0.0; 4], [0.0; 4]);
                    for i in 0..count {
                        let mut coupling = 0.0;
                        for j in 0..x.len() {
                            let u: f64 = 1.0 - rng.gen::<f64>();
                            coupling += g[j] * (u.ln() / -x[j]).floor();
                        }
                        let c = evolved(coupling);
                        let k = (i + 1) as f64;
                        for e in 0..4 {
                            let delta = c[e] - mean[e];
                            mean[e] += delta / k;
                            m2[e] += delta * (c[e] - mean[e]);
                        }
                    }
                    (count as f64, mean, m2)
                })
                .collect();
            let (mut n, mut mean, mut m2) = (0.0, [0.0; 4], [0.0; 4]);
            for (nb, mb, m2b) in parts {
                let tot = n + nb;
                for e in 0..4 {
                    let delta = mb[e] - mean[e];
                    mean[e] += delta * nb / tot;
                    m2[e] += m2b[e] + delta * delta * n * nb / tot;
                }
                n = tot;
            }
            let se = std::array::from_fn(|e| (m2[e] / (n - 1.0) / n).sqrt());
            Ok(ExactEstimate { rho: from_components(mean), std_err: Some(se), captured_weight: 1.0 })
        }
    }
}

/// Exact sector Hamiltonian evolution `exp(-i (H_s + G σ_z) t)`; the
/// `ω'_j n_j` phase is global within a sector and dropped.
fn sector_exact(q: &QubitParams, coupling: f64, t: f64) -> Mat2 {
    Mat2::exp_pauli(0.0, -0.5 * q.b_x(), 0.0, -0.5 * q.b_z() + coupling, t)
}

/// Reduced state from exactly evolved occupation sectors, thermally averaged.
pub fn exact_reduced_density(
    ctx: &PropagationContext,
    rho0: &DensityMatrix2,
    t: f64,
    sampler: &SectorSampler,
) -> Result<ExactEstimate> {
    require_finite("time", t)?;
    let q = *ctx.qubit();
    sector_average(ctx, rho0, sampler, &|g| sector_exact(&q, g, t))
}

/// Reduced state after `steps` repeated symmetric split steps of length
/// `t / steps`, evaluated sector by sector. With `steps = 1` this is the same
/// dynamics as [`crate::propagation::reduced_density`].
pub fn multi_step_split_density(
    ctx: &PropagationContext,
    rho0: &DensityMatrix2,
    t: f64,
    steps: usize,
    sampler: &SectorSampler,
) -> Result<ExactEstimate> {
    require_finite("time", t)?;
    if steps == 0 {
        return domain("steps must be at least 1");
    }
    let q = *ctx.qubit();
    let dt = t / steps as f64;
    let half = q.evolution(0.5 * dt);
    sector_average(ctx, rho0, sampler, &|g| {
        let kick = Mat2::exp_pauli(0.0, 0.0, 0.0, g, dt);
        let one = half * kick * half;
        (1..steps).fold(one, |acc, _| one * acc)
    })
}

/// λ-norm distance between the single-split reduced state and the exact one
/// at each time.
pub fn split_errors(
    ctx: &PropagationContext,
    rho0: &DensityMatrix2,
    t_values: &[f64],
    sampler: &SectorSampler,
) -> Result<Vec<f64>> {
    t_values
        .iter()
        .map(|&t| {
            let split = ctx.at(t)?.reduced_density(rho0);
            let exact = exact_reduced_density(ctx, rho0, t, sampler)?.rho;
            Ok(lambda_norm(&Deviation::from_matrix(&(split.to_matrix() - exact.to_matrix()))))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderFit {
    pub slope: f64,
    pub intercept: f64,
    /// `(t, error)` pairs above the floor that entered the fit.
    pub points: Vec<(f64, f64)>,
}

/// Least-squares slope of `log error` against `log t`.
pub fn trotter_order_fit(
    ctx: &PropagationContext,
    rho0: &DensityMatrix2,
    t_values: &[f64],
    sampler: &SectorSampler,
) -> Result<OrderFit> {
    if t_values.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
        return domain("order fit times must be positive");
    }
    let (lo, hi) = t_values.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &t| (a.min(t), b.max(t)));
    if t_values.is_empty() || hi / lo < 100.0 * (1.0 - 1e-9) {
        return domain("order fit times must span at least two decades");
    }
    let errors = split_errors(ctx, rho0, t_values, sampler)?;
    let points: Vec<(f64, f64)> =
        t_values.iter().copied().zip(errors.iter().copied()).filter(|&(_, e)| e > ERROR_FLOOR).collect();
    if points.len() < 4 {
        let worst = errors.iter().copied().fold(0.0, f64::max);
        return Err(Error::Inconclusive(format!(
            "{} of {} errors above the {ERROR_FLOOR:e} floor (largest {worst:e})",
            points.len(),
            errors.len()
        )));
    }
    let (slope, intercept) = linear_fit(points.iter().map(|&(t, e)| (t.ln(), e.ln())));
    Ok(OrderFit { slope, intercept, points })
}

/// Ordinary least squares `y = slope·x + intercept`.
pub fn linear_fit(xy: impl Iterator<Item = (f64, f64)> + Clone) -> (f64, f64) {
    let n = xy.clone().count() as f64;
    let (sx, sy) = xy.clone().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = xy.fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn to_nalgebra(m: &Mat2) -> Matrix2<C64> {
    Matrix2::new(m.0[0][0], m.0[0][1], m.0[1][0], m.0[1][1])
}

/// Spectral radius of a Hermitian matrix from a general-purpose eigensolver.
pub fn spectral_radius_generic(m: &Mat2) -> f64 {
    let eig = to_nalgebra(m).symmetric_eigen();
    eig.eigenvalues.iter().fold(0.0, |a: f64, v| a.max(v.abs()))
}

/// `exp(m)` from a general-purpose matrix exponential.
pub fn matrix_exp_generic(m: &Mat2) -> Mat2 {
    let e = to_nalgebra(m).exp();
    Mat2([[e[(0, 0)], e[(0, 1)]], [e[(1, 0)], e[(1, 1)]]])
}
