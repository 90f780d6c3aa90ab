//! Physical constants and unit conversions.
//!
//! Internally every energy is in micro-electron-volts with ħ = 1, so one unit
//! of time is ħ / (1 μeV) ≈ 6.582×10⁻¹⁰ s. Temperatures enter in millikelvin
//! and bath mode frequencies in MHz.

use serde::{Deserialize, Serialize};

use crate::error::{domain, require_finite, require_positive, Result};

/// ħ in μeV·s (CODATA 2018).
pub const HBAR_MICROEV_SECONDS: f64 = 6.582_119_569e-10;
/// k_B in μeV per millikelvin (CODATA 2018: 86.173 332 62 μeV/K).
pub const BOLTZMANN_MICROEV_PER_MK: f64 = 8.617_333_262e-2;
/// Planck constant in J·s (exact SI).
pub const PLANCK_JOULE_SECONDS: f64 = 6.626_070_15e-34;
/// Elementary charge in C (exact SI).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Superconducting resistance quantum h/(2e)² in ohm (≈ 6453.2 Ω).
pub fn resistance_quantum() -> f64 {
    PLANCK_JOULE_SECONDS / (4.0 * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE)
}

/// How a frequency quoted in MHz is turned into an energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyConvention {
    /// The number is an angular frequency in 10⁶ rad/s: E = ħ·f·10⁶.
    #[default]
    Angular,
    /// The number is a cyclic frequency in MHz: E = 2π·ħ·f·10⁶.
    Cyclic,
}

impl FrequencyConvention {
    pub fn factor(self) -> f64 {
        match self {
            FrequencyConvention::Angular => 1.0,
            FrequencyConvention::Cyclic => std::f64::consts::TAU,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FrequencyConvention::Angular => "angular",
            FrequencyConvention::Cyclic => "cyclic",
        }
    }
}

/// The internal unit system. There is exactly one, [`UnitSystem::STANDARD`];
/// the struct exists so the constants can be echoed into output metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitSystem {
    pub hbar_microev_seconds: f64,
    pub boltzmann_microev_per_mk: f64,
    pub time_unit_seconds: f64,
    pub angular_mhz_to_microev: f64,
}

impl UnitSystem {
    pub const STANDARD: UnitSystem = UnitSystem {
        hbar_microev_seconds: HBAR_MICROEV_SECONDS,
        boltzmann_microev_per_mk: BOLTZMANN_MICROEV_PER_MK,
        // ħ / (1 μeV)
        time_unit_seconds: HBAR_MICROEV_SECONDS,
        angular_mhz_to_microev: HBAR_MICROEV_SECONDS * 1.0e6,
    };
}

impl Default for UnitSystem {
    fn default() -> Self {
        UnitSystem::STANDARD
    }
}

/// β = 1/(k_B T) in μeV⁻¹ for a temperature in millikelvin.
pub fn temperature_to_beta(t_mk: f64) -> Result<f64> {
    let t = require_positive("temperature", t_mk)?;
    Ok(1.0 / (BOLTZMANN_MICROEV_PER_MK * t))
}

/// Inverse of [`temperature_to_beta`].
pub fn beta_to_temperature(beta: f64) -> Result<f64> {
    let b = require_positive("beta", beta)?;
    Ok(1.0 / (BOLTZMANN_MICROEV_PER_MK * b))
}

/// Energy in μeV of a bath mode quoted in MHz.
pub fn mode_frequency_to_energy(f_mhz: f64, convention: FrequencyConvention) -> Result<f64> {
    let f = require_positive("mode frequency", f_mhz)?;
    Ok(f * convention.factor() * UnitSystem::STANDARD.angular_mhz_to_microev)
}

/// Inverse of [`mode_frequency_to_energy`].
pub fn energy_to_mode_frequency(energy: f64, convention: FrequencyConvention) -> Result<f64> {
    let e = require_positive("mode energy", energy)?;
    Ok(e / (convention.factor() * UnitSystem::STANDARD.angular_mhz_to_microev))
}

/// Internal time (units of ħ/μeV) to seconds.
pub fn time_to_seconds(t: f64) -> Result<f64> {
    Ok(require_finite("time", t)? * UnitSystem::STANDARD.time_unit_seconds)
}

/// Seconds to internal time.
pub fn seconds_to_time(seconds: f64) -> Result<f64> {
    Ok(require_finite("time", seconds)? / UnitSystem::STANDARD.time_unit_seconds)
}

pub fn time_to_picoseconds(t: f64) -> Result<f64> {
    Ok(time_to_seconds(t)? * 1.0e12)
}

/// Parses a convention name as used on the command line.
pub fn parse_convention(name: &str) -> Result<FrequencyConvention> {
    match name {
        "angular" => Ok(FrequencyConvention::Angular),
        "cyclic" => Ok(FrequencyConvention::Cyclic),
        other => domain(format!("unknown frequency convention {other:?}")),
    }
}
