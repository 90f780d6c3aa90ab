//! JSON scenario configuration and the built-in presets.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bath::{BathGrid, BathSpec, CutoffSign, OhmicSpec};
use crate::error::{Error, Result};
use crate::measure::{SearchPolicy, Spacing, TimeGrid, DEFAULT_THRESHOLD};
use crate::oracle::{SamplerMode, SectorSampler};
use crate::propagation::PropagationContext;
use crate::qubit::{gate_time, QubitParams};
use crate::units::{self, FrequencyConvention};

/// Ohmic damping coefficient calibrated so that the 30 mK preset crosses
/// `D = 1e-4` at `t = 8e-5` (angular MHz convention, literal cutoff sign).
pub const CALIBRATED_ETA: f64 = 2.332e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitSection {
    #[serde(rename = "E_ch")]
    pub e_ch: f64,
    #[serde(rename = "E_J")]
    pub e_j: f64,
    pub n_g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    #[serde(rename = "N0")]
    pub n0: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "f_low_MHz")]
    pub f_low_mhz: f64,
    #[serde(rename = "f_high_MHz")]
    pub f_high_mhz: f64,
    #[serde(rename = "T_mK")]
    pub t_mk: f64,
    pub eta: f64,
    #[serde(rename = "omega_c_MHz")]
    pub omega_c_mhz: f64,
    pub cutoff_sign: CutoffSign,
    pub freq_convention: FrequencyConvention,
    pub g_prime_override: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub t_min: f64,
    /// `None` means four gate times.
    pub t_max: Option<f64>,
    pub points: usize,
    pub log_or_linear: Spacing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSection {
    pub threshold: f64,
    /// `[theta_points, phi_points]`
    pub bloch_grid: [usize; 2],
    pub refinement_rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub mode: SamplerMode,
    pub n_max: usize,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub qubit: QubitSection,
    pub bath: BathSection,
    pub scan: ScanSection,
    pub measure: MeasureSection,
    pub oracle: OracleSection,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig::fig1()
    }
}

/// Number of modes in the small bath used by the oracle checks.
pub const VERIFY_MODES: usize = 2;

impl ScenarioConfig {
    /// E_J = 51.8 μeV at the degeneracy point, 20 modes over 1–20 MHz, 30 mK.
    pub fn fig1() -> Self {
        ScenarioConfig {
            qubit: QubitSection { e_ch: 0.0, e_j: 51.8, n_g: 0.5 },
            bath: BathSection {
                n0: 1,
                n: 20,
                f_low_mhz: 1.0,
                f_high_mhz: 20.0,
                t_mk: 30.0,
                eta: CALIBRATED_ETA,
                omega_c_mhz: 20.0,
                cutoff_sign: CutoffSign::PaperLiteral,
                freq_convention: FrequencyConvention::Angular,
                g_prime_override: None,
            },
            scan: ScanSection { t_min: 0.0, t_max: None, points: 400, log_or_linear: Spacing::Linear },
            measure: MeasureSection { threshold: DEFAULT_THRESHOLD, bloch_grid: [64, 128], refinement_rounds: 3 },
            oracle: OracleSection { mode: SamplerMode::Enumerate, n_max: 40, samples: 1_000_000, seed: 1_234_567 },
        }
    }

    /// [`ScenarioConfig::fig1`] at 0.3 mK.
    pub fn fig2() -> Self {
        let mut c = ScenarioConfig::fig1();
        c.bath.t_mk = 0.3;
        c
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "fig1" => Ok(ScenarioConfig::fig1()),
            "fig2" => Ok(ScenarioConfig::fig2()),
            other => Err(Error::Config(format!("unknown preset `{other}` (expected fig1 or fig2)"))),
        }
    }

    /// Parses and validates a JSON document. Missing sections take the
    /// `fig1` values; unknown keys are rejected.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        ScenarioConfig::from_json_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Applies `section.key=value`. The value is parsed as JSON when possible
    /// and taken as a string otherwise.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (path, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{assignment}` is not of the form key=value")))?;
        let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut doc = serde_json::to_value(&*self).expect("config serializes");
        let mut node = &mut doc;
        let keys: Vec<&str> = path.trim().split('.').collect();
        for (i, key) in keys.iter().enumerate() {
            let obj = node
                .as_object_mut()
                .ok_or_else(|| Error::Config(format!("override `{path}`: `{}` is not a section", keys[..i].join("."))))?;
            node = obj.get_mut(*key).ok_or_else(|| Error::Config(format!("override `{path}`: unknown key `{key}`")))?;
        }
        *node = value;
        let updated: ScenarioConfig =
            serde_json::from_value(doc).map_err(|e| Error::Config(format!("override `{assignment}`: {e}")))?;
        updated.validate()?;
        *self = updated;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let ctx = self.context()?;
        self.search_policy().validate()?;
        self.time_grid(&ctx)?.times()?;
        crate::error::require_positive("threshold", self.measure.threshold)?;
        self.sampler().validate(VERIFY_MODES)?;
        Ok(())
    }

    pub fn qubit_params(&self) -> Result<QubitParams> {
        QubitParams::new(self.qubit.e_ch, self.qubit.e_j, self.qubit.n_g)
    }

    pub fn bath_grid(&self) -> BathGrid {
        BathGrid {
            n0: self.bath.n0,
            n: self.bath.n,
            f_low_mhz: self.bath.f_low_mhz,
            f_high_mhz: self.bath.f_high_mhz,
            convention: self.bath.freq_convention,
        }
    }

    pub fn ohmic(&self) -> Result<OhmicSpec> {
        let omega_c = units::mode_frequency_to_energy(self.bath.omega_c_mhz, self.bath.freq_convention)?;
        OhmicSpec::new(self.bath.eta, omega_c, self.bath.cutoff_sign)
    }

    pub fn bath_spec(&self) -> Result<BathSpec> {
        let bath = BathSpec::build(self.bath_grid(), self.bath.t_mk, self.ohmic()?)?;
        match &self.bath.g_prime_override {
            Some(g) => bath.with_couplings(g),
            None => Ok(bath),
        }
    }

    pub fn context(&self) -> Result<PropagationContext> {
        Ok(PropagationContext::new(self.qubit_params()?, self.bath_spec()?))
    }

    pub fn search_policy(&self) -> SearchPolicy {
        SearchPolicy {
            theta_points: self.measure.bloch_grid[0],
            phi_points: self.measure.bloch_grid[1],
            refinement_rounds: self.measure.refinement_rounds,
            ..SearchPolicy::default()
        }
    }

    pub fn sampler(&self) -> SectorSampler {
        SectorSampler { mode: self.oracle.mode, n_max: self.oracle.n_max, samples: self.oracle.samples, seed: self.oracle.seed }
    }

    /// Upper end of the time range: `scan.t_max`, or four gate times.
    pub fn horizon(&self, ctx: &PropagationContext) -> f64 {
        self.scan.t_max.unwrap_or_else(|| crate::measure::default_horizon(ctx))
    }

    pub fn time_grid(&self, ctx: &PropagationContext) -> Result<TimeGrid> {
        let grid = TimeGrid {
            t_min: self.scan.t_min,
            t_max: self.horizon(ctx),
            points: self.scan.points,
            spacing: self.scan.log_or_linear,
        };
        Ok(grid)
    }

    /// Comment block (`# ` prefixed) with the effective configuration and
    /// unit conventions.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        out.push_str("# decosim effective configuration\n");
        out.push_str(&format!(
            "# units: energies in ueV, hbar = 1, time unit = hbar/ueV = {:e} s; mode frequencies in MHz ({}); g' in ueV\n",
            units::HBAR_MICROEV_SECONDS,
            self.bath.freq_convention.name()
        ));
        if let Ok(g) = gate_time(self.qubit.e_j) {
            out.push_str(&format!("# gate time t_g = {:.16e} ({:.6} ps)\n", g.internal, g.picoseconds()));
        }
        for line in self.to_json_pretty().lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}
