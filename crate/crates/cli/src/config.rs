//! Versioned JSON run configuration.
//!
//! Every section except `system` has defaults, so the smallest valid document
//! is `{"schema_version": 1, "system": {...}}`. Unknown keys are rejected at
//! every level.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tcfwm::fwm::Grid;
use tcfwm::{Params, C64};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// The shipped default: three dots in a micropillar at 19 K.
pub const DEFAULT_CONFIG: &str = include_str!("../../../configs/default.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub system: Params,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    /// working temperature (K); exclusive with `delta`
    pub temperature: Option<f64>,
    /// target average detuning (μeV); the temperature is solved for
    pub delta: Option<f64>,
    /// temperature bracket searched when `delta` is given (K)
    pub temperature_bracket: [f64; 2],
    pub pulses: PulseSection,
    pub grids: GridSection,
    pub two_d: TwoDSection,
    pub levels: LevelsSection,
    pub fit: FitSection,
    pub synth: SynthSection,
    pub verify: VerifySection,
    pub output: OutputSection,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            temperature: None,
            delta: None,
            temperature_bracket: [0.0, 60.0],
            pulses: PulseSection::default(),
            grids: GridSection::default(),
            two_d: TwoDSection::default(),
            levels: LevelsSection::default(),
            fit: FitSection::default(),
            synth: SynthSection::default(),
            verify: VerifySection::default(),
            output: OutputSection::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex> for C64 {
    fn from(c: Complex) -> Self {
        C64::new(c.re, c.im)
    }
}

impl From<C64> for Complex {
    fn from(c: C64) -> Self {
        Complex { re: c.re, im: c.im }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseSection {
    pub area1: Complex,
    pub area2: Complex,
    pub include_prefactor: bool,
}

impl Default for PulseSection {
    fn default() -> Self {
        let one = Complex { re: 1.0, im: 0.0 };
        Self { area1: one, area2: one, include_prefactor: true }
    }
}

/// Inclusive `start..=stop` with a fixed step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl RangeSpec {
    pub const fn new(start: f64, stop: f64, step: f64) -> Self {
        Self { start, stop, step }
    }

    pub fn grid(&self, what: &str) -> Result<Grid<f64>, CliError> {
        Grid::range(self.start, self.stop, self.step).map_err(|e| CliError::Config(format!("{what}: {e}")))
    }
}

/// Grids for `fwm`. Frequency grids are absolute (μeV); `None` spans the
/// transitions with a 300 μeV margin at 1 μeV.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub t: RangeSpec,
    pub tau: RangeSpec,
    pub omega: Option<RangeSpec>,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { t: RangeSpec::new(0.0, 200.0, 0.1), tau: RangeSpec::new(-50.0, 100.0, 0.5), omega: None }
    }
}

/// Grids and options for `fwm2d`. The sampled chain needs delays long enough
/// for the first-rung coherences to decay, hence its own `t` and `tau`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TwoDSection {
    pub survival_time: f64,
    pub omega_cor: Option<f64>,
    /// `None`: first-rung levels ±300 μeV at 2 μeV, used for both axes
    pub omega: Option<RangeSpec>,
    pub omega_tau: Option<RangeSpec>,
    pub sampled: bool,
    pub t: RangeSpec,
    pub tau: RangeSpec,
}

impl Default for TwoDSection {
    fn default() -> Self {
        Self {
            survival_time: 42.5,
            omega_cor: None,
            omega: None,
            omega_tau: None,
            sampled: true,
            t: RangeSpec::new(0.0, 300.0, 0.1),
            tau: RangeSpec::new(0.0, 400.0, 0.5),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LevelsSection {
    /// temperature sweep; `None` evaluates the working point only
    pub temperatures: Option<RangeSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitSection {
    /// `None` uses N + 1
    pub max_peaks: Option<usize>,
    pub threshold: f64,
    pub max_iterations: usize,
    pub max_rounds: usize,
}

impl Default for FitSection {
    fn default() -> Self {
        Self { max_peaks: None, threshold: 0.05, max_iterations: 200, max_rounds: 5 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthSection {
    pub temperatures: RangeSpec,
    pub noise: f64,
    pub seed: u64,
    pub margin: f64,
    pub step: f64,
}

impl Default for SynthSection {
    fn default() -> Self {
        Self { temperatures: RangeSpec::new(8.0, 30.0, 0.5), noise: 0.01, seed: 2024, margin: 250.0, step: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub delays: Vec<f64>,
    pub t: RangeSpec,
    pub tolerance: f64,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self { delays: vec![-20.0, -5.0, 0.0, 5.0, 20.0], t: RangeSpec::new(0.0, 100.0, 0.1), tolerance: 1e-6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub format: Format,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), format: Format::Csv }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                Self::parse(&text).map_err(|e| match e {
                    CliError::Config(m) => CliError::Config(format!("{}: {m}", p.display())),
                    other => other,
                })
            }
            None => Self::parse(DEFAULT_CONFIG),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.system.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if self.run.temperature.is_some() && self.run.delta.is_some() {
            return Err(CliError::Config("give either run.temperature or run.delta, not both".into()));
        }
        let [lo, hi] = self.run.temperature_bracket;
        if !(lo >= 0.0 && hi > lo) {
            return Err(CliError::Config(format!("bad temperature_bracket [{lo}, {hi}]")));
        }
        if !(self.run.two_d.survival_time >= 0.0) {
            return Err(CliError::Config("two_d.survival_time must be >= 0".into()));
        }
        Ok(())
    }

    pub fn pulses(&self) -> tcfwm::Pulses {
        let p = self.run.pulses;
        tcfwm::Pulses { area1: p.area1.into(), area2: p.area2.into(), include_prefactor: p.include_prefactor }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
