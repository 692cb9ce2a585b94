pub mod fit;
pub mod fwm;
pub mod fwm2d;
pub mod levels;
pub mod synth;
pub mod verify;

use std::path::{Path, PathBuf};

use tcfwm::fwm::solve_temperature_for_detuning;
use tcfwm::model::BasisState;
use tcfwm::plfit::average_detuning;
use tcfwm::Tuned;

use crate::config::{Format, RunConfig};
use crate::error::CliError;

/// Everything a subcommand needs after flags have been merged into the config.
pub struct Context {
    pub cfg: RunConfig,
    pub out: PathBuf,
    pub format: Format,
    /// the working point was given on the command line
    pub point_from_flags: bool,
}

impl Context {
    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    pub fn ensure_out(&self) -> Result<&Path, CliError> {
        std::fs::create_dir_all(&self.out)?;
        Ok(&self.out)
    }
}

/// The tuned system at the configured temperature or detuning.
pub struct WorkingPoint {
    pub tuned: Tuned,
    pub temperature: f64,
    /// undefined when every coupling vanishes
    pub detuning: Option<f64>,
}

pub fn working_point(cfg: &RunConfig) -> Result<WorkingPoint, CliError> {
    let temperature = match (cfg.run.temperature, cfg.run.delta) {
        (Some(t), None) => t,
        (None, Some(d)) => {
            let [lo, hi] = cfg.run.temperature_bracket;
            solve_temperature_for_detuning(&cfg.system, d, lo, hi)?
        }
        (None, None) => return Err(CliError::Config("set run.temperature or run.delta".into())),
        (Some(_), Some(_)) => return Err(CliError::Config("run.temperature and run.delta are exclusive".into())),
    };
    point_at(cfg, temperature)
}

pub fn point_at(cfg: &RunConfig, temperature: f64) -> Result<WorkingPoint, CliError> {
    let tuned = cfg.system.tune(temperature)?;
    let detuning = if tuned.g.iter().all(|g| *g == 0.0) { None } else { Some(average_detuning(&tuned)?) };
    Ok(WorkingPoint { tuned, temperature, detuning })
}

/// Column label for a basis state: `C`, `CC`, `X2`, `X1C`, `X1X3`, `G`.
pub fn state_label(s: &BasisState) -> String {
    let mut out = String::new();
    for (i, n) in s.excitons.iter().enumerate() {
        for _ in 0..*n {
            out.push_str(&format!("X{}", i + 1));
        }
    }
    for _ in 0..s.photons {
        out.push('C');
    }
    if out.is_empty() {
        out.push('G');
    }
    out
}
