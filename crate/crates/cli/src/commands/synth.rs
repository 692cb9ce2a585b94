//! Synthetic photoluminescence spectra from the configured system.

use serde::{Deserialize, Serialize};
use tcfwm::plfit::{synthesize_pl, SynthOptions};

use super::Context;
use crate::error::CliError;
use crate::table::{write_json, Table};

/// Index of PL spectra; file paths are relative to the manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub spectra: Vec<ManifestEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub file: String,
    pub temperature_k: f64,
}

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let s = &cfg.run.synth;
    let temps = s.temperatures.grid("synth.temperatures")?;
    let opts = SynthOptions { noise: s.noise, seed: s.seed, margin: s.margin, step: s.step };
    let data = synthesize_pl(&cfg.system, temps.values(), &opts)?;
    ctx.ensure_out()?;
    let mut manifest = Manifest { spectra: Vec::new() };
    for spec in &data.spectra {
        let file = format!("pl_{}K.csv", spec.temperature);
        let mut t = Table::new(vec!["energy_ueV".into(), "intensity".into()])
            .comment("temperature_K", spec.temperature)
            .comment("noise", s.noise)
            .comment("seed", s.seed);
        t.rows = spec.energy.iter().zip(&spec.intensity).map(|(e, i)| vec![*e, *i]).collect();
        t.write_file(&ctx.path(&file))?;
        manifest.spectra.push(ManifestEntry { file, temperature_k: spec.temperature });
    }
    write_json(&ctx.path("pl_manifest.json"), &manifest)
}
