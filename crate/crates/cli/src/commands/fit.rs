//! Lorentzian fits of measured PL spectra followed by the global model fit.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use tcfwm::plfit::{
    fit_lorentzians, global_fit, GlobalFitOptions, LmOptions, LorentzianFit, LorentzianFitOptions, PeakObservation, PlSpectrum,
};
use tcfwm::{Fit, Peak};

use super::synth::Manifest;
use super::Context;
use crate::config::Format;
use crate::error::CliError;
use crate::table::{write_json, Table};

#[derive(Serialize)]
struct SpectrumPeaks {
    temperature: f64,
    converged: bool,
    background: f64,
    peaks: Vec<Peak>,
}

#[derive(Serialize)]
struct FitFile {
    converged: bool,
    result: Fit,
    spectra: Vec<SpectrumPeaks>,
}

fn column(t: &Table, name: &str, file: &Path) -> Result<usize, CliError> {
    t.header
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| CliError::Input(format!("{}: missing column {name}", file.display())))
}

fn read_spectrum(file: &Path, temperature: f64) -> Result<PlSpectrum<f64>, CliError> {
    let t = Table::read_file(file)?;
    let (e, i) = (column(&t, "energy_ueV", file)?, column(&t, "intensity", file)?);
    let s = PlSpectrum {
        temperature,
        energy: t.rows.iter().map(|r| r[e]).collect(),
        intensity: t.rows.iter().map(|r| r[i]).collect(),
    };
    s.validate().map_err(|err| CliError::Input(format!("{}: {err}", file.display())))?;
    Ok(s)
}

pub fn load_manifest(path: &Path) -> Result<Vec<PlSpectrum<f64>>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let m: Manifest = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    m.spectra.iter().map(|s| read_spectrum(&dir.join(&s.file), s.temperature_k)).collect()
}

pub fn run(ctx: &Context, manifest: &Path) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let f = &cfg.run.fit;
    let spectra = load_manifest(manifest)?;
    let lm = LmOptions { max_iterations: f.max_iterations, ..LmOptions::default() };
    let lopts = LorentzianFitOptions { threshold: f.threshold, lm };
    let max_peaks = f.max_peaks.unwrap_or(cfg.system.n_emitters() + 1);
    let fits: Vec<LorentzianFit<f64>> =
        spectra.par_iter().map(|s| fit_lorentzians(s, max_peaks, &lopts)).collect::<Result<_, _>>()?;
    let obs: Vec<PeakObservation<f64>> =
        spectra.iter().zip(&fits).map(|(s, l)| PeakObservation::from_fit(s.temperature, l)).collect();
    let mut result = global_fit(&obs, &cfg.system, &GlobalFitOptions { lm, max_rounds: f.max_rounds })?;
    for (s, l) in spectra.iter().zip(&fits) {
        if !l.convergence.converged {
            result.warnings.push(format!("Lorentzian fit at {} K: {}", s.temperature, l.convergence.message));
        }
    }
    let converged = result.convergence.converged;
    let per_spectrum: Vec<SpectrumPeaks> = spectra
        .iter()
        .zip(&fits)
        .map(|(s, l)| SpectrumPeaks {
            temperature: s.temperature,
            converged: l.convergence.converged,
            background: l.background,
            peaks: l.peaks.clone(),
        })
        .collect();
    ctx.ensure_out()?;
    if ctx.format == Format::Csv {
        let header = ["temperature_K", "index", "center_ueV", "center_err", "hwhm_ueV", "hwhm_err", "amplitude", "amplitude_err"];
        let mut t = Table::new(header.iter().map(|s| s.to_string()).collect()).comment("quantity", "Lorentzian peaks per spectrum");
        for s in &per_spectrum {
            for (k, p) in s.peaks.iter().enumerate() {
                t.rows.push(vec![s.temperature, k as f64, p.center, p.center_err, p.hwhm, p.hwhm_err, p.amplitude, p.amplitude_err]);
            }
        }
        t.write_file(&ctx.path("peaks.csv"))?;
    }
    let message = result.convergence.message.clone();
    write_json(&ctx.path("fit.json"), &FitFile { converged, result, spectra: per_spectrum })?;
    if converged {
        Ok(())
    } else {
        Err(CliError::NotConverged(message))
    }
}
