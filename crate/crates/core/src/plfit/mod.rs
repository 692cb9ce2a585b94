//! Photoluminescence analysis: detuning, Lorentzian decomposition and the
//! global fit of polariton lines versus temperature.

mod detuning;
mod global;
mod lm;
mod lorentz;
mod synth;

pub use detuning::{average_detuning, detuning_at};
pub use global::{
    assign_lines, fit_temperature_model, global_fit, predicted_lines, ExcitonTrack, FitResult, GlobalFitOptions,
    ParamUncertainties, PeakObservation, SpectralLine, TemperatureFit,
};
pub use lm::{levenberg_marquardt, Convergence, LmOptions, LmReport};
pub use lorentz::{fit_lorentzians, LorentzianFit, LorentzianFitOptions, LorentzianPeak, PlDataset, PlSpectrum};
pub use synth::{synthesize_pl, synthesize_tracks, SynthOptions};
