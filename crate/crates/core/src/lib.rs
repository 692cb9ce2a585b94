//! Exact third-order four-wave-mixing (FWM) response of N two-level
//! emitters coupled to a single cavity mode.
//!
//! The Tavis–Cummings ladder is truncated at the second rung and damped by a
//! Lindblad dissipator. The crate computes the response as a finite sum of
//! exponentials, derives time-resolved, spectrally resolved and
//! two-dimensional maps from it, cross-checks everything against a
//! brute-force master-equation integrator, and fits temperature-dependent
//! photoluminescence data to recover the coupling parameters.
//!
//! Units: energies in μeV, times in ps, temperatures in K.
//!
//! Numerical code is generic over [`Real`]; the aliases below fix `f64`.

pub mod eigen;
pub mod error;
pub mod fwm;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod plfit;
pub mod scalar;
pub mod signal;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real, HBAR_UEV_PS};

pub type C64 = Cplx<f64>;
pub type Matrix = linalg::CMatrix<f64>;
pub type Params = model::SystemParams<f64>;
pub type TempModel = model::TemperatureModel<f64>;
pub type Tuned = model::TunedParams<f64>;
pub type Spectrum = model::RungSpectrum<f64>;
pub type Transitions = model::TransitionSet<f64>;
pub type Superoperator = model::SuperoperatorMatrix<f64>;
pub type Pulses = fwm::PulseConfig<f64>;
pub type Coefficients = fwm::ResponseCoefficients<f64>;
pub type TimeMap = fwm::FwmSignal<f64>;
pub type Map2D = fwm::Fwm2D<f64>;
pub type Spectral = signal::SpectralMap<f64>;
pub type Peak = plfit::LorentzianPeak<f64>;
pub type Fit = plfit::FitResult<f64>;
