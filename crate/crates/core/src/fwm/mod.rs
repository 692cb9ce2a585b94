//! Third-order four-wave-mixing response and the observables derived from it.

pub mod maps;
pub mod pulses;
pub mod response;
pub mod sweep;

pub use maps::*;
pub use pulses::{apply_pulse1, apply_pulse2, PulseConfig, PulseOperators};
pub use response::{fwm_polarization, response_coefficients, response_coefficients_from, ResponseCoefficients};
pub use sweep::{detuning_sweep, panel_at_temperature, solve_temperature_for_detuning, SweepOutputs, SweepPanel, SweepRequest, DETUNING_TOLERANCE};
