//! Sampled-data analysis chain: discrete Fourier transforms over emission
//! time and delay, phase correction, post-selection and power maps.
//!
//! Transforms are direct sums evaluated at the requested frequencies, so any
//! frequency grid can be used and no zero-padding is involved.

mod power;
mod transforms;

pub use power::{power_map, PowerScale, RealMap, DEFAULT_DECADES};
pub use transforms::{
    ft_tau_to_omega_tau, ft_time_to_omega, phase_correct, post_select, resample_uniform, PhaseCorrection, SpectralMap,
};
