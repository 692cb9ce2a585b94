use crate::error::{Error, Result};
use crate::model::{SystemParams, TunedParams};
use crate::scalar::Real;

/// Coupling-weighted cavity detuning `δ = ω_C − Σgₙω_Xn / Σgₙ` in μeV.
pub fn average_detuning<T: Real>(tuned: &TunedParams<T>) -> Result<T> {
    let gsum = tuned.g.iter().fold(T::zero(), |a, g| a + *g);
    if !(gsum > T::zero()) {
        return Err(Error::InvalidParams("average detuning needs at least one nonzero coupling".into()));
    }
    // weight the offsets from ω_C so a common shift cancels exactly
    let weighted = tuned
        .omega_x
        .iter()
        .zip(&tuned.g)
        .fold(T::zero(), |a, (w, g)| a + *g * (*w - tuned.omega_c));
    Ok(-weighted / gsum)
}

/// `δ(T)` for static parameters.
pub fn detuning_at<T: Real>(params: &SystemParams<T>, temperature: T) -> Result<T> {
    average_detuning(&params.tune(temperature)?)
}
