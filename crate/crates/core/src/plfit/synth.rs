//! Synthetic photoluminescence data for round-trip tests and demos.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::eigen::eigen;
use crate::error::{Error, Result};
use crate::model::{build_h1, SystemParams, TemperatureModel};
use crate::scalar::Real;

use super::global::{predicted_lines, ExcitonTrack};
use super::lorentz::{lorentzian, PlDataset, PlSpectrum};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthOptions<T> {
    /// Gaussian noise standard deviation relative to the spectrum maximum
    pub noise: T,
    pub seed: u64,
    /// energy range beyond the outermost lines (μeV)
    pub margin: T,
    /// energy step (μeV)
    pub step: T,
}

impl<T: Real> Default for SynthOptions<T> {
    fn default() -> Self {
        Self { noise: T::lit(0.01), seed: 2024, margin: T::lit(250.0), step: T::one() }
    }
}

fn normal(sigma: f64) -> Result<Normal<f64>> {
    Normal::new(0.0, sigma).map_err(|e| Error::InvalidParams(format!("noise: {e}")))
}

/// Spectra made of the predicted first-rung Lorentzians. Each line's peak
/// height is `½(1 + photon fraction)`. Noise is added and negative
/// intensities are clipped to zero.
pub fn synthesize_pl<T: Real>(params: &SystemParams<T>, temperatures: &[T], opts: &SynthOptions<T>) -> Result<PlDataset<T>> {
    if !(opts.step > T::zero()) || !(opts.noise >= T::zero()) {
        return Err(Error::InvalidParams("step must be > 0 and noise >= 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let dist = normal(opts.noise.to_f64_lossy())?;
    let mut spectra = Vec::with_capacity(temperatures.len());
    for &t in temperatures {
        let lines = predicted_lines(params, t)?;
        let tuned = params.tune(t)?;
        let e = eigen(&build_h1(&tuned))?;
        // eigen columns are sorted like the predicted lines
        let weights: Vec<T> = (0..lines.len())
            .map(|k| {
                let col = e.right.column(k);
                let total = col.iter().fold(T::zero(), |a, z| a + z.norm_sqr());
                (T::one() + col[0].norm_sqr() / total) / T::lit(2.0)
            })
            .collect();
        let lo = (lines[0].center - opts.margin).floor();
        let hi = (lines[lines.len() - 1].center + opts.margin).ceil();
        let n = ((hi - lo) / opts.step).floor().to_usize().unwrap_or(0) + 1;
        let energy: Vec<T> = (0..n).map(|i| lo + opts.step * T::lit(i as f64)).collect();
        let clean: Vec<T> = energy
            .iter()
            .map(|x| lines.iter().zip(&weights).fold(T::zero(), |a, (l, w)| a + lorentzian(*x, l.center, l.hwhm, *w)))
            .collect();
        let max = clean.iter().fold(T::zero(), |m, v| m.max(*v));
        let intensity = clean
            .iter()
            .map(|v| (*v + max * T::lit(dist.sample(&mut rng))).max(T::zero()))
            .collect();
        spectra.push(PlSpectrum { temperature: t, energy, intensity });
    }
    Ok(PlDataset { spectra })
}

/// Exciton energies `E(0) + F(T)` with additive Gaussian noise `sigma` (μeV).
pub fn synthesize_tracks<T: Real>(model: &TemperatureModel<T>, offsets: &[T], temperatures: &[T], sigma: T, seed: u64) -> Result<Vec<ExcitonTrack<T>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = normal(sigma.to_f64_lossy())?;
    offsets
        .iter()
        .map(|&e0| {
            let energies = temperatures
                .iter()
                .map(|&t| Ok(e0 + model.shift(t)? + T::lit(dist.sample(&mut rng))))
                .collect::<Result<Vec<T>>>()?;
            Ok(ExcitonTrack { temperatures: temperatures.to_vec(), energies })
        })
        .collect()
}
