//! Multi-Lorentzian decomposition of a single photoluminescence spectrum.

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::lm::{levenberg_marquardt, Convergence, LmOptions};

/// One spectrum: intensities on an energy grid (μeV) at a temperature (K).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Serialize + DeserializeOwned")]
pub struct PlSpectrum<T> {
    pub temperature: T,
    pub energy: Vec<T>,
    pub intensity: Vec<T>,
}

impl<T: Real> PlSpectrum<T> {
    pub fn validate(&self) -> Result<()> {
        if self.energy.len() != self.intensity.len() || self.energy.len() < 3 {
            return Err(Error::InvalidGrid("spectrum needs >= 3 points and matching lengths".into()));
        }
        if self.energy.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("energy grid must be strictly increasing".into()));
        }
        if self.intensity.iter().any(|x| !x.is_finite() || *x < T::zero()) {
            return Err(Error::InvalidParams("intensities must be finite and >= 0".into()));
        }
        if !(self.temperature >= T::zero()) {
            return Err(Error::InvalidParams("temperature must be >= 0 K".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Serialize + DeserializeOwned")]
pub struct PlDataset<T> {
    pub spectra: Vec<PlSpectrum<T>>,
}

impl<T: Real> PlDataset<T> {
    pub fn validate(&self) -> Result<()> {
        self.spectra.iter().try_for_each(|s| s.validate())
    }
}

/// `A·γ²/((E − E₀)² + γ²)`; widths are HWHM.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LorentzianPeak<T> {
    pub center: T,
    pub hwhm: T,
    pub amplitude: T,
    pub center_err: T,
    pub hwhm_err: T,
    pub amplitude_err: T,
}

impl<T: Real> LorentzianPeak<T> {
    pub fn eval(&self, e: T) -> T {
        lorentzian(e, self.center, self.hwhm, self.amplitude)
    }
}

#[inline]
pub(crate) fn lorentzian<T: Real>(e: T, center: T, hwhm: T, amplitude: T) -> T {
    let d = e - center;
    amplitude * hwhm * hwhm / (d * d + hwhm * hwhm)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzianFitOptions<T> {
    /// peaks are seeded at local maxima above this fraction of the maximum
    pub threshold: T,
    pub lm: LmOptions<T>,
}

impl<T: Real> Default for LorentzianFitOptions<T> {
    fn default() -> Self {
        Self { threshold: T::lit(0.05), lm: LmOptions::default() }
    }
}

#[derive(Clone, Debug)]
pub struct LorentzianFit<T> {
    /// sorted by center
    pub peaks: Vec<LorentzianPeak<T>>,
    pub background: T,
    pub residual_norm: T,
    /// correlation matrix over `[background, (center, hwhm, amplitude)…]`
    pub correlation: Option<Vec<Vec<T>>>,
    pub convergence: Convergence<T>,
}

/// Boxcar average over `2k + 1` samples, shrinking at the edges.
fn smooth<T: Real>(y: &[T], k: usize) -> Vec<T> {
    (0..y.len())
        .map(|i| {
            let lo = i.saturating_sub(k);
            let hi = (i + k).min(y.len() - 1);
            y[lo..=hi].iter().fold(T::zero(), |a, v| a + *v) / T::lit((hi - lo + 1) as f64)
        })
        .collect()
}

/// Local maxima above `floor` whose prominence exceeds `min_prominence`,
/// highest first.
fn prominent_maxima<T: Real>(y: &[T], floor: T, min_prominence: T) -> Vec<usize> {
    let n = y.len();
    let mut idx: Vec<usize> = (1..n - 1)
        .filter(|&i| y[i] >= y[i - 1] && y[i] > y[i + 1] && y[i] > floor)
        .filter(|&i| {
            let mut left = y[i];
            let mut j = i;
            while j > 0 && y[j - 1] <= y[i] {
                j -= 1;
                left = left.min(y[j]);
            }
            let mut right = y[i];
            let mut j = i;
            while j + 1 < n && y[j + 1] <= y[i] {
                j += 1;
                right = right.min(y[j]);
            }
            y[i] - left.max(right) > min_prominence
        })
        .collect();
    idx.sort_by(|&a, &b| y[b].partial_cmp(&y[a]).unwrap_or(std::cmp::Ordering::Equal));
    idx
}

/// Line seeds at the minima of the second derivative of a further smoothed
/// copy, which also resolves shoulders of overlapping lines. Highest
/// curvature first.
fn curvature_seeds<T: Real>(ys: &[T], dx: T, floor: T, max_peaks: usize) -> Vec<usize> {
    let n = ys.len();
    let k = (T::lit(5.0) / dx).round().to_usize().unwrap_or(1).max(1);
    let yss = smooth(&smooth(ys, k), k);
    if n < 2 * k + 3 {
        return prominent_maxima(ys, floor, T::zero()).into_iter().take(max_peaks).collect();
    }
    let mut curv = vec![T::zero(); n];
    for i in k..n - k {
        curv[i] = T::lit(2.0) * yss[i] - yss[i - k] - yss[i + k];
    }
    let cmax = curv.iter().fold(T::zero(), |m, v| m.max(*v));
    let mut idx: Vec<usize> = (1..n - 1)
        .filter(|&i| curv[i] >= curv[i - 1] && curv[i] > curv[i + 1])
        .filter(|&i| curv[i] > cmax * T::lit(0.1) && ys[i] > floor)
        .collect();
    idx.sort_by(|&a, &b| curv[b].partial_cmp(&curv[a]).unwrap_or(std::cmp::Ordering::Equal));
    idx.truncate(max_peaks);
    idx
}

/// Half width at half maximum around index `i`, read off the samples.
fn half_width<T: Real>(x: &[T], y: &[T], i: usize, base: T) -> T {
    let half = base + (y[i] - base) / T::lit(2.0);
    let mut l = i;
    while l > 0 && y[l] > half {
        l -= 1;
    }
    let mut r = i;
    while r + 1 < y.len() && y[r] > half {
        r += 1;
    }
    let w = (x[r] - x[l]) / T::lit(2.0);
    let dx = (x[x.len() - 1] - x[0]) / T::lit((x.len() - 1) as f64);
    w.max(dx)
}

fn model<T: Real>(p: &[T], e: T) -> T {
    let mut v = p[0];
    for k in 0..(p.len() - 1) / 3 {
        v += lorentzian(e, p[1 + 3 * k], p[2 + 3 * k], p[3 + 3 * k]);
    }
    v
}

struct Trial<T> {
    params: Vec<T>,
    report: super::lm::LmReport<T>,
}

fn fit_with<T: Real>(s: &PlSpectrum<T>, init: Vec<T>, opts: &LmOptions<T>) -> Result<Trial<T>> {
    // widths and heights first with the centers held, then everything
    let held = fit_stage(s, init, opts, true)?;
    fit_stage(s, held.params, opts, false)
}

fn fit_stage<T: Real>(s: &PlSpectrum<T>, init: Vec<T>, opts: &LmOptions<T>, hold_centers: bool) -> Result<Trial<T>> {
    let x = &s.energy;
    let y = &s.intensity;
    let span = x[x.len() - 1] - x[0];
    let dx = span / T::lit((x.len() - 1) as f64);
    let ymax = y.iter().fold(T::zero(), |m, v| m.max(*v)).max(T::min_positive_value());
    let np = (init.len() - 1) / 3;
    let mut scales = vec![ymax * T::lit(0.01)];
    let mut lower = vec![-ymax];
    let mut upper = vec![ymax];
    for k in 0..np {
        let c = init[1 + 3 * k];
        let (clo, chi) = if hold_centers { (c, c) } else { (x[0], x[x.len() - 1]) };
        scales.extend([dx, dx, ymax * T::lit(0.01)]);
        lower.extend([clo, dx * T::lit(0.05), T::zero()]);
        upper.extend([chi, span, ymax * T::lit(10.0)]);
    }
    let f = |p: &[T]| Ok(x.iter().zip(y).map(|(e, yi)| model(p, *e) - *yi).collect());
    let report = levenberg_marquardt(f, &init, &scales, &lower, &upper, opts)?;
    Ok(Trial { params: report.x.clone(), report })
}

/// Fits up to `max_peaks` Lorentzians plus a constant background.
///
/// Seeds come from local maxima above the threshold. While peaks remain
/// available, the largest positive residual above the threshold seeds an
/// extra line, so overlapping lines are resolved rather than merged.
pub fn fit_lorentzians<T: Real>(s: &PlSpectrum<T>, max_peaks: usize, opts: &LorentzianFitOptions<T>) -> Result<LorentzianFit<T>> {
    s.validate()?;
    if max_peaks == 0 {
        return Err(Error::InvalidParams("max_peaks must be >= 1".into()));
    }
    let x = &s.energy;
    let y = &s.intensity;
    let base = y.iter().fold(T::infinity(), |m, v| m.min(*v));
    let ymax = y.iter().fold(T::zero(), |m, v| m.max(*v));
    if !(ymax > base) {
        return Err(Error::InvalidParams("spectrum is flat".into()));
    }
    let span = x[x.len() - 1] - x[0];
    let dx = span / T::lit((x.len() - 1) as f64);
    let k = (T::lit(3.0) / dx).round().to_usize().unwrap_or(0);
    let ys = smooth(y, k);
    let floor = base + (ymax - base) * opts.threshold;
    let seeds = curvature_seeds(&ys, dx, floor, max_peaks);
    let mut init = vec![base];
    for &i in &seeds {
        init.extend([x[i], half_width(x, &ys, i, base), ys[i] - base]);
    }
    if seeds.is_empty() {
        let i = (0..ys.len()).fold(0, |b, i| if ys[i] > ys[b] { i } else { b });
        init.extend([x[i], half_width(x, &ys, i, base), ys[i] - base]);
    }
    let mut best = fit_with(s, init, &opts.lm)?;
    while (best.params.len() - 1) / 3 < max_peaks {
        let resid: Vec<T> = x.iter().zip(y).map(|(e, yi)| *yi - model(&best.params, *e)).collect();
        let rs = smooth(&resid, k);
        let i = (0..rs.len()).fold(0, |b, i| if rs[i] > rs[b] { i } else { b });
        if !(rs[i] > (ymax - base) * opts.threshold) {
            break;
        }
        let mut init = best.params.clone();
        init.extend([x[i], half_width(x, &rs, i, T::zero()), rs[i]]);
        let trial = fit_with(s, init, &opts.lm)?;
        let np = (trial.params.len() - 1) / 3;
        let added_ok = (0..np).all(|p| {
            trial.params[3 + 3 * p] > (ymax - base) * opts.threshold && trial.params[2 + 3 * p] > dx * T::lit(2.0)
        });
        if !(trial.report.cost < best.report.cost) || !added_ok {
            break;
        }
        best = trial;
    }

    let err = best.report.uncertainties();
    let np = (best.params.len() - 1) / 3;
    let mut peaks: Vec<LorentzianPeak<T>> = (0..np)
        .map(|k| LorentzianPeak {
            center: best.params[1 + 3 * k],
            hwhm: best.params[2 + 3 * k],
            amplitude: best.params[3 + 3 * k],
            center_err: err[1 + 3 * k],
            hwhm_err: err[2 + 3 * k],
            amplitude_err: err[3 + 3 * k],
        })
        .collect();
    peaks.sort_by(|a, b| a.center.partial_cmp(&b.center).unwrap_or(std::cmp::Ordering::Equal));
    Ok(LorentzianFit {
        peaks,
        background: best.params[0],
        residual_norm: (best.report.cost * T::lit(2.0)).sqrt(),
        correlation: best.report.correlation(),
        convergence: best.report.convergence,
    })
}
