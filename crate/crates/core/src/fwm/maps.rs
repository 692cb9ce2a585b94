//! Sampled observables: time-resolved maps, spectra, 2D spectra and the
//! time-integrated power.
//!
//! Fourier transforms use the kernel `e^{+iωt/ħ}` over the emission time and
//! `e^{+iω_τ τ/ħ}` over the delay. Frequency axes are absolute μeV; time
//! signals are reported in the frame rotating at the reference energy.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{cplx, czero, phase_factor, Cplx, Real};

use super::response::ResponseCoefficients;

/// Strictly increasing sample axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Grid<T>(Vec<T>);

impl<T: Real> Grid<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidGrid("grid is empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("grid has non-finite values".into()));
        }
        if values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("grid must be strictly increasing".into()));
        }
        Ok(Self(values))
    }

    /// `start, start + step, …` up to and including `stop` (within step/1000).
    pub fn range(start: T, stop: T, step: T) -> Result<Self> {
        if !(step > T::zero()) || !(stop >= start) {
            return Err(Error::InvalidGrid(format!("bad range {start}..{stop} step {step}")));
        }
        let n = ((stop - start) / step + T::lit(1e-3)).floor().to_usize().unwrap_or(0) + 1;
        Self::new((0..n).map(|i| start + step * T::lit(i as f64)).collect())
    }

    pub fn linspace(start: T, stop: T, n: usize) -> Result<Self> {
        if n == 1 {
            return Self::new(vec![start]);
        }
        let step = (stop - start) / T::lit((n - 1) as f64);
        Self::new((0..n).map(|i| start + step * T::lit(i as f64)).collect())
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> T {
        self.0[0]
    }

    pub fn last(&self) -> T {
        self.0[self.0.len() - 1]
    }

    /// Uniform spacing, or an error if the grid is not uniform to 1e-9 relative.
    pub fn uniform_step(&self) -> Result<T> {
        if self.len() < 2 {
            return Err(Error::InvalidGrid("uniform grid needs at least two points".into()));
        }
        let step = (self.last() - self.first()) / T::lit((self.len() - 1) as f64);
        let tol = step.abs() * T::lit(1e-9);
        for (i, v) in self.0.iter().enumerate() {
            let expect = self.first() + step * T::lit(i as f64);
            if (*v - expect).abs() > tol.max(v.abs() * T::epsilon() * T::lit(16.0)) {
                return Err(Error::InvalidGrid("grid is not uniform".into()));
            }
        }
        Ok(step)
    }

    /// Index of the grid point nearest to `x`.
    pub fn nearest(&self, x: T) -> usize {
        let mut best = 0;
        for (i, v) in self.0.iter().enumerate() {
            if (*v - x).abs() < (self.0[best] - x).abs() {
                best = i;
            }
        }
        best
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(self.0.iter().map(|v| f(*v)).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Analytic,
    Oracle,
}

/// `P(t, τ)` sampled on a grid: rows are delays, columns emission times.
#[derive(Clone, Debug, PartialEq)]
pub struct FwmSignal<T: Real> {
    pub t_grid: Grid<T>,
    pub tau_grid: Grid<T>,
    pub values: CMatrix<T>,
    pub provenance: Provenance,
    /// samples with `t` below this were removed (0 when none)
    pub survival_time: T,
    /// energy of the rotating frame (μeV)
    pub reference: T,
}

/// `P̄(ω, ω_τ)`: rows are `ω_τ`, columns `ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct Fwm2D<T: Real> {
    pub omega_grid: Grid<T>,
    pub omega_tau_grid: Grid<T>,
    pub values: CMatrix<T>,
    pub gamma_s: T,
    pub survival_time: T,
    /// The delay axis is displayed as `−ω_τ`, so first-order resonances
    /// appear at `+Re λ1` and the diagonal is `ω = ω_τ`.
    pub delay_axis_flipped: bool,
    /// `Some(ω_cor)` when the delay phase was corrected before transforming.
    pub phase_correction: Option<T>,
}

/// Evaluate `P(t, τ)` on a grid.
pub fn fwm_time_map<T: Real>(coeffs: &ResponseCoefficients<T>, t_grid: &Grid<T>, tau_grid: &Grid<T>) -> Result<FwmSignal<T>> {
    if t_grid.first() < T::zero() {
        return Err(Error::InvalidGrid("emission times must be >= 0".into()));
    }
    let omegas = coeffs.omegas();
    let nt = t_grid.len();
    // e^{−iω̃_j t/ħ} for all (t, j)
    let emission: Vec<Vec<Cplx<T>>> = t_grid
        .values()
        .par_iter()
        .map(|&t| omegas.iter().map(|w| phase_factor(*w, t)).collect())
        .collect();
    let rows: Vec<Vec<Cplx<T>>> = tau_grid
        .values()
        .par_iter()
        .map(|&tau| {
            let w = coeffs.delay_weights(tau);
            emission
                .iter()
                .map(|e| e.iter().zip(&w).fold(czero(), |acc, (x, c)| acc + *x * *c))
                .collect()
        })
        .collect();
    let values = CMatrix::from_fn(tau_grid.len(), nt, |i, j| rows[i][j]);
    Ok(FwmSignal {
        t_grid: t_grid.clone(),
        tau_grid: tau_grid.clone(),
        values,
        provenance: Provenance::Analytic,
        survival_time: T::zero(),
        reference: coeffs.reference,
    })
}

/// Emission-frequency factor `∫_{t_s}^∞ e^{i(ω − ω̃ + iγ_S)t/ħ} dt`.
fn emission_factor<T: Real>(omega_rel: T, omega_tilde: Cplx<T>, gamma_s: T, t_s: T) -> Cplx<T> {
    let hbar = T::hbar();
    let z = cplx(omega_rel, gamma_s) - omega_tilde;
    let base = cplx(T::zero(), hbar) / z;
    if t_s == T::zero() {
        base
    } else {
        // e^{i z t_s/ħ}
        base * phase_factor(-z, t_s)
    }
}

/// Closed-form `P̃(ω, τ)` including the spectrometer resolution `γ_S`.
pub fn fwm_spectrum<T: Real>(coeffs: &ResponseCoefficients<T>, omega_grid: &Grid<T>, tau: T) -> Vec<Cplx<T>> {
    fwm_spectrum_with(coeffs, omega_grid, tau, coeffs.gamma_s, T::zero())
}

/// As [`fwm_spectrum`] with explicit resolution and survival time.
pub fn fwm_spectrum_with<T: Real>(coeffs: &ResponseCoefficients<T>, omega_grid: &Grid<T>, tau: T, gamma_s: T, t_s: T) -> Vec<Cplx<T>> {
    let w = coeffs.delay_weights(tau);
    let omegas = coeffs.omegas();
    omega_grid
        .values()
        .iter()
        .map(|&om| {
            let rel = om - coeffs.reference;
            omegas
                .iter()
                .zip(&w)
                .fold(czero(), |acc, (ot, c)| acc + *c * emission_factor(rel, *ot, gamma_s, t_s))
        })
        .collect()
}

/// Closed-form `P̃(ω, τ)` map: rows are delays, columns frequencies.
pub fn fwm_spectrum_map<T: Real>(coeffs: &ResponseCoefficients<T>, omega_grid: &Grid<T>, tau_grid: &Grid<T>) -> CMatrix<T> {
    let rows: Vec<Vec<Cplx<T>>> = tau_grid
        .values()
        .par_iter()
        .map(|&tau| fwm_spectrum(coeffs, omega_grid, tau))
        .collect();
    CMatrix::from_fn(tau_grid.len(), omega_grid.len(), |i, j| rows[i][j])
}

/// Closed-form two-dimensional spectrum from positive delays only.
///
/// With `t_s > 0` only emission after the survival time contributes.
pub fn fwm_2d<T: Real>(coeffs: &ResponseCoefficients<T>, omega_grid: &Grid<T>, omega_tau_grid: &Grid<T>, t_s: T) -> Result<Fwm2D<T>> {
    if !(t_s >= T::zero()) {
        return Err(Error::InvalidGrid(format!("survival time must be >= 0, got {t_s}")));
    }
    let hbar = T::hbar();
    let omegas = coeffs.omegas();
    let n1 = coeffs.lambda1.len();
    // F_k(ω) = Σ_j a_jk E_j(ω)
    let f: Vec<Vec<Cplx<T>>> = omega_grid
        .values()
        .par_iter()
        .map(|&om| {
            let rel = om - coeffs.reference;
            let e: Vec<Cplx<T>> = omegas.iter().map(|ot| emission_factor(rel, *ot, coeffs.gamma_s, t_s)).collect();
            (0..n1)
                .map(|k| e.iter().enumerate().fold(czero(), |acc, (j, ej)| acc + coeffs.positive[(j, k)] * *ej))
                .collect()
        })
        .collect();
    // D_k(ω_τ') = iħ / (λ1_k* − ω_τ'_rel) on the flipped axis
    let rows: Vec<Vec<Cplx<T>>> = omega_tau_grid
        .values()
        .par_iter()
        .map(|&wt| {
            let rel = wt - coeffs.reference;
            let d: Vec<Cplx<T>> = coeffs
                .lambda1
                .iter()
                .map(|l| cplx(T::zero(), hbar) / (l.conj() - cplx(rel, T::zero())))
                .collect();
            f.iter()
                .map(|fk| fk.iter().zip(&d).fold(czero(), |acc, (a, b)| acc + *a * *b))
                .collect()
        })
        .collect();
    let values = CMatrix::from_fn(omega_tau_grid.len(), omega_grid.len(), |i, j| rows[i][j]);
    Ok(Fwm2D {
        omega_grid: omega_grid.clone(),
        omega_tau_grid: omega_tau_grid.clone(),
        values,
        gamma_s: coeffs.gamma_s,
        survival_time: t_s,
        delay_axis_flipped: true,
        phase_correction: None,
    })
}

/// How [`time_integrated_power_with`] evaluates `∫₀^∞ |P(t, τ)|² dt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IntegrationMethod<T> {
    /// pairwise `c_j c_j'* ħ / (i(ω̃_j − ω̃_j'*))`
    ClosedForm,
    /// composite Simpson rule on `[0, t_max]` with step `dt`
    Quadrature { dt: T, t_max: T },
}

pub fn time_integrated_power<T: Real>(coeffs: &ResponseCoefficients<T>, tau_grid: &Grid<T>) -> Vec<T> {
    time_integrated_power_with(coeffs, tau_grid, IntegrationMethod::ClosedForm)
}

pub fn time_integrated_power_with<T: Real>(coeffs: &ResponseCoefficients<T>, tau_grid: &Grid<T>, method: IntegrationMethod<T>) -> Vec<T> {
    let omegas = coeffs.omegas();
    let hbar = T::hbar();
    match method {
        IntegrationMethod::ClosedForm => {
            // kernel K_jj' = ħ / (i(ω̃_j − ω̃_j'*))
            let m = omegas.len();
            let kernel = CMatrix::from_fn(m, m, |j, l| {
                cplx(hbar, T::zero()) / (cplx(T::zero(), T::one()) * (omegas[j] - omegas[l].conj()))
            });
            tau_grid
                .values()
                .par_iter()
                .map(|&tau| {
                    let c = coeffs.delay_weights(tau);
                    let kc = kernel.vec_mat(&c);
                    // Σ_j Σ_l c_j K_jl c_l*
                    kc.iter().zip(&c).fold(T::zero(), |acc, (x, cl)| acc + (*x * cl.conj()).re)
                })
                .collect()
        }
        IntegrationMethod::Quadrature { dt, t_max } => {
            let mut n = (t_max / dt).round().to_usize().unwrap_or(2).max(2);
            if n % 2 == 1 {
                n += 1;
            }
            let h = t_max / T::lit(n as f64);
            let emission: Vec<Vec<Cplx<T>>> = (0..=n)
                .map(|i| {
                    let t = h * T::lit(i as f64);
                    omegas.iter().map(|w| phase_factor(*w, t)).collect()
                })
                .collect();
            tau_grid
                .values()
                .par_iter()
                .map(|&tau| {
                    let c = coeffs.delay_weights(tau);
                    let mut acc = T::zero();
                    for (i, e) in emission.iter().enumerate() {
                        let p = e.iter().zip(&c).fold(czero::<T>(), |s, (x, y)| s + *x * *y);
                        let w = if i == 0 || i == n {
                            T::one()
                        } else if i % 2 == 1 {
                            T::lit(4.0)
                        } else {
                            T::lit(2.0)
                        };
                        acc += w * p.norm_sqr();
                    }
                    acc * h / T::lit(3.0)
                })
                .collect()
        }
    }
}

/// Default grids: `t ∈ [0, 200]` ps step 0.1, `τ ∈ [−50, 100]` ps step 0.5,
/// and `ω` spanning the transitions ±300 μeV at 1 μeV.
#[derive(Clone, Debug, PartialEq)]
pub struct MapGrids<T: Real> {
    pub t: Grid<T>,
    pub tau: Grid<T>,
    pub omega: Grid<T>,
    pub omega_tau: Grid<T>,
}

impl<T: Real> MapGrids<T> {
    pub fn default_for(coeffs: &ResponseCoefficients<T>) -> Result<Self> {
        let t = Grid::range(T::zero(), T::lit(200.0), T::lit(0.1))?;
        let tau = Grid::range(T::lit(-50.0), T::lit(100.0), T::lit(0.5))?;
        let omega = frequency_span(coeffs.omegas().iter().map(|w| w.re), coeffs.reference)?;
        let omega_tau = frequency_span(coeffs.lambda1.iter().map(|w| w.re), coeffs.reference)?;
        Ok(Self { t, tau, omega, omega_tau })
    }
}

fn frequency_span<T: Real>(re: impl Iterator<Item = T>, reference: T) -> Result<Grid<T>> {
    let (lo, hi) = re.fold((T::infinity(), T::neg_infinity()), |(lo, hi), x| (lo.min(x), hi.max(x)));
    let margin = T::lit(300.0);
    let start = (lo - margin + reference).floor();
    let stop = (hi + margin + reference).ceil();
    Grid::range(start, stop, T::one())
}
