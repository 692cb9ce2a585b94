use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fwm::{Fwm2D, FwmSignal, Grid};
use crate::linalg::CMatrix;
use crate::scalar::{cplx, czero, phase_factor, Cplx, Real};

/// Record of a phase correction applied to a [`SpectralMap`].
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseCorrection<T> {
    /// requested correction frequency (μeV, absolute)
    pub requested: T,
    /// grid frequency actually used
    pub omega_cor: T,
    pub column: usize,
    /// delays whose reference amplitude vanished and were left unchanged
    pub skipped: Vec<usize>,
}

/// `P̃(ω, τ)`: rows are delays, columns absolute frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMap<T: Real> {
    pub omega_grid: Grid<T>,
    pub tau_grid: Grid<T>,
    pub values: CMatrix<T>,
    pub correction: Option<PhaseCorrection<T>>,
    /// rotating-frame energy of the underlying time signal
    pub reference: T,
    pub survival_time: T,
}

/// Trapezoid weights for `n` uniform samples with spacing `h`.
fn trapezoid<T: Real>(n: usize, h: T) -> Vec<T> {
    let mut w = vec![h; n];
    if n > 0 {
        w[0] = h / T::lit(2.0);
        w[n - 1] = h / T::lit(2.0);
    }
    if n == 1 {
        w[0] = T::zero();
    }
    w
}

/// Discrete `∫ P(t) e^{iωt/ħ} dt` over the sampled emission times.
///
/// With `gamma_s` set, samples are damped by `e^{−γ_S t/ħ}` first, which
/// reproduces the Lorentzian spectrometer resolution of the closed form.
pub fn ft_time_to_omega<T: Real>(signal: &FwmSignal<T>, omega_grid: &Grid<T>, gamma_s: Option<T>) -> Result<SpectralMap<T>> {
    let h = signal.t_grid.uniform_step()?;
    let t = signal.t_grid.values();
    let w = trapezoid(t.len(), h);
    let gs = gamma_s.unwrap_or_else(T::zero);
    if gs < T::zero() {
        return Err(Error::InvalidParams(format!("gamma_s must be >= 0, got {gs}")));
    }
    // kernel[w][i] = weight_i · e^{i(ω − ref + iγ_S) t_i/ħ}
    let kernel: Vec<Vec<Cplx<T>>> = omega_grid
        .values()
        .par_iter()
        .map(|&om| {
            let z = cplx(om - signal.reference, gs);
            t.iter().zip(&w).map(|(ti, wi)| phase_factor(-z, *ti) * *wi).collect()
        })
        .collect();
    let n_tau = signal.tau_grid.len();
    let rows: Vec<Vec<Cplx<T>>> = (0..n_tau)
        .into_par_iter()
        .map(|r| {
            let p = signal.values.row(r);
            kernel
                .iter()
                .map(|k| k.iter().zip(&p).fold(czero(), |acc, (a, b)| acc + *a * *b))
                .collect()
        })
        .collect();
    Ok(SpectralMap {
        omega_grid: omega_grid.clone(),
        tau_grid: signal.tau_grid.clone(),
        values: CMatrix::from_fn(n_tau, omega_grid.len(), |i, j| rows[i][j]),
        correction: None,
        reference: signal.reference,
        survival_time: signal.survival_time,
    })
}

/// Multiplies every delay row by `e^{i(ω_cor τ/ħ − arg P̃(ω_cor, τ))}`.
///
/// `ω_cor` is snapped to the nearest grid frequency. The imposed phase
/// `ω_cor τ/ħ` is taken in the rotating frame of the map, i.e. with
/// `ω_cor − reference`. Rows whose amplitude at `ω_cor` is zero pass through
/// unchanged and are listed in [`PhaseCorrection::skipped`].
pub fn phase_correct<T: Real>(map: &SpectralMap<T>, omega_cor: T) -> Result<SpectralMap<T>> {
    if omega_cor < map.omega_grid.first() || omega_cor > map.omega_grid.last() {
        return Err(Error::InvalidGrid(format!("omega_cor {omega_cor} outside the frequency grid")));
    }
    let col = map.omega_grid.nearest(omega_cor);
    let used = map.omega_grid.values()[col];
    let mut out = map.clone();
    let mut skipped = Vec::new();
    for (r, &tau) in map.tau_grid.values().iter().enumerate() {
        let ref_val = map.values[(r, col)];
        if ref_val.norm() == T::zero() {
            skipped.push(r);
            continue;
        }
        // e^{i(ω τ/ħ)} = phase_factor(−ω, τ)
        let target = phase_factor(cplx(-(used - map.reference), T::zero()), tau);
        let rot = target * (ref_val.conj() / ref_val.norm());
        for c in 0..map.omega_grid.len() {
            out.values[(r, c)] = map.values[(r, c)] * rot;
        }
    }
    out.correction = Some(PhaseCorrection { requested: omega_cor, omega_cor: used, column: col, skipped });
    Ok(out)
}

/// Discrete transform over the delay onto the flipped `ω_τ` axis:
/// `P̄(ω, ω_τ) = ∫ P̃(ω, τ) e^{−i(ω_τ − ref)τ/ħ} dτ`.
///
/// With `positive_only` only samples with `τ ≥ 0` enter.
pub fn ft_tau_to_omega_tau<T: Real>(map: &SpectralMap<T>, omega_tau_grid: &Grid<T>, positive_only: bool) -> Result<Fwm2D<T>> {
    let h = map.tau_grid.uniform_step()?;
    let taus = map.tau_grid.values();
    let start = if positive_only {
        taus.iter()
            .position(|t| *t >= -h * T::lit(1e-9))
            .ok_or_else(|| Error::InvalidGrid("no non-negative delays".into()))?
    } else {
        0
    };
    let used = &taus[start..];
    let w = trapezoid(used.len(), h);
    let n_om = map.omega_grid.len();
    let rows: Vec<Vec<Cplx<T>>> = omega_tau_grid
        .values()
        .par_iter()
        .map(|&wt| {
            let kern: Vec<Cplx<T>> = used
                .iter()
                .zip(&w)
                .map(|(tau, wi)| phase_factor(cplx(wt - map.reference, T::zero()), *tau) * *wi)
                .collect();
            (0..n_om)
                .map(|c| kern.iter().enumerate().fold(czero(), |acc, (i, k)| acc + *k * map.values[(start + i, c)]))
                .collect()
        })
        .collect();
    Ok(Fwm2D {
        omega_grid: map.omega_grid.clone(),
        omega_tau_grid: omega_tau_grid.clone(),
        values: CMatrix::from_fn(omega_tau_grid.len(), n_om, |i, j| rows[i][j]),
        gamma_s: T::zero(),
        survival_time: map.survival_time,
        delay_axis_flipped: true,
        phase_correction: map.correction.as_ref().map(|c| c.omega_cor),
    })
}

/// Zeroes all samples emitted before `t_s`.
pub fn post_select<T: Real>(signal: &FwmSignal<T>, t_s: T) -> Result<FwmSignal<T>> {
    if !(t_s >= T::zero()) || t_s > signal.t_grid.last() {
        return Err(Error::InvalidGrid(format!("survival time {t_s} outside [0, {}]", signal.t_grid.last())));
    }
    let mut out = signal.clone();
    for (c, &t) in signal.t_grid.values().iter().enumerate() {
        if t < t_s {
            for r in 0..signal.tau_grid.len() {
                out.values[(r, c)] = czero();
            }
        }
    }
    out.survival_time = t_s;
    Ok(out)
}

/// Linear interpolation of a time signal onto a uniform grid of `n` points
/// spanning the original range.
pub fn resample_uniform<T: Real>(signal: &FwmSignal<T>, n: usize) -> Result<FwmSignal<T>> {
    if n < 2 {
        return Err(Error::InvalidGrid("resampling needs at least two points".into()));
    }
    let src = signal.t_grid.values();
    let grid = Grid::linspace(signal.t_grid.first(), signal.t_grid.last(), n)?;
    let mut values = CMatrix::zeros(signal.tau_grid.len(), n);
    for (c, &t) in grid.values().iter().enumerate() {
        let hi = src.partition_point(|x| *x < t).clamp(1, src.len().max(2) - 1).min(src.len() - 1);
        let lo = hi.saturating_sub(1);
        let f = if src.len() == 1 || src[hi] == src[lo] { T::zero() } else { (t - src[lo]) / (src[hi] - src[lo]) };
        for r in 0..signal.tau_grid.len() {
            values[(r, c)] = signal.values[(r, lo)] * (T::one() - f) + signal.values[(r, hi)] * f;
        }
    }
    Ok(FwmSignal { t_grid: grid, values, ..signal.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fwm::Provenance;
    use crate::HBAR_UEV_PS as HBAR;
    use num_complex::Complex64 as C;

    fn single_exponential(w: C, amp: C, t_max: f64, dt: f64, taus: &[f64]) -> FwmSignal<f64> {
        let t_grid = Grid::range(0.0, t_max, dt).unwrap();
        let tau_grid = Grid::new(taus.to_vec()).unwrap();
        let values = CMatrix::from_fn(taus.len(), t_grid.len(), |_, j| amp * phase_factor(w, t_grid.values()[j]));
        FwmSignal { t_grid, tau_grid, values, provenance: Provenance::Analytic, survival_time: 0.0, reference: 0.0 }
    }

    #[test]
    fn lorentzian_matches_closed_form() {
        let w = C::new(30.0, -20.0);
        let s = single_exponential(w, C::new(1.0, 0.5), 600.0, 0.05, &[0.0]);
        let om = Grid::range(-200.0, 200.0, 2.0).unwrap();
        let spec = ft_time_to_omega(&s, &om, Some(4.0)).unwrap();
        let mut max_err: f64 = 0.0;
        let mut max_ref: f64 = 0.0;
        for (j, &o) in om.values().iter().enumerate() {
            let exact = C::new(1.0, 0.5) * C::new(0.0, HBAR) / (C::new(o, 4.0) - w);
            max_err = max_err.max((spec.values[(0, j)] - exact).norm());
            max_ref = max_ref.max(exact.norm());
        }
        assert!(max_err / max_ref < 1e-3, "{}", max_err / max_ref);
    }

    #[test]
    fn zero_signal() {
        let s = single_exponential(C::new(0.0, -1.0), C::new(0.0, 0.0), 10.0, 0.1, &[0.0, 1.0]);
        let spec = ft_time_to_omega(&s, &Grid::range(-5.0, 5.0, 1.0).unwrap(), None).unwrap();
        assert_eq!(spec.values.max_abs(), 0.0);
    }

    #[test]
    fn nonuniform_rejected() {
        let mut s = single_exponential(C::new(0.0, -1.0), C::new(1.0, 0.0), 1.0, 0.5, &[0.0]);
        s.t_grid = Grid::new(vec![0.0, 0.4, 1.0]).unwrap();
        assert!(ft_time_to_omega(&s, &Grid::new(vec![0.0]).unwrap(), None).is_err());
    }

    #[test]
    fn parseval() {
        let w = C::new(10.0, -15.0);
        let s = single_exponential(w, C::new(1.0, 0.0), 300.0, 0.2, &[0.0]);
        let dom = 1.0;
        let om = Grid::range(-3000.0, 3000.0, dom).unwrap();
        let spec = ft_time_to_omega(&s, &om, None).unwrap();
        let lhs: f64 = s.values.row(0).iter().map(|z| z.norm_sqr()).sum::<f64>() * 0.2;
        let rhs: f64 = spec.values.row(0).iter().map(|z| z.norm_sqr()).sum::<f64>() * dom / (2.0 * std::f64::consts::PI * HBAR);
        assert!((lhs - rhs).abs() / lhs < 2e-2, "{lhs} {rhs}");
    }

    fn two_line_map() -> SpectralMap<f64> {
        let taus: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let s = single_exponential(C::new(0.0, -10.0), C::new(1.0, 0.0), 100.0, 0.5, &taus);
        let mut s2 = s.clone();
        for (r, &tau) in taus.iter().enumerate() {
            for c in 0..s.t_grid.len() {
                let t = s.t_grid.values()[c];
                let d = phase_factor(C::new(-60.0, -12.0), tau) + phase_factor(C::new(-20.0, -8.0), tau) * 0.5;
                s2.values[(r, c)] = d * (phase_factor(C::new(60.0, -10.0), t) + phase_factor(C::new(20.0, -10.0), t));
            }
        }
        ft_time_to_omega(&s2, &Grid::range(-100.0, 100.0, 5.0).unwrap(), None).unwrap()
    }

    #[test]
    fn phase_correction_contract() {
        let m = two_line_map();
        let c = phase_correct(&m, 61.0).unwrap();
        let rec = c.correction.as_ref().unwrap();
        assert_eq!(rec.omega_cor, 60.0);
        assert!(rec.skipped.is_empty());
        for r in 0..m.tau_grid.len() {
            for k in 0..m.omega_grid.len() {
                assert!((c.values[(r, k)].norm() - m.values[(r, k)].norm()).abs() < 1e-12 * m.values.max_abs());
            }
            let tau = m.tau_grid.values()[r];
            let residual = c.values[(r, rec.column)].arg() - 60.0 * tau / HBAR;
            let wrapped = residual - (residual / (2.0 * std::f64::consts::PI)).round() * 2.0 * std::f64::consts::PI;
            assert!(wrapped.abs() < 1e-10, "{wrapped}");
        }
        let twice = phase_correct(&c, 61.0).unwrap();
        assert!((&twice.values - &c.values).max_abs() < 1e-12 * c.values.max_abs());
        assert!(phase_correct(&m, 500.0).is_err());
    }

    #[test]
    fn zero_reference_column_flagged() {
        let mut m = two_line_map();
        let col = m.omega_grid.nearest(0.0);
        m.values[(3, col)] = C::new(0.0, 0.0);
        let c = phase_correct(&m, 0.0).unwrap();
        assert_eq!(c.correction.as_ref().unwrap().skipped, vec![3]);
        assert_eq!(c.values.row(3), m.values.row(3));
    }

    #[test]
    fn delay_transform_of_single_line() {
        // P̃(ω, τ) = e^{i λ* τ/ħ} with λ = 50 − 10i peaks at flipped ω_τ = 50
        let taus = Grid::range(0.0, 800.0, 0.5).unwrap();
        let om = Grid::new(vec![0.0]).unwrap();
        let lam = C::new(50.0, -10.0);
        let values = CMatrix::from_fn(taus.len(), 1, |r, _| phase_factor(-lam.conj(), taus.values()[r]));
        let map = SpectralMap { omega_grid: om, tau_grid: taus, values, correction: None, reference: 0.0, survival_time: 0.0 };
        let wt = Grid::range(0.0, 100.0, 1.0).unwrap();
        let d = ft_tau_to_omega_tau(&map, &wt, true).unwrap();
        let (mut best, mut arg) = (0.0, 0);
        for r in 0..wt.len() {
            if d.values[(r, 0)].norm() > best {
                best = d.values[(r, 0)].norm();
                arg = r;
            }
        }
        assert_eq!(wt.values()[arg], 50.0);
        let exact = C::new(0.0, HBAR) / (lam.conj() - 50.0);
        assert!((d.values[(arg, 0)] - exact).norm() / exact.norm() < 1e-3);
    }

    #[test]
    fn post_select_zeroes_early_times() {
        let s = single_exponential(C::new(0.0, -1.0), C::new(1.0, 0.0), 10.0, 1.0, &[0.0]);
        assert_eq!(post_select(&s, 0.0).unwrap().values, s.values);
        let p = post_select(&s, 4.5).unwrap();
        assert!(p.values.row(0)[..5].iter().all(|z| z.norm() == 0.0));
        assert_eq!(p.values.row(0)[5..], s.values.row(0)[5..]);
        assert!(post_select(&s, 11.0).is_err());
    }

    #[test]
    fn resample_is_exact_on_same_grid() {
        let s = single_exponential(C::new(3.0, -1.0), C::new(1.0, 0.0), 10.0, 1.0, &[0.0]);
        let r = resample_uniform(&s, 11).unwrap();
        assert!((&r.values - &s.values).max_abs() < 1e-14);
    }
}
