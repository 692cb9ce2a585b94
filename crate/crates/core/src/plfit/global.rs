//! Global fit of polariton line positions and widths versus temperature.

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::eigen::{eigenvalues, sort_eigenvalues};
use crate::error::{Error, Result};
use crate::model::{build_h1, SystemParams, TemperatureModel};
use crate::scalar::Real;

use super::lm::{levenberg_marquardt, Convergence, LmOptions, LmReport};
use super::lorentz::LorentzianFit;

/// Observable first-rung line: center `Re λ1` and HWHM `−Im λ1 + γ_S`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralLine<T> {
    pub center: T,
    pub hwhm: T,
}

/// Predicted PL lines at temperature `t`, sorted by center.
pub fn predicted_lines<T: Real>(params: &SystemParams<T>, t: T) -> Result<Vec<SpectralLine<T>>> {
    let tuned = params.tune(t)?;
    let mut lam = eigenvalues(&build_h1(&tuned))?;
    sort_eigenvalues(&mut lam);
    Ok(lam
        .iter()
        .map(|l| SpectralLine { center: l.re + tuned.reference, hwhm: -l.im + params.gamma_s })
        .collect())
}

/// Lines measured at one temperature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Serialize + DeserializeOwned")]
pub struct PeakObservation<T> {
    pub temperature: T,
    pub lines: Vec<SpectralLine<T>>,
}

impl<T: Real> PeakObservation<T> {
    pub fn from_fit(temperature: T, fit: &LorentzianFit<T>) -> Self {
        Self {
            temperature,
            lines: fit.peaks.iter().map(|p| SpectralLine { center: p.center, hwhm: p.hwhm }).collect(),
        }
    }
}

/// Order-preserving matching of observed to predicted centers (both sorted)
/// with minimal total `|Δ center|`. Returns `(observed, predicted)` pairs;
/// the longer list has entries left out.
pub fn assign_lines<T: Real>(observed: &[T], predicted: &[T]) -> Vec<(usize, usize)> {
    let (m, n) = (observed.len(), predicted.len());
    let inf = T::infinity();
    let mut dp = vec![vec![inf; n + 1]; m + 1];
    dp[0][0] = T::zero();
    for i in 0..=m {
        for k in 0..=n {
            if i == 0 && k == 0 {
                continue;
            }
            let mut best = inf;
            if i > 0 && k > 0 {
                best = best.min(dp[i - 1][k - 1] + (observed[i - 1] - predicted[k - 1]).abs());
            }
            if m > n && i > 0 {
                best = best.min(dp[i - 1][k]);
            }
            if n > m && k > 0 {
                best = best.min(dp[i][k - 1]);
            }
            dp[i][k] = best;
        }
    }
    let mut pairs = Vec::new();
    let (mut i, mut k) = (m, n);
    while i > 0 && k > 0 {
        let here = dp[i][k];
        if here == dp[i - 1][k - 1] + (observed[i - 1] - predicted[k - 1]).abs() {
            pairs.push((i - 1, k - 1));
            i -= 1;
            k -= 1;
        } else if m > n && here == dp[i - 1][k] {
            i -= 1;
        } else {
            k -= 1;
        }
    }
    pairs.reverse();
    pairs
}

/// One-sigma uncertainties of the fitted quantities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Serialize + DeserializeOwned")]
pub struct ParamUncertainties<T> {
    pub omega_x0: Vec<T>,
    pub omega_c0: T,
    pub g: Vec<T>,
    pub gamma_x: Vec<T>,
    pub gamma_c: T,
    pub eta: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Serialize + DeserializeOwned")]
pub struct FitResult<T> {
    pub params: SystemParams<T>,
    pub uncertainties: ParamUncertainties<T>,
    /// `‖r‖₂` over centers and widths (μeV)
    pub residual_norm: T,
    pub convergence: Convergence<T>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GlobalFitOptions<T> {
    pub lm: LmOptions<T>,
    /// reassignment rounds of lines to branches
    pub max_rounds: usize,
}

impl<T: Real> Default for GlobalFitOptions<T> {
    fn default() -> Self {
        Self { lm: LmOptions::default(), max_rounds: 5 }
    }
}

/// Packing of the free parameters. Energies are stored as offsets from the
/// initial guess so every entry is of order the line widths.
struct Layout<T> {
    n: usize,
    origin: SystemParams<T>,
}

impl<T: Real> Layout<T> {
    fn len(&self) -> usize {
        3 * self.n + 3
    }

    fn pack(&self, p: &SystemParams<T>) -> Vec<T> {
        let mut x = Vec::with_capacity(self.len());
        x.extend(p.omega_x0.iter().zip(&self.origin.omega_x0).map(|(a, b)| *a - *b));
        x.push(p.omega_c0 - self.origin.omega_c0);
        x.extend(&p.g);
        x.extend(&p.gamma_x);
        x.push(p.gamma_c);
        x.push(p.temp_model.eta);
        x
    }

    fn unpack(&self, x: &[T]) -> SystemParams<T> {
        let n = self.n;
        let mut p = self.origin.clone();
        for i in 0..n {
            p.omega_x0[i] = self.origin.omega_x0[i] + x[i];
            p.g[i] = x[n + 1 + i];
            p.gamma_x[i] = x[2 * n + 1 + i];
        }
        p.omega_c0 = self.origin.omega_c0 + x[n];
        p.gamma_c = x[3 * n + 1];
        p.temp_model.eta = x[3 * n + 2];
        p
    }

    fn names(&self) -> Vec<String> {
        let n = self.n;
        let mut v: Vec<String> = (0..n).map(|i| format!("omega_x0[{i}]")).collect();
        v.push("omega_c0".into());
        v.extend((0..n).map(|i| format!("g[{i}]")));
        v.extend((0..n).map(|i| format!("gamma_x[{i}]")));
        v.push("gamma_c".into());
        v.push("eta".into());
        v
    }

    fn bounds(&self) -> (Vec<T>, Vec<T>, Vec<T>) {
        let n = self.n;
        let inf = T::infinity();
        let mut lower = vec![-inf; n + 1];
        lower.extend(vec![T::zero(); 2 * n + 2]);
        let mut upper = vec![inf; 3 * n + 2];
        upper.push(T::one());
        let mut scales = vec![T::lit(10.0); 3 * n + 2];
        scales.push(T::lit(0.1));
        (scales, lower, upper)
    }
}

type Assignment = Vec<Vec<(usize, usize)>>;

fn assign_all<T: Real>(data: &[PeakObservation<T>], params: &SystemParams<T>) -> Result<Assignment> {
    data.iter()
        .map(|obs| {
            let pred = predicted_lines(params, obs.temperature)?;
            let oc: Vec<T> = obs.lines.iter().map(|l| l.center).collect();
            let pc: Vec<T> = pred.iter().map(|l| l.center).collect();
            Ok(assign_lines(&oc, &pc))
        })
        .collect()
}

fn residuals<T: Real>(data: &[PeakObservation<T>], assignment: &Assignment, params: &SystemParams<T>) -> Result<Vec<T>> {
    let mut r = Vec::new();
    for (obs, pairs) in data.iter().zip(assignment) {
        let pred = predicted_lines(params, obs.temperature)?;
        for &(i, k) in pairs {
            r.push(pred[k].center - obs.lines[i].center);
            r.push(pred[k].hwhm - obs.lines[i].hwhm);
        }
    }
    Ok(r)
}

/// Least-squares fit of `ω_Xn(0)`, `ω_C(0)`, `gₙ`, `γ_Xn`, `γ_C` and `η` to
/// observed line centers and widths, with `α`, `θ` and `γ_S` held at their
/// values in `initial`.
///
/// Lines are assigned to branches by order-preserving matching against the
/// current model; the assignment is refreshed after each converged fit until
/// it no longer changes.
pub fn global_fit<T: Real>(data: &[PeakObservation<T>], initial: &SystemParams<T>, opts: &GlobalFitOptions<T>) -> Result<FitResult<T>> {
    initial.validate()?;
    let mut temps: Vec<T> = data.iter().map(|d| d.temperature).collect();
    temps.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    temps.dedup();
    if temps.len() < 2 {
        return Err(Error::InvalidParams("global fit needs at least two temperatures".into()));
    }
    let mut sorted: Vec<PeakObservation<T>> = data.to_vec();
    for d in &mut sorted {
        d.lines.sort_by(|a, b| a.center.partial_cmp(&b.center).unwrap_or(std::cmp::Ordering::Equal));
    }
    let layout = Layout { n: initial.n_emitters(), origin: initial.clone() };
    let (scales, lower, upper) = layout.bounds();
    let mut current = initial.clone();
    let mut assignment = assign_all(&sorted, &current)?;
    let mut report: Option<LmReport<T>> = None;
    let mut iterations = 0;
    for _ in 0..opts.max_rounds.max(1) {
        let f = |x: &[T]| residuals(&sorted, &assignment, &layout.unpack(x));
        let rep = levenberg_marquardt(f, &layout.pack(&current), &scales, &lower, &upper, &opts.lm)?;
        iterations += rep.convergence.iterations;
        current = layout.unpack(&rep.x);
        let next = assign_all(&sorted, &current)?;
        let stable = next == assignment;
        report = Some(rep);
        if stable {
            break;
        }
        assignment = next;
    }
    let rep = report.expect("at least one round");
    let mut warnings = Vec::new();
    let err = rep.uncertainties();
    let names = layout.names();
    for (i, e) in err.iter().enumerate() {
        if !e.is_finite() {
            warnings.push(format!("{} is not identifiable from the data (singular normal matrix)", names[i]));
        } else if rep.normal_matrix[i][i] <= T::epsilon() {
            warnings.push(format!("{} has negligible influence on the lines", names[i]));
        }
    }
    let n = layout.n;
    let unc = ParamUncertainties {
        omega_x0: err[..n].to_vec(),
        omega_c0: err[n],
        g: err[n + 1..2 * n + 1].to_vec(),
        gamma_x: err[2 * n + 1..3 * n + 1].to_vec(),
        gamma_c: err[3 * n + 1],
        eta: err[3 * n + 2],
    };
    // a new assignment changes the objective, so only the final round's
    // (monotone) cost history is kept
    let mut convergence = rep.convergence.clone();
    convergence.iterations = iterations;
    Ok(FitResult {
        params: current,
        uncertainties: unc,
        residual_norm: (rep.cost * T::lit(2.0)).sqrt(),
        convergence,
        warnings,
    })
}

/// Energies of one weakly coupled exciton line versus temperature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Serialize + DeserializeOwned")]
pub struct ExcitonTrack<T> {
    pub temperatures: Vec<T>,
    pub energies: Vec<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Serialize + DeserializeOwned")]
pub struct TemperatureFit<T> {
    pub alpha: T,
    pub theta: T,
    pub alpha_err: T,
    pub theta_err: T,
    /// zero-temperature energy of each track
    pub offsets: Vec<T>,
    pub convergence: Convergence<T>,
}

/// Fits `α`, `θ` and one zero-temperature energy per track to
/// `E(T) = E(0) + F(T)`.
pub fn fit_temperature_model<T: Real>(tracks: &[ExcitonTrack<T>], alpha0: T, theta0: T, opts: &LmOptions<T>) -> Result<TemperatureFit<T>> {
    if tracks.is_empty() || tracks.iter().any(|t| t.temperatures.len() != t.energies.len() || t.energies.is_empty()) {
        return Err(Error::InvalidParams("tracks must be non-empty with matching lengths".into()));
    }
    let origin: Vec<T> = tracks.iter().map(|t| t.energies[0]).collect();
    let f = |x: &[T]| {
        let model = TemperatureModel { alpha: x[0], theta: x[1], eta: T::zero() };
        let mut r = Vec::new();
        for (k, tr) in tracks.iter().enumerate() {
            for (t, e) in tr.temperatures.iter().zip(&tr.energies) {
                r.push(origin[k] + x[2 + k] + model.shift(*t)? - *e);
            }
        }
        Ok(r)
    };
    let mut x0 = vec![alpha0, theta0];
    x0.extend(vec![T::zero(); tracks.len()]);
    let n = x0.len();
    let mut lower = vec![T::lit(1e-6), T::lit(1e-3)];
    lower.extend(vec![-T::infinity(); tracks.len()]);
    let upper = vec![T::infinity(); n];
    let mut scales = vec![T::one(), T::one()];
    scales.extend(vec![T::lit(10.0); tracks.len()]);
    let rep = levenberg_marquardt(f, &x0, &scales, &lower, &upper, opts)?;
    let err = rep.uncertainties();
    Ok(TemperatureFit {
        alpha: rep.x[0],
        theta: rep.x[1],
        alpha_err: err[0],
        theta_err: err[1],
        offsets: (0..tracks.len()).map(|k| origin[k] + rep.x[2 + k]).collect(),
        convergence: rep.convergence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_count_is_n_plus_one() {
        let p = SystemParams::micropillar_three_dots();
        for t in [5.0, 13.5, 19.0, 30.0] {
            assert_eq!(predicted_lines(&p, t).unwrap().len(), 4);
        }
    }

    #[test]
    fn far_detuned_lines_approach_bare_energies() {
        let mut p = SystemParams::micropillar_three_dots();
        p.omega_x0 = vec![p.omega_c0 + 3000.0, p.omega_c0 + 6000.0, p.omega_c0 - 4000.0];
        let lines = predicted_lines(&p, 10.0).unwrap();
        let tuned = p.tune(10.0).unwrap();
        let mut bare = vec![
            (tuned.omega_c, p.gamma_c),
            (tuned.omega_x[0], p.gamma_x[0]),
            (tuned.omega_x[1], p.gamma_x[1]),
            (tuned.omega_x[2], p.gamma_x[2]),
        ];
        bare.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for (l, (w, g)) in lines.iter().zip(bare) {
            // second-order shift bounded by g²/Δ
            assert!((l.center - w).abs() < 43.0 * 43.0 / 3000.0 * 2.0);
            assert!((l.hwhm - (g + p.gamma_s)).abs() < 2.0);
        }
    }

    #[test]
    fn cavity_line_width_far_from_resonance() {
        // at 30 K the cavity sits well above all three excitons
        let p = SystemParams::micropillar_three_dots();
        let tuned = p.tune(30.0).unwrap();
        let lines = predicted_lines(&p, 30.0).unwrap();
        let cav = lines[3];
        // first-order admixture of the exciton widths
        let bound: f64 = (0..3)
            .map(|n| {
                let d = tuned.omega_c - tuned.omega_x[n];
                (p.g[n] / d).powi(2) * (p.gamma_c - p.gamma_x[n]).abs()
            })
            .sum();
        assert!((cav.hwhm - (p.gamma_c + p.gamma_s)).abs() < 1.5 * bound, "{cav:?} bound {bound}");
        assert!((cav.center - tuned.omega_c).abs() < 20.0);
    }

    #[test]
    fn anticrossings_stay_open() {
        let p = SystemParams::micropillar_three_dots();
        let mut min_gap = f64::INFINITY;
        for i in 0..=440 {
            let t = 8.0 + 0.05 * i as f64;
            let l = predicted_lines(&p, t).unwrap();
            for w in l.windows(2) {
                min_gap = min_gap.min(w[1].center - w[0].center);
            }
        }
        assert!(min_gap > 0.0);
        assert!(min_gap > 10.0, "{min_gap}");
    }

    #[test]
    fn assignment_drops_extra_lines() {
        assert_eq!(assign_lines(&[1.0, 5.0, 9.0], &[0.0, 10.0]), vec![(0, 0), (2, 1)]);
        assert_eq!(assign_lines(&[9.5], &[0.0, 10.0]), vec![(0, 1)]);
        assert_eq!(assign_lines(&[0.0, 1.0], &[0.0, 1.0]), vec![(0, 0), (1, 1)]);
    }
}
