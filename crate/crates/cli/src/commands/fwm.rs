//! Time-resolved and spectrally resolved FWM at one working point.

use serde::Serialize;
use tcfwm::fwm::{fwm_spectrum_map, fwm_time_map, response_coefficients, time_integrated_power, Grid, MapGrids};
use tcfwm::Coefficients;

use super::{working_point, Context};
use crate::config::{Complex, Format};
use crate::error::CliError;
use crate::table::{complex_list, write_json, ComplexMap, Table};

#[derive(Serialize)]
pub struct CoefficientsFile {
    pub temperature: f64,
    pub reference: f64,
    pub gamma_s: f64,
    /// rotating-frame emission frequencies (μeV)
    pub omega_tilde: Vec<Complex>,
    pub lambda1: Vec<Complex>,
    pub lambda2: Vec<Complex>,
    /// rows: transitions, cols: first-rung levels
    pub positive: Vec<Vec<Complex>>,
    /// rows: transitions, cols: second-rung levels
    pub negative: Vec<Vec<Complex>>,
}

impl CoefficientsFile {
    pub fn new(c: &Coefficients) -> Self {
        let m = |x: &tcfwm::Matrix| (0..x.rows()).map(|i| (0..x.cols()).map(|j| x[(i, j)].into()).collect()).collect();
        Self {
            temperature: c.temperature,
            reference: c.reference,
            gamma_s: c.gamma_s,
            omega_tilde: complex_list(&c.omegas()),
            lambda1: complex_list(&c.lambda1),
            lambda2: complex_list(&c.lambda2),
            positive: m(&c.positive),
            negative: m(&c.negative),
        }
    }
}

#[derive(Serialize)]
struct Summary {
    temperature: f64,
    detuning: Option<f64>,
    reference: f64,
    /// mean spacing of the maxima of the positive-delay integrated power
    beat_period_ps: Option<f64>,
}

#[derive(Serialize)]
struct FwmFile {
    summary: Summary,
    time_map: ComplexMap,
    spectrum_map: ComplexMap,
    tau: Vec<f64>,
    integrated_power: Vec<f64>,
}

/// Mean spacing of successive local maxima at `τ ≥ 0`.
pub fn beat_period(tau: &[f64], power: &[f64]) -> Option<f64> {
    let peaks: Vec<f64> = (1..power.len().saturating_sub(1))
        .filter(|&i| tau[i] >= 0.0 && power[i] > power[i - 1] && power[i] >= power[i + 1])
        .map(|i| tau[i])
        .collect();
    (peaks.len() >= 2).then(|| (peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64)
}

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let wp = working_point(cfg)?;
    let coeffs = response_coefficients(&wp.tuned, &cfg.pulses())?;
    let g = &cfg.run.grids;
    let t = g.t.grid("grids.t")?;
    let tau = g.tau.grid("grids.tau")?;
    let omega: Grid<f64> = match g.omega {
        Some(r) => r.grid("grids.omega")?,
        None => MapGrids::default_for(&coeffs)?.omega,
    };
    let time = fwm_time_map(&coeffs, &t, &tau)?;
    let spec = fwm_spectrum_map(&coeffs, &omega, &tau);
    let power = time_integrated_power(&coeffs, &tau);
    let summary = Summary {
        temperature: wp.temperature,
        detuning: wp.detuning,
        reference: coeffs.reference,
        beat_period_ps: beat_period(tau.values(), &power),
    };
    ctx.ensure_out()?;
    write_json(&ctx.path("coefficients.json"), &CoefficientsFile::new(&coeffs))?;
    match ctx.format {
        Format::Csv => {
            Table::map("tau_ps", tau.values(), "t_ps", t.values(), |i, j| time.values[(i, j)].norm_sqr())
                .comment("quantity", "|P(t,tau)|^2 (arb. units)")
                .comment("temperature_K", wp.temperature)
                .write_file(&ctx.path("fwm_time_power.csv"))?;
            Table::map("tau_ps", tau.values(), "omega_ueV", omega.values(), |i, j| spec[(i, j)].norm_sqr())
                .comment("quantity", "|P(omega,tau)|^2 (arb. units)")
                .comment("temperature_K", wp.temperature)
                .comment("gamma_s_ueV", coeffs.gamma_s)
                .write_file(&ctx.path("fwm_spectrum_power.csv"))?;
            let mut tp = Table::new(vec!["tau_ps".into(), "power".into()])
                .comment("quantity", "time-integrated |P|^2 (arb. units, closed form)")
                .comment("temperature_K", wp.temperature);
            tp.rows = tau.values().iter().zip(&power).map(|(a, b)| vec![*a, *b]).collect();
            tp.write_file(&ctx.path("fwm_integrated_power.csv"))?;
            write_json(&ctx.path("fwm_summary.json"), &summary)?;
        }
        Format::Json => write_json(
            &ctx.path("fwm.json"),
            &FwmFile {
                summary,
                time_map: ComplexMap::new("tau_ps", tau.values(), "t_ps", t.values(), &time.values),
                spectrum_map: ComplexMap::new("tau_ps", tau.values(), "omega_ueV", omega.values(), &spec),
                tau: tau.values().to_vec(),
                integrated_power: power,
            },
        )?,
    }
    Ok(())
}
