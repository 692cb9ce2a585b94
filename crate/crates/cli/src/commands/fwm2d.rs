//! Two-dimensional FWM: closed form and the sampled analysis chain.

use serde::Serialize;
use tcfwm::fwm::{fwm_2d, fwm_time_map, response_coefficients, Grid};
use tcfwm::signal::{ft_tau_to_omega_tau, ft_time_to_omega, phase_correct, post_select};
use tcfwm::{Coefficients, Map2D};

use super::{working_point, Context};
use crate::config::Format;
use crate::error::CliError;
use crate::table::{write_json, ComplexMap, Table};

#[derive(Serialize)]
struct Consistency {
    survival_time: f64,
    /// `max|closed − sampled| / max|closed|`
    relative_difference: f64,
}

#[derive(Serialize)]
struct Summary {
    temperature: f64,
    detuning: Option<f64>,
    gamma_s: f64,
    survival_time: f64,
    delay_axis_flipped: bool,
    /// grid frequency actually used, when a correction was requested
    phase_correction: Option<f64>,
    consistency: Vec<Consistency>,
    maps: Vec<String>,
}

#[derive(Serialize)]
struct NamedMap {
    name: String,
    survival_time: f64,
    phase_correction: Option<f64>,
    map: ComplexMap,
}

struct Chain<'a> {
    coeffs: &'a Coefficients,
    t: Grid<f64>,
    tau: Grid<f64>,
    omega: &'a Grid<f64>,
    omega_tau: &'a Grid<f64>,
}

impl Chain<'_> {
    fn run(&self, t_s: f64, omega_cor: Option<f64>) -> Result<Map2D, CliError> {
        let mut signal = fwm_time_map(self.coeffs, &self.t, &self.tau)?;
        if t_s > 0.0 {
            signal = post_select(&signal, t_s)?;
        }
        let mut spectral = ft_time_to_omega(&signal, self.omega, Some(self.coeffs.gamma_s))?;
        if let Some(w) = omega_cor {
            spectral = phase_correct(&spectral, w)?;
        }
        Ok(ft_tau_to_omega_tau(&spectral, self.omega_tau, true)?)
    }
}

fn relative_difference(a: &Map2D, b: &Map2D) -> f64 {
    let mut diff: f64 = 0.0;
    for i in 0..a.values.rows() {
        for j in 0..a.values.cols() {
            diff = diff.max((a.values[(i, j)] - b.values[(i, j)]).norm());
        }
    }
    diff / b.values.max_abs()
}

/// First-rung levels ±300 μeV at 2 μeV, absolute.
fn default_axis(coeffs: &Coefficients) -> Result<Grid<f64>, CliError> {
    let re = coeffs.lambda1.iter().map(|l| l.re + coeffs.reference);
    let (lo, hi) = re.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    Ok(Grid::range((lo - 300.0).floor(), (hi + 300.0).ceil(), 2.0)?)
}

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let td = &cfg.run.two_d;
    let wp = working_point(cfg)?;
    let coeffs = response_coefficients(&wp.tuned, &cfg.pulses())?;
    let omega = match td.omega {
        Some(r) => r.grid("two_d.omega")?,
        None => default_axis(&coeffs)?,
    };
    let omega_tau = match td.omega_tau {
        Some(r) => r.grid("two_d.omega_tau")?,
        None => omega.clone(),
    };
    let mut survival = vec![0.0];
    if td.survival_time > 0.0 {
        survival.push(td.survival_time);
    }
    let suffix = |t_s: f64| if t_s > 0.0 { "_ts" } else { "" };

    let mut maps: Vec<(String, f64, Map2D)> = Vec::new();
    let mut consistency = Vec::new();
    for &t_s in &survival {
        maps.push((format!("two_d_closed{}", suffix(t_s)), t_s, fwm_2d(&coeffs, &omega, &omega_tau, t_s)?));
    }
    let mut used_cor = None;
    if td.sampled {
        let chain = Chain { coeffs: &coeffs, t: td.t.grid("two_d.t")?, tau: td.tau.grid("two_d.tau")?, omega: &omega, omega_tau: &omega_tau };
        for (k, &t_s) in survival.iter().enumerate() {
            let sampled = chain.run(t_s, None)?;
            consistency.push(Consistency { survival_time: t_s, relative_difference: relative_difference(&sampled, &maps[k].2) });
            maps.push((format!("two_d_sampled{}", suffix(t_s)), t_s, sampled));
            if let Some(w) = td.omega_cor {
                let corrected = chain.run(t_s, Some(w))?;
                used_cor = corrected.phase_correction;
                maps.push((format!("two_d_sampled_cor{}", suffix(t_s)), t_s, corrected));
            }
        }
    }
    let summary = Summary {
        temperature: wp.temperature,
        detuning: wp.detuning,
        gamma_s: coeffs.gamma_s,
        survival_time: td.survival_time,
        delay_axis_flipped: true,
        phase_correction: used_cor,
        consistency,
        maps: maps.iter().map(|m| m.0.clone()).collect(),
    };
    ctx.ensure_out()?;
    match ctx.format {
        Format::Csv => {
            for (name, t_s, m) in &maps {
                let mut t = Table::map("omega_tau_ueV", omega_tau.values(), "omega_ueV", omega.values(), |i, j| {
                    m.values[(i, j)].norm_sqr()
                })
                .comment("quantity", "|P(omega,omega_tau)|^2 (arb. units)")
                .comment("temperature_K", wp.temperature)
                .comment("survival_time_ps", t_s)
                .comment("delay_axis", "flipped (first-order resonances at +Re lambda1)");
                if let Some(w) = m.phase_correction {
                    t = t.comment("phase_correction_ueV", w);
                }
                t.write_file(&ctx.path(&format!("{name}.csv")))?;
            }
            write_json(&ctx.path("two_d_summary.json"), &summary)?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct File {
                summary: Summary,
                maps: Vec<NamedMap>,
            }
            let named = maps
                .iter()
                .map(|(name, t_s, m)| NamedMap {
                    name: name.clone(),
                    survival_time: *t_s,
                    phase_correction: m.phase_correction,
                    map: ComplexMap::new("omega_tau_ueV", omega_tau.values(), "omega_ueV", omega.values(), &m.values),
                })
                .collect();
            write_json(&ctx.path("two_d.json"), &File { summary, maps: named })?;
        }
    }
    Ok(())
}
