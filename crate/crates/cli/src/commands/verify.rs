//! Built-in cross-checks of the closed-form response.

use serde::Serialize;
use tcfwm::eigen::{eigenvalues, multiset_distance};
use tcfwm::fwm::{fwm_polarization, response_coefficients};
use tcfwm::model::{build_h1, lindblad_superoperator, spectrum_of, transition_frequencies};
use tcfwm::oracle::{charpoly_eigenvalues, fwm_via_ode, OdeConfig};
use tcfwm::{Coefficients, Pulses, Tuned};

use super::{working_point, Context};
use crate::error::CliError;
use crate::table::write_json;

#[derive(Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    threshold: f64,
    /// `value < threshold`, or `value > threshold` for the negative control
    pass: bool,
}

#[derive(Serialize)]
struct Report {
    temperature: f64,
    pass: bool,
    checks: Vec<Check>,
}

/// `max|analytic − ODE| / max|ODE|` over all delays and times.
fn ode_error(coeffs: &Coefficients, ode: &[(f64, Vec<tcfwm::C64>)], t: &[f64]) -> Result<f64, CliError> {
    let (mut diff, mut scale): (f64, f64) = (0.0, 0.0);
    for (tau, trace) in ode {
        for (ti, p) in t.iter().zip(trace) {
            diff = diff.max((fwm_polarization(coeffs, *ti, *tau)? - p).norm());
            scale = scale.max(p.norm());
        }
    }
    Ok(if scale > 0.0 { diff / scale } else { diff })
}

fn master_equation(tuned: &Tuned, pulses: &Pulses, delays: &[f64], t: &[f64]) -> Result<Vec<(f64, Vec<tcfwm::C64>)>, CliError> {
    delays.iter().map(|&tau| Ok((tau, fwm_via_ode(tuned, pulses, t, tau, &OdeConfig::default())?))).collect()
}

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let v = &cfg.run.verify;
    let wp = working_point(cfg)?;
    let pulses = cfg.pulses();
    let t = v.t.grid("verify.t")?;
    let t = t.values();
    let mut checks = Vec::new();

    let coeffs = response_coefficients(&wp.tuned, &pulses)?;
    let ode = master_equation(&wp.tuned, &pulses, &v.delays, t)?;
    let err = ode_error(&coeffs, &ode, t)?;
    checks.push(Check { name: "analytic_vs_master_equation", value: err, threshold: v.tolerance, pass: err < v.tolerance });

    // the comparison must notice a 1e-3 change of the largest coefficient
    let mut corrupted = coeffs.clone();
    let (mut bi, mut bj) = (0, 0);
    for i in 0..corrupted.positive.rows() {
        for j in 0..corrupted.positive.cols() {
            if corrupted.positive[(i, j)].norm() > corrupted.positive[(bi, bj)].norm() {
                (bi, bj) = (i, j);
            }
        }
    }
    corrupted.positive[(bi, bj)] *= 1.0 + 1e-3;
    let err = ode_error(&corrupted, &ode, t)?;
    checks.push(Check { name: "negative_control_detected", value: err, threshold: v.tolerance, pass: err > v.tolerance });

    let mut uncoupled = wp.tuned.clone();
    uncoupled.g.iter_mut().for_each(|g| *g = 0.0);
    let null = response_coefficients(&uncoupled, &pulses)?;
    let mut peak: f64 = 0.0;
    for &tau in &v.delays {
        for &ti in t {
            peak = peak.max(fwm_polarization(&null, ti, tau)?.norm());
        }
    }
    checks.push(Check { name: "uncoupled_response_vanishes", value: peak, threshold: 1e-12, pass: peak < 1e-12 });

    let spec = spectrum_of(&wp.tuned)?;
    let ev = eigenvalues(&lindblad_superoperator(&wp.tuned).matrix)?;
    let d = multiset_distance(&ev, &transition_frequencies(&spec).omegas()).unwrap_or(f64::INFINITY);
    checks.push(Check { name: "superoperator_spectrum_is_rung_differences", value: d, threshold: 1e-8, pass: d < 1e-8 });

    let d = multiset_distance(&charpoly_eigenvalues(&build_h1(&wp.tuned))?, spec.lambda1()).unwrap_or(f64::INFINITY);
    checks.push(Check { name: "first_rung_matches_characteristic_polynomial", value: d, threshold: 1e-8, pass: d < 1e-8 });

    let report = Report { temperature: wp.temperature, pass: checks.iter().all(|c| c.pass), checks };
    for c in &report.checks {
        println!("{}: {} ({:.3e} vs {:.1e})", c.name, if c.pass { "PASS" } else { "FAIL" }, c.value, c.threshold);
    }
    ctx.ensure_out()?;
    write_json(&ctx.path("verify.json"), &report)?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Numerical("verification failed".into()))
    }
}
