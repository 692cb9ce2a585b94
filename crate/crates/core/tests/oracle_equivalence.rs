use tcfwm::fwm::{fwm_polarization, response_coefficients, PulseConfig};
use tcfwm::oracle::{fwm_via_ode, OdeConfig};
use tcfwm::{Params, Tuned};

fn rel_error(tuned: &Tuned, taus: &[f64], t_max: f64, dt: f64) -> f64 {
    let pulses = PulseConfig::default();
    let coeffs = response_coefficients(tuned, &pulses).unwrap();
    let n = (t_max / dt).round() as usize;
    let t: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
    let mut max_diff: f64 = 0.0;
    let mut max_ref: f64 = 0.0;
    for &tau in taus {
        let ode = fwm_via_ode(tuned, &pulses, &t, tau, &OdeConfig::default()).unwrap();
        for (ti, p_ode) in t.iter().zip(&ode) {
            let p = fwm_polarization(&coeffs, *ti, tau).unwrap();
            max_diff = max_diff.max((p - p_ode).norm());
            max_ref = max_ref.max(p_ode.norm());
        }
    }
    max_diff / max_ref
}

#[test]
fn jaynes_cummings_matches_master_equation() {
    let tuned = Tuned::from_energies(vec![0.0], 0.0, vec![40.0], vec![10.0], 30.0, 4.0).unwrap();
    let err = rel_error(&tuned, &[-10.0, 0.0, 7.0], 60.0, 0.5);
    assert!(err < 1e-6, "relative error {err:e}");
}

#[test]
fn three_dots_match_master_equation() {
    let tuned = Params::micropillar_three_dots().tune(19.0).unwrap();
    let err = rel_error(&tuned, &[-20.0, -5.0, 0.0, 5.0, 20.0], 60.0, 0.5);
    assert!(err < 1e-6, "relative error {err:e}");
}
