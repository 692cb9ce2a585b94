use tcfwm::plfit::{
    fit_lorentzians, fit_temperature_model, global_fit, synthesize_pl, synthesize_tracks, GlobalFitOptions, LmOptions,
    LorentzianFitOptions, PeakObservation, SynthOptions,
};
use tcfwm::Params;

fn temperatures() -> Vec<f64> {
    (0..=44).map(|i| 8.0 + 0.5 * i as f64).collect()
}

fn perturbed(p: &Params) -> Params {
    let mut q = p.clone();
    q.omega_x0 = q.omega_x0.iter().zip([6.0, -8.0, 5.0]).map(|(a, b)| a + b).collect();
    q.omega_c0 -= 7.0;
    q.g = vec![38.0, 45.0, 27.0];
    q.gamma_x = vec![22.0, 8.0, 20.0];
    q.gamma_c = 31.0;
    q.temp_model.eta = 0.25;
    q
}

#[test]
fn global_fit_recovers_generator() {
    let truth = Params::micropillar_three_dots();
    let data = synthesize_pl(&truth, &temperatures(), &SynthOptions::default()).unwrap();
    let obs: Vec<PeakObservation<f64>> = data
        .spectra
        .iter()
        .map(|s| PeakObservation::from_fit(s.temperature, &fit_lorentzians(s, 4, &LorentzianFitOptions::default()).unwrap()))
        .collect();
    let fit = global_fit(&obs, &perturbed(&truth), &GlobalFitOptions::default()).unwrap();
    for n in 0..3 {
        assert!((fit.params.g[n] - truth.g[n]).abs() < 1.0, "g[{n}]");
        assert!((fit.params.gamma_x[n] - truth.gamma_x[n]).abs() < 2.0, "gamma_x[{n}]");
    }
    assert!((fit.params.gamma_c - truth.gamma_c).abs() < 2.0);
    assert!((fit.params.temp_model.eta - truth.temp_model.eta).abs() < 0.01);
}

#[test]
fn temperature_model_recovered_from_detuned_tracks() {
    let truth = Params::micropillar_three_dots().temp_model;
    let temps: Vec<f64> = (0..=30).map(|i| 5.0 + 2.5 * i as f64).collect();
    let tracks = synthesize_tracks(&truth, &[1_334_000.0, 1_335_200.0], &temps, 1.0, 11).unwrap();
    let fit = fit_temperature_model(&tracks, 50.0, 50.0, &LmOptions::default()).unwrap();
    assert!((fit.alpha - truth.alpha).abs() < 0.6);
    assert!((fit.theta - truth.theta).abs() < 1.0);
}
