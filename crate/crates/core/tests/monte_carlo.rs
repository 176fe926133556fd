//! Statistical checks of the closed-form error laws. All draws are seeded,
//! so every run sees the same samples.

use sic_core::{
    cancel, empirical_mse, find_threshold_n0, generate_symbols, ls_estimate, predicted_mse,
    resolve_noise, run_mse_sweep, run_rsi_sweep, run_trace_sweep, sample_channel,
    single_tap_estimate, trace_metric, transmit, ConvolutionMatrix, Modulation, ResidualMode,
    SweepConfig,
};

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want
}

fn config(n_values: Vec<usize>, k_values: Vec<usize>, trials: u64, seed: u64) -> SweepConfig {
    SweepConfig {
        n_values,
        k_values,
        trials,
        master_seed: seed,
        ..SweepConfig::default()
    }
}

#[test]
fn trace_concentrates_to_k_over_n() {
    let mean = (0..100u64)
        .map(|s| {
            let x = generate_symbols(2000, Modulation::Bpsk, s);
            trace_metric(&ConvolutionMatrix::new(&x, 20).unwrap()).unwrap()
        })
        .sum::<f64>()
        / 100.0;
    assert!(rel_err(mean, 0.01) < 0.05, "mean trace {mean}");
}

#[test]
fn trace_sweep_decreases_with_length() {
    let rows = run_trace_sweep(&config(vec![250, 1000, 4000], vec![20], 100, 11)).unwrap();
    assert!(
        rows.windows(2).all(|w| w[1].metric_mean < w[0].metric_mean),
        "{rows:?}"
    );
    let at_2000 = run_trace_sweep(&config(vec![2000], vec![20], 100, 12)).unwrap();
    assert!(rel_err(at_2000[0].metric_mean, 0.01) < 0.05);
    assert_eq!(at_2000[0].predicted, 0.01);
}

#[test]
fn despreading_mse_law() {
    let n = 1000;
    let sigma_w2 = 2.02;
    let noise = resolve_noise(10.0, 20.0, 1.0)
        .unwrap()
        .with_composite_override(sigma_w2)
        .unwrap();
    let trials = 10_000u64;
    let total: f64 = (0..trials)
        .map(|s| {
            let x = generate_symbols(n, Modulation::Bpsk, s);
            let h = sample_channel(1, s);
            let frame = transmit(&x, &h, &noise, s).unwrap();
            let est = single_tap_estimate(x.symbols(), frame.samples()).unwrap();
            (est - h.taps()[0]).norm_sqr()
        })
        .sum();
    let mse = total / trials as f64;
    assert!(rel_err(mse, sigma_w2 / n as f64) < 0.05, "mse {mse}");
}

#[test]
fn fixed_channel_mse_matches_trace_formula() {
    let (n, k) = (2000, 20);
    let x = generate_symbols(n, Modulation::Bpsk, 5);
    let h = sample_channel(k, 5);
    let noise = resolve_noise(10.0, 20.0, k as f64).unwrap();
    let matrix = ConvolutionMatrix::new(&x, k).unwrap();
    let estimates: Vec<_> = (0..10_000u64)
        .map(|s| {
            let frame = transmit(&x, &h, &noise, 1_000_000 + s).unwrap();
            ls_estimate(&matrix, frame.samples()).unwrap()
        })
        .collect();
    let mse = empirical_mse(&h, &estimates).unwrap();
    let predicted = predicted_mse(noise.sigma_w2(), k, trace_metric(&matrix).unwrap());
    assert!(
        rel_err(mse, predicted) < 0.05,
        "mse {mse} predicted {predicted}"
    );
    assert!(rel_err(predicted, 1.01e-3) < 0.05);
}

#[test]
fn fixed_channel_residual_power_law() {
    let (n, k) = (2000, 20);
    let x = generate_symbols(n, Modulation::Bpsk, 8);
    let h = sample_channel(k, 8);
    let noise = resolve_noise(10.0, 20.0, k as f64).unwrap();
    let matrix = ConvolutionMatrix::new(&x, k).unwrap();
    let trials = 10_000u64;
    let mut total = 0.0;
    for s in 0..trials {
        let frame = transmit(&x, &h, &noise, 2_000_000 + s).unwrap();
        let est = ls_estimate(&matrix, frame.samples()).unwrap();
        let res = cancel(&frame, &matrix, est.taps()).unwrap();
        let w2: f64 = frame.noise().iter().map(|w| w.norm_sqr()).sum();
        let r2: f64 = res.analysis_residual.iter().map(|r| r.norm_sqr()).sum();
        assert!(r2 <= w2);
        total += res.empirical_analysis_power;
    }
    let mean = total / trials as f64;
    assert!(rel_err(mean, 0.0202) < 0.05, "mean residual power {mean}");
}

#[test]
fn mse_decreases_with_length() {
    let rows = run_mse_sweep(&config(vec![250, 1000, 4000], vec![20], 1000, 21)).unwrap();
    assert!(
        rows.windows(2).all(|w| w[1].metric_mean < w[0].metric_mean),
        "{rows:?}"
    );
}

#[test]
fn shorter_channels_estimate_better() {
    let rows = run_mse_sweep(&config(vec![2000], vec![5, 40], 300, 22)).unwrap();
    assert_eq!((rows[0].k, rows[1].k), (5, 40));
    assert!(rows[0].metric_mean < rows[1].metric_mean, "{rows:?}");
}

#[test]
fn residual_power_decays_with_length() {
    let rows = run_rsi_sweep(&config(vec![500, 2000, 8000], vec![20], 1000, 23)).unwrap();
    assert!(
        rows.windows(2).all(|w| w[1].metric_mean < w[0].metric_mean),
        "{rows:?}"
    );
    for r in &rows {
        assert!(rel_err(r.metric_mean, r.predicted) < 0.05, "{r:?}");
    }
}

#[test]
fn stderr_halves_when_trials_quadruple() {
    let few = run_rsi_sweep(&config(vec![500], vec![5], 1000, 24)).unwrap()[0].metric_stderr;
    let many = run_rsi_sweep(&config(vec![500], vec![5], 4000, 24)).unwrap()[0].metric_stderr;
    let ratio = few / many;
    assert!((2.0 / 1.5..=2.0 * 1.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn sub_noise_crossing_follows_threshold() {
    let cfg = config(vec![1000, 2000, 4000], vec![20, 40], 10_000, 25);
    let rows = run_rsi_sweep(&cfg).unwrap();
    let first_below = |k: usize| {
        rows.iter()
            .filter(|r| r.k == k)
            .find(|r| r.metric_mean < r.noise_floor.unwrap())
            .map(|r| r.n)
    };
    let noise20 = cfg.noise_for(20).unwrap();
    let n0_20 = find_threshold_n0(20, noise20.sigma_w2(), noise20.sigma_n2()).unwrap();
    assert_eq!(n0_20, 2021);
    // smallest swept n at or above the analytic threshold
    assert_eq!(first_below(20), Some(4000));
    // k = 40 stays above the floor through n = 4000 (threshold 4041)
    assert_eq!(first_below(40), None);
    let noise40 = cfg.noise_for(40).unwrap();
    assert!(find_threshold_n0(40, noise40.sigma_w2(), noise40.sigma_n2()).unwrap() > n0_20);
}

#[test]
fn practical_residual_keeps_the_noise() {
    let mut cfg = config(vec![2000], vec![20], 500, 26);
    cfg.residual_mode = ResidualMode::Practical;
    let row = &run_rsi_sweep(&cfg).unwrap()[0];
    let sigma_w2 = cfg.noise_for(20).unwrap().sigma_w2();
    assert!(
        rel_err(row.metric_mean, sigma_w2 * 1980.0 / 2000.0) < 0.01,
        "{row:?}"
    );
}
