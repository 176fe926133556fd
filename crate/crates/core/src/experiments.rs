//! Monte Carlo sweeps over the sequence length `N` and channel length `K`.
//!
//! Each `(n, k)` cell runs `trials` independent trials in parallel. A trial's
//! randomness is derived from `(master_seed, n, k, trial)` alone and per-trial
//! results are reduced in trial order, so rows are bit-identical regardless of
//! thread count.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::canceller::{cancel, predicted_practical_power, predicted_residual_power};
use crate::estimator::{ls_estimate, tap_error_power, trace_metric};
use crate::seed::trial_seed;
use crate::signal_model::{
    generate_symbols, resolve_noise, sample_channel, transmit, ConvolutionMatrix, Modulation,
    NoiseSpec,
};
use crate::{Error, Result};

/// Which residual the interference sweep measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResidualMode {
    /// `X (h - h_est)`, the reconstruction error alone.
    #[default]
    Analysis,
    /// `y - X h_est`, what a receiver actually holds.
    Practical,
}

impl fmt::Display for ResidualMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResidualMode::Analysis => "analysis",
            ResidualMode::Practical => "practical",
        })
    }
}

impl FromStr for ResidualMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "analysis" => Ok(ResidualMode::Analysis),
            "practical" => Ok(ResidualMode::Practical),
            other => Err(Error::domain(
                "residual_mode",
                format!("`{other}` is not one of analysis, practical"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub n_values: Vec<usize>,
    pub k_values: Vec<usize>,
    pub trials: u64,
    pub modulation: Modulation,
    pub sir_db: f64,
    pub snr_db: f64,
    pub master_seed: u64,
    pub residual_mode: ResidualMode,
    /// Replaces the composite noise variance of every cell when set.
    pub sigma_w2: Option<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n_values: vec![250, 500, 1000, 2000, 4000, 8000],
            k_values: vec![5, 20, 40],
            trials: 10_000,
            modulation: Modulation::Bpsk,
            sir_db: 10.0,
            snr_db: 20.0,
            master_seed: 0,
            residual_mode: ResidualMode::Analysis,
            sigma_w2: None,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let config = |key, reason: String| Err(Error::Config { key, reason });
        if self.n_values.is_empty() {
            return config("n_values", "need at least one value".into());
        }
        if self.n_values[0] == 0 {
            return config("n_values", "values must be positive integers".into());
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return config("n_values", "values must be strictly ascending".into());
        }
        if self.k_values.is_empty() {
            return config("k_values", "need at least one value".into());
        }
        if self.k_values.contains(&0) {
            return config("k_values", "values must be positive integers".into());
        }
        let k_max = *self.k_values.iter().max().unwrap();
        if self.n_values[0] < k_max {
            return config(
                "n_values",
                format!(
                    "every n must be >= the largest k ({k_max}); got n = {}",
                    self.n_values[0]
                ),
            );
        }
        if self.trials == 0 {
            return config("trials", "must be a positive integer".into());
        }
        if !self.sir_db.is_finite() {
            return config("sir_db", "must be a finite number of dB".into());
        }
        if !self.snr_db.is_finite() {
            return config("snr_db", "must be a finite number of dB".into());
        }
        if let Some(v) = self.sigma_w2 {
            if !(v >= 0.0 && v.is_finite()) {
                return config("sigma_w2", format!("must be a finite number >= 0, got {v}"));
            }
        }
        Ok(())
    }

    /// Noise of a cell with `k` taps. The interference power is taken as
    /// `E_x * k` (unit-variance taps) so the dB ratios mean the same for all k.
    pub fn noise_for(&self, k: usize) -> Result<NoiseSpec> {
        let si_power = self.modulation.symbol_energy() * k as f64;
        let spec = resolve_noise(self.sir_db, self.snr_db, si_power)?;
        match self.sigma_w2 {
            Some(v) => spec.with_composite_override(v),
            None => Ok(spec),
        }
    }

    fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.k_values
            .iter()
            .flat_map(move |&k| self.n_values.iter().map(move |&n| (n, k)))
    }
}

/// One `(n, k)` cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub k: usize,
    pub metric_mean: f64,
    /// Standard error of `metric_mean`.
    pub metric_stderr: f64,
    pub predicted: f64,
    pub trials: u64,
    /// `sigma_n^2`, carried by residual sweeps.
    pub noise_floor: Option<f64>,
}

/// Mean and standard error, accumulated about the first sample so identical
/// samples give an exact mean and zero spread.
fn mean_and_stderr(samples: &[f64]) -> (f64, f64) {
    let count = samples.len() as f64;
    let pivot = samples[0];
    let (sum, sum_sq) = samples.iter().fold((0.0, 0.0), |(s, q), &v| {
        let d = v - pivot;
        (s + d, q + d * d)
    });
    let mean_shift = sum / count;
    let mean = pivot + mean_shift;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = ((sum_sq - sum * mean_shift) / (count - 1.0)).max(0.0);
    (mean, (var / count).sqrt())
}

/// Runs every trial of a cell, keeping results in trial order.
fn run_cell<T, F>(cfg: &SweepConfig, n: usize, k: usize, trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    let results: Vec<Result<T>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| trial(trial_seed(cfg.master_seed, n, k, t)))
        .collect();
    // report the lowest failing trial index, independent of scheduling
    results
        .into_iter()
        .enumerate()
        .map(|(t, r)| {
            r.map_err(|e| Error::Trial {
                n,
                k,
                trial: t as u64,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Mean of `Tr{(X^H X)^-1}` over independent symbol draws.
/// Predicted: `k / (n E_x)`.
pub fn run_trace_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    cfg.cells()
        .map(|(n, k)| {
            let traces = run_cell(cfg, n, k, |seed| {
                let x = generate_symbols(n, cfg.modulation, seed);
                trace_metric(&ConvolutionMatrix::new(&x, k)?)
            })?;
            let (metric_mean, metric_stderr) = mean_and_stderr(&traces);
            Ok(SweepRow {
                n,
                k,
                metric_mean,
                metric_stderr,
                predicted: k as f64 / (n as f64 * cfg.modulation.symbol_energy()),
                trials: cfg.trials,
                noise_floor: None,
            })
        })
        .collect()
}

/// Per-tap estimation MSE with fresh symbols, channel and noise per trial.
/// Predicted: `sigma_w^2 / k` times the cell's mean trace.
pub fn run_mse_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    cfg.cells()
        .map(|(n, k)| {
            let noise = cfg.noise_for(k)?;
            let results = run_cell(cfg, n, k, |seed| {
                let x = generate_symbols(n, cfg.modulation, seed);
                let h = sample_channel(k, seed);
                let frame = transmit(&x, &h, &noise, seed)?;
                let est = ls_estimate(&ConvolutionMatrix::new(&x, k)?, frame.samples())?;
                Ok((tap_error_power(h.taps(), est.taps())?, est.trace_metric()))
            })?;
            let (errors, traces): (Vec<f64>, Vec<f64>) = results.into_iter().unzip();
            let (metric_mean, metric_stderr) = mean_and_stderr(&errors);
            let (mean_trace, _) = mean_and_stderr(&traces);
            Ok(SweepRow {
                n,
                k,
                metric_mean,
                metric_stderr,
                predicted: noise.sigma_w2() / k as f64 * mean_trace,
                trials: cfg.trials,
                noise_floor: None,
            })
        })
        .collect()
}

/// Residual interference power after cancellation.
/// Predicted: `k sigma_w^2 / n` (analysis) or `(n - k) sigma_w^2 / n` (practical).
pub fn run_rsi_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    cfg.cells()
        .map(|(n, k)| {
            let noise = cfg.noise_for(k)?;
            let powers = run_cell(cfg, n, k, |seed| {
                let x = generate_symbols(n, cfg.modulation, seed);
                let h = sample_channel(k, seed);
                let frame = transmit(&x, &h, &noise, seed)?;
                let matrix = ConvolutionMatrix::new(&x, k)?;
                let est = ls_estimate(&matrix, frame.samples())?;
                let res = cancel(&frame, &matrix, est.taps())?;
                Ok(match cfg.residual_mode {
                    ResidualMode::Analysis => res.empirical_analysis_power,
                    ResidualMode::Practical => res.empirical_practical_power,
                })
            })?;
            let (metric_mean, metric_stderr) = mean_and_stderr(&powers);
            let predicted = match cfg.residual_mode {
                ResidualMode::Analysis => predicted_residual_power(k, noise.sigma_w2(), n)?,
                ResidualMode::Practical => predicted_practical_power(k, noise.sigma_w2(), n)?,
            };
            Ok(SweepRow {
                n,
                k,
                metric_mean,
                metric_stderr,
                predicted,
                trials: cfg.trials,
                noise_floor: Some(noise.sigma_n2()),
            })
        })
        .collect()
}
