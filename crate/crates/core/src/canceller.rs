//! Digital self-interference cancellation.
//!
//! The interference is rebuilt as `X h_est` and subtracted. Two residuals are
//! reported:
//!
//! * the *analysis* residual `X (h - h_est) = (y - w) - X h_est`, which needs
//!   the realised noise and isolates the reconstruction error. For the LS
//!   estimate it equals `-X X^+ w` and has per-sample power `K sigma_w^2 / N`;
//! * the *practical* residual `y - X h_est`, which is all a receiver sees. It
//!   is `(I - X X^+) w`, with per-sample power `(N - K) sigma_w^2 / N`.

use num_complex::Complex64;

use crate::signal_model::{ConvolutionMatrix, ReceivedFrame};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CancellationResult {
    pub analysis_residual: Vec<Complex64>,
    pub practical_residual: Vec<Complex64>,
    pub empirical_analysis_power: f64,
    pub empirical_practical_power: f64,
    /// `K sigma_w^2 / N`.
    pub predicted_power: f64,
    /// `sigma_n^2` of the frame.
    pub noise_floor: f64,
    /// `empirical_analysis_power < noise_floor`.
    pub below_noise: bool,
}

/// `X h_est`.
pub fn reconstruct(x: &ConvolutionMatrix, estimate: &[Complex64]) -> Result<Vec<Complex64>> {
    x.mul_vec(estimate)
}

fn mean_power(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>() / v.len() as f64
}

pub fn cancel(
    frame: &ReceivedFrame,
    x: &ConvolutionMatrix,
    estimate: &[Complex64],
) -> Result<CancellationResult> {
    if frame.len() != x.n_rows() {
        return Err(Error::DimensionMismatch {
            what: "received frame",
            expected: x.n_rows(),
            found: frame.len(),
        });
    }
    let rebuilt = reconstruct(x, estimate)?;
    let (analysis_residual, practical_residual): (Vec<_>, Vec<_>) = frame
        .samples()
        .iter()
        .zip(frame.noise())
        .zip(&rebuilt)
        .map(|((y, w), r)| ((y - w) - r, y - r))
        .unzip();

    let spec = frame.noise_spec();
    let empirical_analysis_power = mean_power(&analysis_residual);
    let noise_floor = spec.sigma_n2();
    Ok(CancellationResult {
        empirical_practical_power: mean_power(&practical_residual),
        predicted_power: predicted_residual_power(x.n_cols(), spec.sigma_w2(), x.n_rows())?,
        below_noise: empirical_analysis_power < noise_floor,
        empirical_analysis_power,
        noise_floor,
        analysis_residual,
        practical_residual,
    })
}

/// `K sigma_w^2 / N`.
pub fn predicted_residual_power(k: usize, sigma_w2: f64, n: usize) -> Result<f64> {
    if n < k {
        return Err(Error::Underdetermined {
            samples: n,
            taps: k,
        });
    }
    Ok(k as f64 * sigma_w2 / n as f64)
}

/// Expected practical residual power `(N - K) sigma_w^2 / N`.
pub fn predicted_practical_power(k: usize, sigma_w2: f64, n: usize) -> Result<f64> {
    if n < k {
        return Err(Error::Underdetermined {
            samples: n,
            taps: k,
        });
    }
    Ok((n - k) as f64 * sigma_w2 / n as f64)
}

/// Smallest `N` with `K sigma_w^2 / N < sigma_n^2`.
///
/// This is `floor(K sigma_w^2 / sigma_n^2) + 1`. A ratio within a few ulps of
/// an integer is snapped to it, so the equality case is never counted as
/// already below the floor.
pub fn find_threshold_n0(k: usize, sigma_w2: f64, sigma_n2: f64) -> Result<u64> {
    if !(sigma_n2 > 0.0 && sigma_n2.is_finite()) {
        return Err(Error::domain(
            "sigma_n2",
            format!("noise floor must be finite and > 0, got {sigma_n2}"),
        ));
    }
    if !(sigma_w2 >= 0.0 && sigma_w2.is_finite()) {
        return Err(Error::domain(
            "sigma_w2",
            format!("must be finite and >= 0, got {sigma_w2}"),
        ));
    }
    let ratio = k as f64 * sigma_w2 / sigma_n2;
    let nearest = ratio.round();
    let snapped = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        ratio.floor()
    };
    if snapped >= u64::MAX as f64 {
        return Err(Error::domain(
            "sigma_n2",
            "threshold does not fit in 64 bits",
        ));
    }
    Ok(snapped as u64 + 1)
}
