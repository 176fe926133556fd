//! Least-squares channel estimation over all known transmit symbols.
//!
//! The estimate solves the normal equations `X^H X h = X^H y` through a
//! Cholesky factor of the Gram matrix. `X^H X` and `X^H y` are built from the
//! Toeplitz structure of `X`, so one solve costs `O(N K + K^3)`.
//!
//! With i.i.d. noise of variance `sigma_w^2` the estimation error is
//! `X^+ w` and its per-tap mean square is `sigma_w^2 / K * Tr{(X^H X)^-1}`.

use num_complex::Complex64;

use crate::linalg::{Cholesky, SquareMatrix};
use crate::signal_model::{ChannelImpulseResponse, ConvolutionMatrix};
use crate::{Error, Result};

/// Solves are rejected once the Gram condition estimate exceeds this.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

/// Above this condition estimate the normal-equation solution gets
/// iterative refinement against the true residual `y - X h`.
const REFINE_ABOVE_CONDITION: f64 = 1e4;
const REFINEMENT_STEPS: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    taps: Vec<Complex64>,
    trace_metric: f64,
    gram_condition: f64,
}

impl ChannelEstimate {
    pub fn taps(&self) -> &[Complex64] {
        &self.taps
    }

    pub fn into_taps(self) -> Vec<Complex64> {
        self.taps
    }

    /// `Tr{(X^H X)^-1}`.
    pub fn trace_metric(&self) -> f64 {
        self.trace_metric
    }

    /// Upper bound on the 2-norm condition number of `X^H X`,
    /// `||G||_1 * Tr{G^-1}`.
    pub fn gram_condition(&self) -> f64 {
        self.gram_condition
    }
}

impl AsRef<[Complex64]> for ChannelEstimate {
    fn as_ref(&self) -> &[Complex64] {
        &self.taps
    }
}

/// Factored Gram matrix with its trace and condition estimate.
struct GramFactor {
    chol: Cholesky,
    trace: f64,
    condition: f64,
}

fn factor_gram(x: &ConvolutionMatrix) -> Result<GramFactor> {
    if x.n_rows() < x.n_cols() {
        return Err(Error::Underdetermined {
            samples: x.n_rows(),
            taps: x.n_cols(),
        });
    }
    let gram: SquareMatrix = x.gram();
    let chol = Cholesky::factor(&gram).ok_or(Error::Singular {
        condition: f64::INFINITY,
    })?;
    let trace = chol.inverse_trace();
    // ||G||_2 <= ||G||_1 for Hermitian G, and ||G^-1||_2 <= Tr{G^-1}.
    let condition = gram.one_norm() * trace;
    // NaN counts as singular too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(condition <= MAX_GRAM_CONDITION) {
        return Err(Error::Singular { condition });
    }
    Ok(GramFactor {
        chol,
        trace,
        condition,
    })
}

/// Least-squares estimate `argmin ||y - X h||^2`.
pub fn ls_estimate(x: &ConvolutionMatrix, y: &[Complex64]) -> Result<ChannelEstimate> {
    let rhs = x.adjoint_mul_vec(y)?;
    let gram = factor_gram(x)?;
    let mut taps = gram.chol.solve(&rhs);
    if gram.condition > REFINE_ABOVE_CONDITION {
        for _ in 0..REFINEMENT_STEPS {
            let fitted = x.mul_vec(&taps)?;
            let residual: Vec<_> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
            let step = gram.chol.solve(&x.adjoint_mul_vec(&residual)?);
            taps.iter_mut().zip(&step).for_each(|(t, d)| *t += d);
        }
    }
    Ok(ChannelEstimate {
        taps,
        trace_metric: gram.trace,
        gram_condition: gram.condition,
    })
}

/// `Tr{(X^H X)^-1}`, the factor that scales noise into estimation error.
pub fn trace_metric(x: &ConvolutionMatrix) -> Result<f64> {
    factor_gram(x).map(|g| g.trace)
}

/// `sigma_w^2 / K * trace`.
pub fn predicted_mse(sigma_w2: f64, k: usize, trace: f64) -> f64 {
    sigma_w2 / k as f64 * trace
}

/// Single-tap estimate `x^H y / x^H x`, a correlate-and-normalize
/// (despreading) operation.
pub fn single_tap_estimate(x: &[Complex64], y: &[Complex64]) -> Result<Complex64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            what: "received samples",
            expected: x.len(),
            found: y.len(),
        });
    }
    let energy: f64 = x.iter().map(Complex64::norm_sqr).sum();
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(energy > 0.0) {
        return Err(Error::domain("x", "symbol sequence has zero energy"));
    }
    let corr: Complex64 = x.iter().zip(y).map(|(a, b)| a.conj() * b).sum();
    Ok(corr / energy)
}

/// `(1/K) sum_k |est_k - h_k|^2` for one estimate.
pub fn tap_error_power(h: &[Complex64], estimate: &[Complex64]) -> Result<f64> {
    if h.len() != estimate.len() {
        return Err(Error::DimensionMismatch {
            what: "estimate",
            expected: h.len(),
            found: estimate.len(),
        });
    }
    let sum: f64 = h
        .iter()
        .zip(estimate)
        .map(|(a, b)| (b - a).norm_sqr())
        .sum();
    Ok(sum / h.len() as f64)
}

/// Mean per-tap squared error over a batch of estimates of the same channel.
pub fn empirical_mse<E: AsRef<[Complex64]>>(
    h: &ChannelImpulseResponse,
    estimates: &[E],
) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::domain("estimates", "need at least one estimate"));
    }
    let mut total = 0.0;
    for e in estimates {
        total += tap_error_power(h.taps(), e.as_ref())?;
    }
    Ok(total / estimates.len() as f64)
}
