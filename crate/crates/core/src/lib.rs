//! Least-squares self-interference channel estimation and digital
//! self-interference cancellation for full-duplex links.
//!
//! The crate is organised along the processing chain:
//!
//! * [`signal_model`] draws known transmit symbols, interference channels and
//!   composite noise, and forms received frames `y = X h + w` where `X` is the
//!   lower-banded Toeplitz convolution matrix of the symbols.
//! * [`estimator`] solves the least-squares problem over every transmitted
//!   symbol and evaluates `Tr{(X^H X)^-1}` and the predicted estimation MSE.
//! * [`canceller`] reconstructs the interference, subtracts it and compares the
//!   residual power against `K sigma_w^2 / N`.
//! * [`experiments`] runs seeded, parallel Monte Carlo sweeps over `N` and `K`.
//!
//! ```
//! use sic_core::{
//!     estimator::ls_estimate, resolve_noise, sample_channel, generate_symbols, transmit,
//!     ConvolutionMatrix, Modulation,
//! };
//!
//! let x = generate_symbols(500, Modulation::Bpsk, 1);
//! let h = sample_channel(5, 1);
//! let noise = resolve_noise(10.0, 20.0, 5.0).unwrap();
//! let frame = transmit(&x, &h, &noise, 1).unwrap();
//! let matrix = ConvolutionMatrix::new(&x, h.len()).unwrap();
//! let estimate = ls_estimate(&matrix, frame.samples()).unwrap();
//! assert_eq!(estimate.taps().len(), 5);
//! ```

pub mod canceller;
mod error;
pub mod estimator;
pub mod experiments;
mod linalg;
pub mod seed;
pub mod signal_model;

pub use canceller::{
    cancel, find_threshold_n0, predicted_residual_power, reconstruct, CancellationResult,
};
pub use error::{Error, Result};
pub use estimator::{
    empirical_mse, ls_estimate, predicted_mse, single_tap_estimate, trace_metric, ChannelEstimate,
};
pub use experiments::{
    run_mse_sweep, run_rsi_sweep, run_trace_sweep, ResidualMode, SweepConfig, SweepRow,
};
pub use num_complex::Complex64;
pub use signal_model::{
    generate_symbols, resolve_noise, sample_channel, transmit, ChannelImpulseResponse,
    ConvolutionMatrix, Modulation, NoiseSpec, ReceivedFrame, SymbolSequence,
};
