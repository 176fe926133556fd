//! Transmit symbols, interference channels, composite noise and the
//! convolution model `y = X h + w`.
//!
//! `w` lumps the desired remote signal (variance `sigma_d^2`) together with
//! thermal noise (variance `sigma_n^2`); both are drawn as one
//! circularly-symmetric complex Gaussian with variance
//! `sigma_w^2 = sigma_d^2 + sigma_n^2`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::SquareMatrix;
use crate::seed::{rng_for, Stream};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Modulation {
    #[default]
    Bpsk,
    Qpsk,
}

impl Modulation {
    /// Average symbol energy `E_x`. Both constellations are unit energy.
    pub fn symbol_energy(self) -> f64 {
        1.0
    }

    pub fn constellation(self) -> &'static [Complex64] {
        const BPSK: [Complex64; 2] = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
        const QPSK: [Complex64; 4] = [
            Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
            Complex64::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
            Complex64::new(-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
            Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
        ];
        match self {
            Modulation::Bpsk => &BPSK,
            Modulation::Qpsk => &QPSK,
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modulation::Bpsk => "bpsk",
            Modulation::Qpsk => "qpsk",
        })
    }
}

impl FromStr for Modulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bpsk" => Ok(Modulation::Bpsk),
            "qpsk" => Ok(Modulation::Qpsk),
            other => Err(Error::domain(
                "modulation",
                format!("`{other}` is not one of bpsk, qpsk"),
            )),
        }
    }
}

/// Known transmit symbols `x_1..x_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSequence {
    symbols: Vec<Complex64>,
    modulation: Modulation,
}

impl SymbolSequence {
    /// Wraps explicit symbols, checking that each lies in the constellation.
    pub fn from_symbols(symbols: Vec<Complex64>, modulation: Modulation) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::domain("symbols", "sequence must be non-empty"));
        }
        let points = modulation.constellation();
        if let Some(pos) = symbols.iter().position(|s| !points.contains(s)) {
            return Err(Error::domain(
                "symbols",
                format!(
                    "symbol {pos} ({}) is not a {modulation} point",
                    symbols[pos]
                ),
            ));
        }
        Ok(Self {
            symbols,
            modulation,
        })
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    pub fn symbol_energy(&self) -> f64 {
        self.modulation.symbol_energy()
    }
}

/// Draws `n` i.i.d. symbols uniformly from the constellation.
///
/// # Panics
///
/// Panics if `n == 0`.
pub fn generate_symbols(n: usize, modulation: Modulation, seed: u64) -> SymbolSequence {
    assert!(n >= 1, "symbol sequence length must be at least 1");
    let mut rng = rng_for(seed, Stream::Symbols);
    let points = modulation.constellation();
    let symbols = (0..n)
        .map(|_| points[rng.random_range(0..points.len())])
        .collect();
    SymbolSequence {
        symbols,
        modulation,
    }
}

/// Complex taps `h_1..h_K` of the self-interference path.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelImpulseResponse {
    taps: Vec<Complex64>,
}

impl ChannelImpulseResponse {
    pub fn new(taps: Vec<Complex64>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::domain("taps", "channel needs at least one tap"));
        }
        if taps.iter().any(|t| !(t.re.is_finite() && t.im.is_finite())) {
            return Err(Error::domain("taps", "all taps must be finite"));
        }
        Ok(Self { taps })
    }

    pub fn taps(&self) -> &[Complex64] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// `sum |h_k|^2`.
    pub fn energy(&self) -> f64 {
        self.taps.iter().map(Complex64::norm_sqr).sum()
    }
}

impl AsRef<[Complex64]> for ChannelImpulseResponse {
    fn as_ref(&self) -> &[Complex64] {
        &self.taps
    }
}

/// One circularly-symmetric complex Gaussian sample; each quadrature has
/// standard deviation `std_per_component`.
fn complex_gaussian<R: Rng>(rng: &mut R, std_per_component: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * std_per_component, im * std_per_component)
}

/// `k` i.i.d. unit-variance circularly-symmetric complex Gaussian taps.
///
/// # Panics
///
/// Panics if `k == 0`.
pub fn sample_channel(k: usize, seed: u64) -> ChannelImpulseResponse {
    assert!(k >= 1, "channel needs at least one tap");
    let mut rng = rng_for(seed, Stream::Channel);
    let taps = (0..k)
        .map(|_| complex_gaussian(&mut rng, FRAC_1_SQRT_2))
        .collect();
    ChannelImpulseResponse { taps }
}

/// Noise bookkeeping for one received frame.
///
/// `sigma_w2` equals `sigma_d2 + sigma_n2` unless it was replaced with
/// [`NoiseSpec::with_composite_override`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    sir_db: f64,
    snr_db: f64,
    si_power: f64,
    sigma_d2: f64,
    sigma_n2: f64,
    sigma_w2: f64,
}

impl NoiseSpec {
    /// Builds a spec directly from the desired-signal and AWGN variances.
    /// The interference power is unknown, so `si_power` is NaN and SIR is
    /// NaN unless there is no desired signal (then +inf).
    pub fn from_variances(sigma_d2: f64, sigma_n2: f64) -> Result<Self> {
        for (name, v) in [("sigma_d2", sigma_d2), ("sigma_n2", sigma_n2)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::domain(
                    name,
                    format!("variance must be finite and >= 0, got {v}"),
                ));
            }
        }
        Ok(Self {
            sir_db: if sigma_d2 == 0.0 {
                f64::INFINITY
            } else {
                f64::NAN
            },
            snr_db: 10.0 * (sigma_d2 / sigma_n2).log10(),
            si_power: f64::NAN,
            sigma_d2,
            sigma_n2,
            sigma_w2: sigma_d2 + sigma_n2,
        })
    }

    /// Replaces the composite variance used to draw `w`, keeping `sigma_n2`
    /// as the noise floor. Used for controlled runs such as noiseless checks.
    pub fn with_composite_override(mut self, sigma_w2: f64) -> Result<Self> {
        if !(sigma_w2 >= 0.0 && sigma_w2.is_finite()) {
            return Err(Error::domain(
                "sigma_w2",
                format!("variance must be finite and >= 0, got {sigma_w2}"),
            ));
        }
        self.sigma_w2 = sigma_w2;
        Ok(self)
    }

    pub fn sir_db(&self) -> f64 {
        self.sir_db
    }

    pub fn snr_db(&self) -> f64 {
        self.snr_db
    }

    pub fn si_power(&self) -> f64 {
        self.si_power
    }

    /// Desired-signal variance.
    pub fn sigma_d2(&self) -> f64 {
        self.sigma_d2
    }

    /// Thermal noise variance; the "noise level" for sub-noise checks.
    pub fn sigma_n2(&self) -> f64 {
        self.sigma_n2
    }

    /// Composite variance of `w`.
    pub fn sigma_w2(&self) -> f64 {
        self.sigma_w2
    }
}

/// Converts SIR/SNR in dB to variances relative to the received
/// self-interference power `si_power`:
/// `sigma_d2 = si_power / 10^(sir/10)`, `sigma_n2 = sigma_d2 / 10^(snr/10)`.
pub fn resolve_noise(sir_db: f64, snr_db: f64, si_power: f64) -> Result<NoiseSpec> {
    if !(si_power > 0.0 && si_power.is_finite()) {
        return Err(Error::domain(
            "si_power",
            format!("must be finite and > 0, got {si_power}"),
        ));
    }
    for (name, v) in [("sir_db", sir_db), ("snr_db", snr_db)] {
        if !v.is_finite() {
            return Err(Error::domain(name, format!("must be finite, got {v}")));
        }
    }
    let sigma_d2 = si_power / 10f64.powf(sir_db / 10.0);
    let sigma_n2 = sigma_d2 / 10f64.powf(snr_db / 10.0);
    Ok(NoiseSpec {
        sir_db,
        snr_db,
        si_power,
        sigma_d2,
        sigma_n2,
        sigma_w2: sigma_d2 + sigma_n2,
    })
}

/// The `N x K` lower-banded Toeplitz matrix with entry `(i, j) = x[i - j]`
/// (zero for `i < j`), i.e. the first `N` outputs of `x * h` as `X h`.
///
/// Only the first column is stored; products and the Gram matrix are formed
/// from the Toeplitz structure directly.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionMatrix {
    column: Vec<Complex64>,
    k: usize,
}

impl ConvolutionMatrix {
    pub fn new(x: &SymbolSequence, k: usize) -> Result<Self> {
        Self::from_samples(x.symbols(), k)
    }

    /// Builds the matrix from arbitrary samples, e.g. zero-padded sequences.
    pub fn from_samples(samples: &[Complex64], k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("k", "need at least one tap"));
        }
        if k > samples.len() {
            return Err(Error::Underdetermined {
                samples: samples.len(),
                taps: k,
            });
        }
        Ok(Self {
            column: samples.to_vec(),
            k,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.column.len()
    }

    pub fn n_cols(&self) -> usize {
        self.k
    }

    /// The generating sequence (first column).
    pub fn first_column(&self) -> &[Complex64] {
        &self.column
    }

    /// Entry `(row, col)`, zero-based.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        assert!(row < self.n_rows() && col < self.k, "index out of range");
        if row >= col {
            self.column[row - col]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Materialised rows, for inspection and test oracles.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        (0..self.n_rows())
            .map(|r| (0..self.k).map(|c| self.entry(r, c)).collect())
            .collect()
    }

    /// `X v`.
    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.k {
            return Err(Error::DimensionMismatch {
                what: "tap vector",
                expected: self.k,
                found: v.len(),
            });
        }
        let x = &self.column;
        Ok((0..x.len())
            .map(|i| {
                let taps = &v[..self.k.min(i + 1)];
                taps.iter().enumerate().map(|(j, h)| x[i - j] * h).sum()
            })
            .collect())
    }

    /// `X^H v`.
    pub fn adjoint_mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.n_rows() {
            return Err(Error::DimensionMismatch {
                what: "sample vector",
                expected: self.n_rows(),
                found: v.len(),
            });
        }
        Ok((0..self.k)
            .map(|j| {
                self.column
                    .iter()
                    .zip(&v[j..])
                    .map(|(x, y)| x.conj() * y)
                    .sum()
            })
            .collect())
    }

    /// `X^H X` in `O(N K + K^2)`.
    ///
    /// The first row is a truncated autocorrelation; each further diagonal
    /// step drops one product from the tail of the sequence:
    /// `G[a+1][b+1] = G[a][b] - conj(x[N-1-a]) x[N-1-b]`.
    pub(crate) fn gram(&self) -> SquareMatrix {
        let x = &self.column;
        let n = x.len();
        let k = self.k;
        let mut g = SquareMatrix::zeros(k);
        for b in 0..k {
            let v: Complex64 = x[b..].iter().zip(x).map(|(xn, xm)| xn.conj() * xm).sum();
            g.set(0, b, v);
        }
        for a in 0..k - 1 {
            for b in a..k - 1 {
                let v = g.get(a, b) - x[n - 1 - a].conj() * x[n - 1 - b];
                g.set(a + 1, b + 1, v);
            }
        }
        for a in 0..k {
            let d = g.get(a, a).re;
            g.set(a, a, Complex64::new(d, 0.0));
            for b in a + 1..k {
                g.set(b, a, g.get(a, b).conj());
            }
        }
        g
    }
}

/// One received frame `y = X h + w`, with `w` retained for analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedFrame {
    samples: Vec<Complex64>,
    noise_spec: NoiseSpec,
    noise: Vec<Complex64>,
}

impl ReceivedFrame {
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn noise_spec(&self) -> &NoiseSpec {
        &self.noise_spec
    }

    /// The realised composite noise `w`.
    pub fn noise(&self) -> &[Complex64] {
        &self.noise
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

pub fn transmit(
    x: &SymbolSequence,
    h: &ChannelImpulseResponse,
    noise: &NoiseSpec,
    seed: u64,
) -> Result<ReceivedFrame> {
    let matrix = ConvolutionMatrix::new(x, h.len())?;
    let clean = matrix.mul_vec(h.taps())?;
    let mut rng = rng_for(seed, Stream::Noise);
    let std = (noise.sigma_w2() / 2.0).sqrt();
    let w: Vec<Complex64> = (0..clean.len())
        .map(|_| complex_gaussian(&mut rng, std))
        .collect();
    let samples = clean.iter().zip(&w).map(|(s, n)| s + n).collect();
    Ok(ReceivedFrame {
        samples,
        noise_spec: *noise,
        noise: w,
    })
}
