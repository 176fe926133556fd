//! Command-line front end for the estimation and cancellation sweeps.
//!
//! Exit codes: `0` success, `1` configuration or usage error, `2` numerical
//! or I/O failure.

pub mod config;
pub mod csv;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use sic_core::{
    cancel, find_threshold_n0, generate_symbols, ls_estimate, predicted_mse,
    predicted_residual_power, run_mse_sweep, run_rsi_sweep, run_trace_sweep, sample_channel,
    transmit, ConvolutionMatrix, SweepConfig, SweepRow,
};
use thiserror::Error;

use crate::csv::format_real;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error(transparent)]
    Core(#[from] sic_core::Error),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 1,
            CliError::Core(e) if e.is_numerical() => 2,
            CliError::Core(sic_core::Error::Trial { .. }) => 2,
            CliError::Core(_) => 1,
            CliError::Io { .. } => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "sicsim",
    version,
    about = "Least-squares self-interference estimation and cancellation sweeps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mean Tr{(X^H X)^-1} versus sequence length
    TraceSweep(CommonArgs),
    /// Channel estimation MSE versus sequence length
    MseSweep(CommonArgs),
    /// Residual self-interference power versus sequence length
    RsiSweep(CommonArgs),
    /// One estimation and cancellation run with per-tap errors
    Estimate(CommonArgs),
    /// Sequence length needed to cancel below the noise floor
    Threshold(CommonArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Config file with `key = value` lines
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file (stdout when omitted)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Master seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo trials per cell
    #[arg(long)]
    pub trials: Option<u64>,
    /// Single sequence length
    #[arg(long, conflicts_with = "n_list")]
    pub n: Option<String>,
    /// Comma-separated sequence lengths
    #[arg(long, value_name = "LIST")]
    pub n_list: Option<String>,
    /// Single channel length
    #[arg(long, conflicts_with = "k_list")]
    pub k: Option<String>,
    /// Comma-separated channel lengths
    #[arg(long, value_name = "LIST")]
    pub k_list: Option<String>,
    /// Modulation of the known symbols: bpsk or qpsk
    #[arg(long = "mod", value_name = "MOD")]
    pub modulation: Option<String>,
    /// Self-interference to desired-signal ratio
    #[arg(long, allow_negative_numbers = true)]
    pub sir_db: Option<String>,
    /// Desired-signal to AWGN ratio
    #[arg(long, allow_negative_numbers = true)]
    pub snr_db: Option<String>,
    /// Residual to report: analysis or practical
    #[arg(long, value_name = "MODE")]
    pub residual: Option<String>,
    /// Override of the composite noise variance
    #[arg(long = "sigma-w2", allow_negative_numbers = true)]
    pub sigma_w2: Option<String>,
    /// Progress and per-row diagnostics on stderr
    #[arg(short, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

impl CommonArgs {
    /// `base`, then the config file, then flags.
    pub fn sweep_config(&self, base: SweepConfig) -> Result<SweepConfig, CliError> {
        let mut cfg = base;
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
                key: "config".into(),
                reason: format!("cannot read {}: {e}", path.display()),
            })?;
            config::apply_file(&mut cfg, &text)?;
        }
        let flags = [
            ("n_values", self.n.as_deref().or(self.n_list.as_deref())),
            ("k_values", self.k.as_deref().or(self.k_list.as_deref())),
            ("modulation", self.modulation.as_deref()),
            ("sir_db", self.sir_db.as_deref()),
            ("snr_db", self.snr_db.as_deref()),
            ("residual_mode", self.residual.as_deref()),
            ("sigma_w2", self.sigma_w2.as_deref()),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                config::apply(&mut cfg, key, v)?;
            }
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        Ok(cfg)
    }
}

/// Parses `argv` (including the program name) and runs, writing reports to
/// the given streams. Returns the process exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{rendered}")
            } else {
                write!(stderr, "{rendered}")
            };
            return code;
        }
    };
    match execute(&cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut io::stdout().lock(), &mut io::stderr().lock())
}

fn execute(
    command: &Command,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    // single-cell commands default to n = 2000, k = 20
    let single_cell = SweepConfig {
        n_values: vec![2000],
        k_values: vec![20],
        ..SweepConfig::default()
    };
    let threshold = SweepConfig {
        k_values: vec![20],
        ..SweepConfig::default()
    };
    let (args, kind, base) = match command {
        Command::TraceSweep(a) => (a, "trace-sweep", SweepConfig::default()),
        Command::MseSweep(a) => (a, "mse-sweep", SweepConfig::default()),
        Command::RsiSweep(a) => (a, "rsi-sweep", SweepConfig::default()),
        Command::Estimate(a) => (a, "estimate", single_cell),
        Command::Threshold(a) => (a, "threshold", threshold),
    };
    let cfg = args.sweep_config(base)?;
    if args.verbose > 0 {
        let _ = writeln!(stderr, "{kind}: {cfg:?}");
    }
    let started = Instant::now();
    match command {
        Command::TraceSweep(_) | Command::MseSweep(_) | Command::RsiSweep(_) => {
            let rows = match command {
                Command::TraceSweep(_) => run_trace_sweep(&cfg)?,
                Command::MseSweep(_) => run_mse_sweep(&cfg)?,
                _ => run_rsi_sweep(&cfg)?,
            };
            emit_rows(&rows, args.out.as_deref(), stdout)?;
            if args.verbose > 0 {
                for row in &rows {
                    let _ = writeln!(
                        stderr,
                        "n={:<6} k={:<3} mean={} predicted={} ratio={:.4}",
                        row.n,
                        row.k,
                        format_real(row.metric_mean),
                        format_real(row.predicted),
                        row.metric_mean / row.predicted
                    );
                }
            }
        }
        Command::Estimate(_) => {
            let report = estimate_report(&cfg)?;
            emit_text(&report, args.out.as_deref(), stdout)?;
        }
        Command::Threshold(_) => {
            let report = threshold_report(&cfg)?;
            emit_text(&report, args.out.as_deref(), stdout)?;
        }
    }
    if args.verbose > 0 {
        let _ = writeln!(stderr, "elapsed {:.3?}", started.elapsed());
    }
    Ok(())
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn emit_rows(
    rows: &[SweepRow],
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    match out {
        Some(path) => csv::write_csv(rows, path).map_err(io_err(path)),
        None => csv::write_rows(rows, stdout).map_err(io_err(Path::new("<stdout>"))),
    }
}

fn emit_text(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(io_err(path)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(io_err(Path::new("<stdout>"))),
    }
}

fn single(values: &[usize], key: &str) -> Result<usize, CliError> {
    match values {
        [v] => Ok(*v),
        _ => Err(CliError::Config {
            key: key.into(),
            reason: format!("this command takes a single value, got {values:?}"),
        }),
    }
}

fn estimate_report(cfg: &SweepConfig) -> Result<String, CliError> {
    let n = single(&cfg.n_values, "n_values")?;
    let k = single(&cfg.k_values, "k_values")?;
    let mut checked = cfg.clone();
    checked.n_values = vec![n];
    checked.k_values = vec![k];
    checked.validate()?;

    let noise = cfg.noise_for(k)?;
    let seed = cfg.master_seed;
    let x = generate_symbols(n, cfg.modulation, seed);
    let h = sample_channel(k, seed);
    let frame = transmit(&x, &h, &noise, seed)?;
    let matrix = ConvolutionMatrix::new(&x, k)?;
    let est = ls_estimate(&matrix, frame.samples())?;
    let res = cancel(&frame, &matrix, est.taps())?;

    let errors: Vec<f64> = est
        .taps()
        .iter()
        .zip(h.taps())
        .map(|(e, t)| (e - t).norm_sqr())
        .collect();
    let mse = errors.iter().sum::<f64>() / k as f64;

    let mut s = String::new();
    let _ = writeln!(s, "n = {n}");
    let _ = writeln!(s, "k = {k}");
    let _ = writeln!(s, "modulation = {}", cfg.modulation);
    let _ = writeln!(s, "seed = {seed}");
    let _ = writeln!(s, "sigma_w2 = {}", format_real(noise.sigma_w2()));
    let _ = writeln!(s, "sigma_n2 = {}", format_real(noise.sigma_n2()));
    let _ = writeln!(s, "trace = {}", format_real(est.trace_metric()));
    let _ = writeln!(s, "gram_condition = {}", format_real(est.gram_condition()));
    let _ = writeln!(s, "empirical_mse = {}", format_real(mse));
    let _ = writeln!(
        s,
        "predicted_mse = {}",
        format_real(predicted_mse(noise.sigma_w2(), k, est.trace_metric()))
    );
    let _ = writeln!(
        s,
        "analysis_residual_power = {}",
        format_real(res.empirical_analysis_power)
    );
    let _ = writeln!(
        s,
        "practical_residual_power = {}",
        format_real(res.empirical_practical_power)
    );
    let _ = writeln!(
        s,
        "predicted_residual_power = {}",
        format_real(res.predicted_power)
    );
    let _ = writeln!(s, "below_noise = {}", res.below_noise);
    let _ = writeln!(
        s,
        "tap,true_re,true_im,estimate_re,estimate_im,squared_error"
    );
    for (i, ((t, e), err)) in h.taps().iter().zip(est.taps()).zip(&errors).enumerate() {
        let _ = writeln!(
            s,
            "{i},{},{},{},{},{}",
            format_real(t.re),
            format_real(t.im),
            format_real(e.re),
            format_real(e.im),
            format_real(*err)
        );
    }
    Ok(s)
}

fn threshold_report(cfg: &SweepConfig) -> Result<String, CliError> {
    let k = single(&cfg.k_values, "k_values")?;
    let noise = cfg.noise_for(k)?;
    let n0 = find_threshold_n0(k, noise.sigma_w2(), noise.sigma_n2())?;

    let mut grid: Vec<usize> = cfg.n_values.iter().copied().filter(|&n| n >= k).collect();
    if let Ok(n0) = usize::try_from(n0) {
        grid.extend([n0.saturating_sub(1).max(k), n0]);
    }
    grid.sort_unstable();
    grid.dedup();

    let mut s = String::new();
    let _ = writeln!(s, "k = {k}");
    let _ = writeln!(s, "modulation = {}", cfg.modulation);
    let _ = writeln!(s, "sigma_w2 = {}", format_real(noise.sigma_w2()));
    let _ = writeln!(s, "sigma_n2 = {}", format_real(noise.sigma_n2()));
    let _ = writeln!(s, "N0 = {n0}");
    let _ = writeln!(s, "n,predicted_power,noise_floor,below_noise");
    for n in grid {
        let p = predicted_residual_power(k, noise.sigma_w2(), n)?;
        let _ = writeln!(
            s,
            "{n},{},{},{}",
            format_real(p),
            format_real(noise.sigma_n2()),
            (n as u64) >= n0
        );
    }
    Ok(s)
}
