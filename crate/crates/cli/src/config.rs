//! Flat `key = value` config files.
//!
//! Keys are exactly the [`SweepConfig`] field names. Lists are comma
//! separated, `#` starts a comment, blank lines are ignored. Unknown and
//! repeated keys are rejected.

use std::str::FromStr;

use sic_core::{Modulation, ResidualMode, SweepConfig};

use crate::CliError;

pub const KEYS: &[&str] = &[
    "n_values",
    "k_values",
    "trials",
    "modulation",
    "sir_db",
    "snr_db",
    "master_seed",
    "residual_mode",
    "sigma_w2",
];

fn config_err(key: &str, reason: impl Into<String>) -> CliError {
    CliError::Config {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn parse_scalar<T: FromStr>(key: &str, raw: &str, domain: &str) -> Result<T, CliError> {
    raw.trim()
        .parse()
        .map_err(|_| config_err(key, format!("`{}` is not {domain}", raw.trim())))
}

pub fn parse_list(key: &str, raw: &str) -> Result<Vec<usize>, CliError> {
    raw.split(',')
        .map(|item| parse_scalar(key, item, "a comma-separated list of positive integers"))
        .collect()
}

/// Sets one field of `cfg` from its textual value.
pub fn apply(cfg: &mut SweepConfig, key: &str, raw: &str) -> Result<(), CliError> {
    match key {
        "n_values" => cfg.n_values = parse_list(key, raw)?,
        "k_values" => cfg.k_values = parse_list(key, raw)?,
        "trials" => cfg.trials = parse_scalar(key, raw, "a positive integer")?,
        "modulation" => {
            cfg.modulation = Modulation::from_str(raw.trim()).map_err(|_| {
                config_err(key, format!("`{}` is not one of bpsk, qpsk", raw.trim()))
            })?
        }
        "sir_db" => cfg.sir_db = parse_scalar(key, raw, "a finite number of dB")?,
        "snr_db" => cfg.snr_db = parse_scalar(key, raw, "a finite number of dB")?,
        "master_seed" => cfg.master_seed = parse_scalar(key, raw, "a non-negative 64-bit integer")?,
        "residual_mode" => {
            cfg.residual_mode = ResidualMode::from_str(raw.trim()).map_err(|_| {
                config_err(
                    key,
                    format!("`{}` is not one of analysis, practical", raw.trim()),
                )
            })?
        }
        "sigma_w2" => cfg.sigma_w2 = Some(parse_scalar(key, raw, "a finite number >= 0")?),
        other => {
            return Err(config_err(
                other,
                format!("unknown key; accepted keys are {}", KEYS.join(", ")),
            ));
        }
    }
    Ok(())
}

/// Applies every entry of a config file to `cfg`.
pub fn apply_file(cfg: &mut SweepConfig, text: &str) -> Result<(), CliError> {
    let mut seen: Vec<&str> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(config_err(
                line,
                format!("line {}: expected `key = value`", lineno + 1),
            ));
        };
        let key = key.trim();
        if seen.contains(&key) {
            return Err(config_err(
                key,
                format!("line {}: key given twice", lineno + 1),
            ));
        }
        seen.push(key);
        apply(cfg, key, value)?;
    }
    Ok(())
}
