//! Optional TOML settings file.
//!
//! A settings file is named either by `--config <file>` or by the
//! `FISHBIT_CONFIG` environment variable (the flag wins). Values present in
//! the file override the corresponding command-line flags — the file is the
//! instrument's calibrated configuration and takes precedence over ad-hoc
//! invocations, which keeps batch reprocessing runs consistent.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::errors::{CliError, CliResult};

/// Environment variable naming the default settings file.
pub const CONFIG_ENV: &str = "FISHBIT_CONFIG";

/// Settings a file may pin. Every field is optional; absent fields leave
/// the flag (or its default) in force.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    /// Sampling rate, Hz.
    pub fs: Option<f64>,
    /// Estimator flavour for `process`: "exact" or "onboard".
    pub mode: Option<String>,
    /// RNG seed for `synth` / `simulate`.
    pub seed: Option<u64>,
    /// Species preset name.
    pub preset: Option<String>,
    /// Schedule preset name for `simulate`.
    pub schedule: Option<String>,
    /// Swim speed for synthetic sources, body-lengths per second.
    pub speed_bls: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::data(format!("cannot read config {}: {e}", path.display()))
        })?;
        toml::from_str(&text)
            .map_err(|e| CliError::data(format!("config {}: {e}", path.display())))
    }
}

/// Resolves which settings file applies, if any: the `--config` flag first,
/// otherwise `FISHBIT_CONFIG` from the environment.
pub fn resolve_config(flag: Option<&Path>) -> CliResult<Option<(PathBuf, FileConfig)>> {
    let path = match flag {
        Some(p) => Some(p.to_path_buf()),
        None => std::env::var_os(CONFIG_ENV).map(PathBuf::from),
    };
    match path {
        Some(p) => Ok(Some((p.clone(), FileConfig::load(&p)?))),
        None => Ok(None),
    }
}

/// `file value if present, else the flag value` — the file overrides flags.
pub fn prefer<T: Clone>(file_value: &Option<T>, flag_value: T) -> T {
    file_value.clone().unwrap_or(flag_value)
}
