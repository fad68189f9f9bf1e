//! Run manifests: every command that writes outputs drops a JSON manifest
//! next to them recording what produced what. Manifests carry no
//! timestamps, so identical invocations produce byte-identical manifests —
//! part of the reproducibility contract.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::errors::{CliError, CliResult};

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool_version: &'static str,
    /// Subcommand that ran.
    pub command: String,
    /// SHA-256 of the effective settings (flags after config-file overrides).
    pub config_hash: String,
    /// RNG seed, for commands that use one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(
        command: &str,
        effective_settings: &impl Serialize,
        seed: Option<u64>,
        inputs: &[&Path],
        outputs: &[&Path],
    ) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config_hash: settings_hash(effective_settings),
            seed,
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        }
    }

    /// Writes the manifest as pretty JSON with a trailing newline.
    pub fn write(&self, path: &Path) -> CliResult<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::data(format!("manifest serialization: {e}")))?;
        std::fs::write(path, json + "\n")
            .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?;
        Ok(())
    }
}

/// Deterministic digest of the effective settings a command ran with.
pub fn settings_hash(settings: &impl Serialize) -> String {
    let canonical = serde_json::to_string(settings).expect("settings serialize");
    let digest = Sha256::digest(canonical.as_bytes());
    format!("sha256:{digest:x}")
}

/// `out.csv -> out.manifest.json`, `run.windows.csv -> run.windows.manifest.json`,
/// `stem -> stem.manifest.json`. Only the final extension is replaced, so
/// dotted names keep their full stem and manifests never collide.
pub fn manifest_path_for(output: &Path) -> PathBuf {
    let stem = output.with_extension("");
    let mut name = stem.file_name().map_or_else(Default::default, |n| n.to_os_string());
    name.push(".manifest.json");
    stem.with_file_name(name)
}
