//! `fishbit synth`: write a seeded synthetic recording and its ground truth.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use fishbit_core::synth::{self, SpeciesPreset, SynthError};

use crate::config::{prefer, FileConfig};
use crate::csvio;
use crate::errors::{CliError, CliResult};
use crate::manifest::RunManifest;

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Species preset name (see `sea_bream`, `sea_bass`).
    #[arg(long, default_value = "sea_bream")]
    pub preset: String,
    /// Load the species preset from a TOML file instead of a built-in name.
    #[arg(long, value_name = "FILE")]
    pub preset_file: Option<PathBuf>,
    /// Recording length, seconds.
    #[arg(long, value_name = "SECONDS", default_value_t = 120.0)]
    pub duration_s: f64,
    /// Sampling rate, Hz.
    #[arg(long, default_value_t = 100.0)]
    pub fs: f64,
    /// RNG seed; identical seeds reproduce the file byte for byte.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Constant swim speed, body-lengths per second (0 = resting).
    #[arg(long, value_name = "BL_PER_S", default_value_t = 0.0)]
    pub speed_bls: f64,
    /// Output stem: writes <stem>.raw.csv, <stem>.truth.csv and
    /// <stem>.manifest.json.
    #[arg(long, value_name = "STEM")]
    pub out: PathBuf,
}

/// Flag values after config-file overrides; hashed into the manifest.
#[derive(Debug, Serialize)]
struct EffectiveSettings<'a> {
    preset: &'a str,
    preset_file: Option<String>,
    duration_s: f64,
    fs: f64,
    seed: u64,
    speed_bls: f64,
}

fn map_synth_error(e: SynthError) -> CliError {
    match e {
        // bad names and bad parameter values are invocation mistakes
        SynthError::UnknownPreset(_) | SynthError::InvalidModel(_) => CliError::usage(e.to_string()),
        SynthError::PresetFile(_) => CliError::data(e.to_string()),
    }
}

pub fn run(args: &SynthArgs, file_cfg: &FileConfig) -> CliResult<()> {
    let preset_name = prefer(&file_cfg.preset, args.preset.clone());
    let fs = prefer(&file_cfg.fs, args.fs);
    let seed = prefer(&file_cfg.seed, args.seed);
    let speed = prefer(&file_cfg.speed_bls, args.speed_bls);

    let preset: SpeciesPreset<f64> = match &args.preset_file {
        Some(path) => synth::load_preset_file(path).map_err(map_synth_error)?,
        None => SpeciesPreset::builtin(&preset_name).map_err(map_synth_error)?,
    };

    let (series, truth) = synth::generate_swimming(&preset, speed, args.duration_s, fs, seed)
        .map_err(map_synth_error)?;

    let raw_path = with_suffix(&args.out, "raw.csv");
    let truth_path = with_suffix(&args.out, "truth.csv");
    let manifest_path = with_suffix(&args.out, "manifest.json");
    if let Some(parent) = raw_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(&raw_path, csvio::raw_csv_text(&series))?;
    std::fs::write(&truth_path, csvio::truth_csv_text(&truth))?;

    let settings = EffectiveSettings {
        preset: &preset_name,
        preset_file: args.preset_file.as_ref().map(|p| p.display().to_string()),
        duration_s: args.duration_s,
        fs,
        seed,
        speed_bls: speed,
    };
    let inputs: Vec<&Path> = args.preset_file.iter().map(PathBuf::as_path).collect();
    RunManifest::new("synth", &settings, Some(seed), &inputs, &[&raw_path, &truth_path])
        .write(&manifest_path)?;

    println!(
        "wrote {} ({} samples at {fs} Hz), {} ({} ticks), {}",
        raw_path.display(),
        series.len(),
        truth_path.display(),
        truth.breath_hz.len(),
        manifest_path.display()
    );
    Ok(())
}

/// `stem -> stem.<suffix>` without clobbering directories in the stem.
pub fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut name = stem.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".");
    name.push(suffix);
    stem.with_file_name(name)
}
