//! `fishbit process`: estimate respiration and activity per window from a
//! raw accelerometer CSV.

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use fishbit_core::signal::{process_windows, Mode};
use fishbit_core::Config;

use crate::config::FileConfig;
use crate::csvio;
use crate::errors::{CliError, CliResult};
use crate::manifest::{manifest_path_for, RunManifest};

#[derive(Debug, Args)]
pub struct ProcessArgs {
    /// Raw accelerometer CSV (header `t_s,ax_g,ay_g,az_g`).
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Estimator flavour: `exact` (PC pipeline) or `onboard` (tag firmware).
    #[arg(long, default_value = "exact")]
    pub mode: String,
    /// Sampling rate, Hz; inferred from the timestamps when omitted.
    #[arg(long)]
    pub fs: Option<f64>,
    /// Output windows CSV (header `window_start_s,resp_freq_bps,activity_g,mode`).
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
struct EffectiveSettings<'a> {
    input: String,
    mode: &'a str,
    fs: Option<f64>,
}

pub fn parse_mode(name: &str) -> CliResult<Mode> {
    match name {
        "exact" => Ok(Mode::Exact),
        "onboard" => Ok(Mode::Onboard),
        other => Err(CliError::usage(format!(
            "unknown mode {other:?} (expected 'exact' or 'onboard')"
        ))),
    }
}

pub fn run(args: &ProcessArgs, file_cfg: &FileConfig) -> CliResult<()> {
    let mode_name = file_cfg.mode.clone().unwrap_or_else(|| args.mode.clone());
    let mode = parse_mode(&mode_name)?;
    let fs_hint = file_cfg.fs.or(args.fs);

    let series = csvio::read_raw_csv(&args.input, fs_hint)?;
    let fs = series.fs();
    let cfg = Config::for_mode(fs, mode);
    cfg.validate().map_err(|e| CliError::data(format!("estimator configuration: {e}")))?;

    let (windows, leftover) = process_windows(&series, &cfg, mode)
        .map_err(|e| CliError::data(format!("{}: {e}", args.input.display())))?;
    if windows.is_empty() {
        eprintln!(
            "warning: {} holds {} samples ({:.2} s), shorter than one {:.2} s window; \
             no rows written",
            args.input.display(),
            series.len(),
            series.len() as f64 / fs,
            cfg.window_seconds()
        );
    } else if leftover > 0 {
        eprintln!(
            "warning: ignored incomplete tail of {leftover} samples ({:.2} s)",
            leftover as f64 / fs
        );
    }

    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(&args.out, csvio::windows_csv_text(&windows))?;

    let settings = EffectiveSettings {
        input: args.input.display().to_string(),
        mode: &mode_name,
        fs: fs_hint,
    };
    let manifest_path = manifest_path_for(&args.out);
    RunManifest::new("process", &settings, None, &[&args.input], &[&args.out])
        .write(&manifest_path)?;

    println!(
        "wrote {} ({} windows, mode {mode_name}), {}",
        args.out.display(),
        windows.len(),
        manifest_path.display()
    );
    Ok(())
}
