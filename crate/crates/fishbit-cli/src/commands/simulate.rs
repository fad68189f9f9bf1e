//! `fishbit simulate`: run a logging schedule against a synthetic fish and
//! write the tag's binary download image plus a state report.

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use fishbit_core::device::codec::{encode_log, LogMode};
use fishbit_core::device::{
    run_schedule, DeviceConfig, DeviceError, PresetSource, SchedulePreset, ScheduleProgram,
};
use fishbit_core::synth::SpeciesPreset;

use crate::config::{prefer, FileConfig};
use crate::errors::{CliError, CliResult};
use crate::manifest::RunManifest;

use super::synth::with_suffix;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Schedule preset: burst-2d, week-1, weeks-3 or continuous.
    /// Mutually exclusive with the custom --window-s/--period-s/--total-s trio.
    #[arg(long)]
    pub schedule: Option<String>,
    /// Custom schedule: acquisition window length, seconds.
    #[arg(long, requires = "period_s", requires = "total_s", conflicts_with = "schedule")]
    pub window_s: Option<f64>,
    /// Custom schedule: window start-to-start period, seconds.
    #[arg(long, requires = "window_s")]
    pub period_s: Option<f64>,
    /// Custom schedule: total programmed duration, seconds.
    #[arg(long, requires = "window_s")]
    pub total_s: Option<f64>,
    /// Custom schedule: what to store, `raw` samples or `processed` windows.
    #[arg(long, default_value = "processed")]
    pub log_mode: String,
    /// Species preset feeding the simulated sensor.
    #[arg(long, default_value = "sea_bream")]
    pub preset: String,
    /// Constant swim speed of the simulated fish, body-lengths per second.
    #[arg(long, value_name = "BL_PER_S", default_value_t = 0.0)]
    pub speed_bls: f64,
    /// RNG seed for the simulated sensor signal.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sampling rate, Hz (whole number; the tag stores it in the log header).
    #[arg(long, default_value_t = 100.0)]
    pub fs: f64,
    /// Output stem: writes <stem>.bin, <stem>.report.json and
    /// <stem>.manifest.json.
    #[arg(long, value_name = "STEM")]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
struct EffectiveSettings<'a> {
    schedule: Option<&'a str>,
    window_s: Option<f64>,
    period_s: Option<f64>,
    total_s: Option<f64>,
    log_mode: &'a str,
    preset: &'a str,
    speed_bls: f64,
    seed: u64,
    fs: f64,
}

/// JSON state report written next to the binary log.
#[derive(Debug, Serialize)]
struct StateReport<'a> {
    schedule: ScheduleSection<'a>,
    run: RunSection<'a>,
}

#[derive(Debug, Serialize)]
struct ScheduleSection<'a> {
    preset: Option<&'a str>,
    mode: &'a str,
    window_seconds: f64,
    period_seconds: f64,
    total_duration_seconds: f64,
    window_count: u64,
    active_seconds: f64,
    flash_needed_bytes: usize,
    warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
struct RunSection<'a> {
    status: &'a str,
    records: usize,
    elapsed_s: f64,
    flash_used_bytes: usize,
    battery_used_s: f64,
    led_lit: bool,
}

fn map_device_error(e: DeviceError) -> CliError {
    CliError::data(e.to_string())
}

pub fn run(args: &SimulateArgs, file_cfg: &FileConfig) -> CliResult<()> {
    let schedule_name = file_cfg.schedule.clone().or_else(|| args.schedule.clone());
    let preset_name = prefer(&file_cfg.preset, args.preset.clone());
    let speed = prefer(&file_cfg.speed_bls, args.speed_bls);
    let seed = prefer(&file_cfg.seed, args.seed);
    let fs = prefer(&file_cfg.fs, args.fs);

    let (program, preset_label) = match (&schedule_name, args.window_s) {
        (Some(name), None) => {
            let preset: SchedulePreset =
                name.parse().map_err(|e: String| CliError::usage(e))?;
            (preset.program(), Some(preset.as_str()))
        }
        (None, Some(window_s)) => {
            let mode: LogMode = args.log_mode.parse().map_err(|e: String| CliError::usage(e))?;
            let program = ScheduleProgram {
                window_seconds: window_s,
                period_seconds: args.period_s.expect("clap requires period_s"),
                total_duration_seconds: args.total_s.expect("clap requires total_s"),
                mode,
            };
            (program, None)
        }
        (Some(_), Some(_)) => {
            return Err(CliError::usage(
                "--schedule conflicts with the custom --window-s/--period-s/--total-s trio",
            ))
        }
        (None, None) => {
            return Err(CliError::usage(
                "pass either --schedule <preset> or --window-s/--period-s/--total-s".to_string(),
            ))
        }
    };

    let species = SpeciesPreset::<f64>::builtin(&preset_name)
        .map_err(|e| CliError::usage(e.to_string()))?;
    let cfg = DeviceConfig { fs, ..DeviceConfig::default() };
    let mut source = PresetSource::new(species, speed, fs, seed);
    let outcome = run_schedule(&program, &mut source, &cfg).map_err(map_device_error)?;
    for warning in &outcome.report.warnings {
        eprintln!("warning: {warning}");
    }

    let bin_path = with_suffix(&args.out, "bin");
    let report_path = with_suffix(&args.out, "report.json");
    let manifest_path = with_suffix(&args.out, "manifest.json");
    if let Some(parent) = bin_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }

    let bytes = encode_log(&outcome.state.records, program.mode, cfg.fs_u16(), cfg.counts_per_g)
        .map_err(|e| CliError::data(format!("log encoding: {e}")))?;
    std::fs::write(&bin_path, &bytes)?;

    let report = StateReport {
        schedule: ScheduleSection {
            preset: preset_label,
            mode: program.mode.as_str(),
            window_seconds: program.window_seconds,
            period_seconds: program.period_seconds,
            total_duration_seconds: program.total_duration_seconds,
            window_count: outcome.report.window_count,
            active_seconds: outcome.report.active_seconds,
            flash_needed_bytes: outcome.report.flash_needed_bytes,
            warnings: outcome.report.warnings.iter().map(|w| w.to_string()).collect(),
        },
        run: RunSection {
            status: outcome.state.status.as_str(),
            records: outcome.state.records.len(),
            elapsed_s: outcome.state.elapsed_s,
            flash_used_bytes: outcome.state.flash_used,
            battery_used_s: outcome.state.battery_used_s,
            led_lit: outcome.state.led_lit,
        },
    };
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::data(format!("report serialization: {e}")))?;
    std::fs::write(&report_path, json + "\n")?;

    let settings = EffectiveSettings {
        schedule: schedule_name.as_deref(),
        window_s: args.window_s,
        period_s: args.period_s,
        total_s: args.total_s,
        log_mode: program.mode.as_str(),
        preset: &preset_name,
        speed_bls: speed,
        seed,
        fs,
    };
    RunManifest::new("simulate", &settings, Some(seed), &[], &[&bin_path, &report_path])
        .write(&manifest_path)?;

    println!(
        "{}: {} after {} s, {} records ({} bytes), {}",
        preset_label.unwrap_or("custom schedule"),
        outcome.state.status.as_str(),
        outcome.state.elapsed_s,
        outcome.state.records.len(),
        bytes.len(),
        report_path.display()
    );
    Ok(())
}
