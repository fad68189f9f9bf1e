//! CSV schemas and readers/writers.
//!
//! Every file format carries its units in the column names, and the column
//! set is the schema version: changing it is a breaking change. Readers
//! verify the header before touching any data and report mismatches by
//! column name; parse failures name the file, 1-based line, and column.

use std::fmt::Write as _;
use std::path::Path;

use fishbit_core::signal::Mode;
use fishbit_core::{Series, Window};

use crate::errors::{CliError, CliResult};

pub const RAW_HEADER: [&str; 4] = ["t_s", "ax_g", "ay_g", "az_g"];
pub const WINDOWS_HEADER: [&str; 4] = ["window_start_s", "resp_freq_bps", "activity_g", "mode"];
pub const TRUTH_HEADER: [&str; 4] = ["t_s", "speed_bls", "breath_freq_hz", "clean_jerk_g"];
pub const SATURATION_HEADER: [&str; 2] = ["t_s", "o2_sat_pct"];

/// Maximum deviation of consecutive raw timestamps from 1/fs, seconds.
pub const SPACING_TOLERANCE_S: f64 = 1e-6;

/// Checks a header row against the expected schema, naming the offending
/// columns.
pub fn check_header(path: &Path, got: &csv::StringRecord, want: &[&str]) -> CliResult<()> {
    let got_cols: Vec<&str> = got.iter().map(str::trim).collect();
    if got_cols == want {
        return Ok(());
    }
    for col in want {
        if !got_cols.contains(col) {
            return Err(CliError::data(format!(
                "{}: schema mismatch: missing column '{col}' (expected header {})",
                path.display(),
                want.join(",")
            )));
        }
    }
    for col in &got_cols {
        if !want.contains(col) {
            return Err(CliError::data(format!(
                "{}: schema mismatch: unexpected column '{col}' (expected header {})",
                path.display(),
                want.join(",")
            )));
        }
    }
    Err(CliError::data(format!(
        "{}: schema mismatch: columns ordered '{}', expected '{}'",
        path.display(),
        got_cols.join(","),
        want.join(",")
    )))
}

fn open_reader(path: &Path) -> CliResult<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))
}

fn parse_field(path: &Path, line: u64, column: &str, raw: &str) -> CliResult<f64> {
    raw.parse::<f64>().map_err(|_| {
        CliError::data(format!(
            "{}:{line}: column '{column}': invalid number {raw:?}",
            path.display()
        ))
    })
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

/// Reads a raw accelerometer CSV into a sample series.
///
/// The sampling rate is taken from `fs_hint` when given, otherwise inferred
/// from the first two timestamps; either way every consecutive spacing must
/// match 1/fs within [`SPACING_TOLERANCE_S`].
pub fn read_raw_csv(path: &Path, fs_hint: Option<f64>) -> CliResult<Series> {
    let mut reader = open_reader(path)?;
    let header = reader
        .headers()
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?
        .clone();
    check_header(path, &header, &RAW_HEADER)?;

    let mut t = Vec::new();
    let (mut x, mut y, mut z) = (Vec::new(), Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        let line = record_line(&record);
        if record.len() != RAW_HEADER.len() {
            return Err(CliError::data(format!(
                "{}:{line}: expected {} fields, found {}",
                path.display(),
                RAW_HEADER.len(),
                record.len()
            )));
        }
        t.push(parse_field(path, line, "t_s", &record[0])?);
        x.push(parse_field(path, line, "ax_g", &record[1])?);
        y.push(parse_field(path, line, "ay_g", &record[2])?);
        z.push(parse_field(path, line, "az_g", &record[3])?);
    }

    if t.len() < 2 {
        let fs = fs_hint.ok_or_else(|| {
            CliError::data(format!(
                "{}: too few rows to infer the sampling rate; pass --fs",
                path.display()
            ))
        })?;
        return Series::from_channels(&x, &y, &z, fs)
            .map_err(|e| CliError::data(format!("{}: {e}", path.display())));
    }

    let fs = match fs_hint {
        Some(fs) => fs,
        None => {
            let dt = t[1] - t[0];
            if !(dt > 0.0) {
                return Err(CliError::data(format!(
                    "{}:3: timestamps must be strictly increasing",
                    path.display()
                )));
            }
            (1.0 / dt).round()
        }
    };
    if !(fs > 0.0) {
        return Err(CliError::data(format!("{}: sampling rate {fs} is not positive", path.display())));
    }
    let dt_expected = 1.0 / fs;
    for i in 1..t.len() {
        let dt = t[i] - t[i - 1];
        if (dt - dt_expected).abs() > SPACING_TOLERANCE_S {
            return Err(CliError::data(format!(
                "{}:{}: timestamp spacing {dt:.7} s departs from 1/{fs} Hz = {dt_expected:.7} s \
                 by more than {SPACING_TOLERANCE_S} s",
                path.display(),
                i + 2
            )));
        }
    }
    Series::from_channels(&x, &y, &z, fs)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

/// Serializes a raw series; the inverse of [`read_raw_csv`].
pub fn raw_csv_text(series: &Series) -> String {
    let fs = series.fs();
    let mut out = String::with_capacity(series.len() * 40 + 32);
    out.push_str(&RAW_HEADER.join(","));
    out.push('\n');
    for (i, s) in series.samples().iter().enumerate() {
        let t = i as f64 / fs;
        let _ = writeln!(out, "{t:.6},{:.6},{:.6},{:.6}", s.ax, s.ay, s.az);
    }
    out
}

/// Serializes per-tick generator ground truth.
pub fn truth_csv_text(truth: &fishbit_core::synth::GroundTruth<f64>) -> String {
    let mut out = String::with_capacity(truth.breath_hz.len() * 32 + 48);
    out.push_str(&TRUTH_HEADER.join(","));
    out.push('\n');
    for (k, (breath, jerk)) in truth.breath_hz.iter().zip(&truth.clean_jerk_g).enumerate() {
        let t = k as f64 * truth.tick_seconds;
        let _ = writeln!(out, "{t:.1},{:.3},{breath:.6},{jerk:.6}", truth.speed_bls);
    }
    out
}

/// One row of a windows CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowRow {
    pub window_start_s: f64,
    pub resp_freq_bps: f64,
    pub activity_g: f64,
    pub mode: String,
}

pub fn windows_csv_text(windows: &[Window]) -> String {
    let mut out = String::with_capacity(windows.len() * 40 + 48);
    out.push_str(&WINDOWS_HEADER.join(","));
    out.push('\n');
    for w in windows {
        let _ = writeln!(
            out,
            "{:.2},{:.6},{:.6},{}",
            w.window_start,
            w.resp_freq,
            w.activity,
            mode_name(w.mode)
        );
    }
    out
}

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Exact => "exact",
        Mode::Onboard => "onboard",
    }
}

pub fn read_windows_csv(path: &Path) -> CliResult<Vec<WindowRow>> {
    let mut reader = open_reader(path)?;
    let header = reader
        .headers()
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?
        .clone();
    check_header(path, &header, &WINDOWS_HEADER)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        let line = record_line(&record);
        if record.len() != WINDOWS_HEADER.len() {
            return Err(CliError::data(format!(
                "{}:{line}: expected {} fields, found {}",
                path.display(),
                WINDOWS_HEADER.len(),
                record.len()
            )));
        }
        rows.push(WindowRow {
            window_start_s: parse_field(path, line, "window_start_s", &record[0])?,
            resp_freq_bps: parse_field(path, line, "resp_freq_bps", &record[1])?,
            activity_g: parse_field(path, line, "activity_g", &record[2])?,
            mode: record[3].to_string(),
        });
    }
    Ok(rows)
}

/// Reads a respirometry saturation trace: (t_s, o2_sat_pct) rows.
pub fn read_saturation_csv(path: &Path) -> CliResult<Vec<(f64, f64)>> {
    let mut reader = open_reader(path)?;
    let header = reader
        .headers()
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?
        .clone();
    check_header(path, &header, &SATURATION_HEADER)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        let line = record_line(&record);
        if record.len() != SATURATION_HEADER.len() {
            return Err(CliError::data(format!(
                "{}:{line}: expected 2 fields, found {}",
                path.display(),
                record.len()
            )));
        }
        rows.push((
            parse_field(path, line, "t_s", &record[0])?,
            parse_field(path, line, "o2_sat_pct", &record[1])?,
        ));
    }
    Ok(rows)
}
