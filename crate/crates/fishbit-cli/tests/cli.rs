//! End-to-end tests of the `fishbit` binary: the documented workflows,
//! exit codes, file formats, and reproducibility guarantees.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fishbit_core::analysis::saturation_trace_for_mo2;
use fishbit_core::device::codec::{decode_log, LogMode};
use fishbit_core::signal::{process_window, AccelSeries, Mode};
use fishbit_core::synth::{generate_swimming, SpeciesPreset};
use fishbit_core::Config;
use tempfile::TempDir;

const FS: f64 = 100.0;

/// Runs the binary in `dir` with a scrubbed environment (no ambient config).
fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fishbit"))
        .current_dir(dir)
        .env_remove("FISHBIT_CONFIG")
        .args(args)
        .output()
        .expect("spawn fishbit")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "command failed (exit {:?}):\n{}",
        out.status.code(),
        stderr_of(out)
    );
}

fn assert_exit(out: &Output, code: i32) {
    assert_eq!(out.status.code(), Some(code), "stderr:\n{}", stderr_of(out));
}

/// Lines of a CSV after its header.
fn data_rows(path: &Path) -> Vec<String> {
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("read {path:?}: {e}"));
    text.lines().skip(1).map(str::to_string).collect()
}

fn header_of(path: &Path) -> String {
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("read {path:?}: {e}"));
    text.lines().next().unwrap_or_default().to_string()
}

fn read_json(path: &Path) -> serde_json::Value {
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("read {path:?}: {e}"));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("parse {path:?}: {e}"))
}

// ---------------------------------------------------------------- synth

#[test]
fn synth_writes_the_documented_row_counts_and_reruns_identically() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args =
        ["synth", "--preset", "sea_bream", "--duration-s", "1476", "--seed", "7", "--out", "run"];
    assert_ok(&run_in(a.path(), &args));
    assert_ok(&run_in(b.path(), &args));

    let raw = a.path().join("run.raw.csv");
    assert_eq!(header_of(&raw), "t_s,ax_g,ay_g,az_g");
    assert_eq!(data_rows(&raw).len(), 147_600, "1476 s at 100 Hz");
    let truth = a.path().join("run.truth.csv");
    assert_eq!(header_of(&truth), "t_s,speed_bls,breath_freq_hz,clean_jerk_g");
    assert_eq!(data_rows(&truth).len(), 1476, "one ground-truth row per second");

    // identical invocations must be byte-identical, manifests included
    for name in ["run.raw.csv", "run.truth.csv", "run.manifest.json"] {
        let first = fs::read(a.path().join(name)).unwrap();
        let second = fs::read(b.path().join(name)).unwrap();
        assert_eq!(first, second, "{name} differs between identical runs");
    }

    let manifest = read_json(&a.path().join("run.manifest.json"));
    assert_eq!(manifest["command"], "synth");
    assert_eq!(manifest["seed"], 7);
    assert!(manifest["config_hash"].as_str().unwrap().starts_with("sha256:"));
}

#[test]
fn unknown_preset_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["synth", "--preset", "sea_cucumber", "--out", "x"]);
    assert_exit(&out, 2);
    assert!(stderr_of(&out).contains("sea_cucumber"), "stderr should name the bad preset");
}

// -------------------------------------------------------------- process

#[test]
fn process_windows_both_modes_and_warns_about_the_tail() {
    let dir = TempDir::new().unwrap();
    assert_ok(&run_in(
        dir.path(),
        ["synth", "--duration-s", "1476", "--seed", "7", "--out", "run"].as_slice(),
    ));

    let exact = run_in(
        dir.path(),
        &["process", "--input", "run.raw.csv", "--mode", "exact", "--out", "exact.csv"],
    );
    assert_ok(&exact);
    // 147600 samples = 12 exact windows of 12000 + 3600 leftover
    assert!(
        stderr_of(&exact).contains("ignored incomplete tail of 3600 samples"),
        "stderr was: {}",
        stderr_of(&exact)
    );
    let exact_rows = data_rows(&dir.path().join("exact.csv"));
    assert_eq!(header_of(&dir.path().join("exact.csv")), "window_start_s,resp_freq_bps,activity_g,mode");
    assert_eq!(exact_rows.len(), 12);
    assert!(exact_rows.iter().all(|r| r.ends_with(",exact")));
    assert!(exact_rows[1].starts_with("120.00,"), "second exact window starts at 120 s");

    let onboard = run_in(
        dir.path(),
        &["process", "--input", "run.raw.csv", "--mode", "onboard", "--out", "onboard.csv"],
    );
    assert_ok(&onboard);
    // 147600 samples = 12 onboard windows of 12288 + 144 leftover
    let onboard_rows = data_rows(&dir.path().join("onboard.csv"));
    assert_eq!(onboard_rows.len(), 12);
    assert!(onboard_rows.iter().all(|r| r.ends_with(",onboard")));
    assert!(onboard_rows[1].starts_with("122.88,"), "second onboard window starts at 122.88 s");

    assert!(dir.path().join("exact.manifest.json").exists());
    assert!(dir.path().join("onboard.manifest.json").exists());
}

#[test]
fn process_recovers_a_clean_tone_exactly() {
    let dir = TempDir::new().unwrap();
    let mut csv = String::from("t_s,ax_g,ay_g,az_g\n");
    for i in 0..24_000u32 {
        let t = i as f64 / FS;
        let z = 0.3 * (std::f64::consts::TAU * 2.0 * t).sin();
        csv.push_str(&format!("{t:.6},0.000000,0.000000,{z:.6}\n"));
    }
    fs::write(dir.path().join("tone.csv"), csv).unwrap();

    let out = run_in(
        dir.path(),
        &["process", "--input", "tone.csv", "--mode", "exact", "--out", "tone.windows.csv"],
    );
    assert_ok(&out);
    let rows = data_rows(&dir.path().join("tone.windows.csv"));
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("0.00,2.000000,"), "got {}", rows[0]);
    assert!(rows[1].starts_with("120.00,2.000000,"), "got {}", rows[1]);
}

#[test]
fn processing_a_recording_shorter_than_one_window_keeps_the_header_and_warns() {
    let dir = TempDir::new().unwrap();
    assert_ok(&run_in(dir.path(), &["synth", "--duration-s", "50", "--out", "short"]));
    let out = run_in(
        dir.path(),
        &["process", "--input", "short.raw.csv", "--mode", "exact", "--out", "short.windows.csv"],
    );
    assert_ok(&out);
    assert!(stderr_of(&out).contains("shorter than one"), "stderr: {}", stderr_of(&out));
    let text = fs::read_to_string(dir.path().join("short.windows.csv")).unwrap();
    assert_eq!(text, "window_start_s,resp_freq_bps,activity_g,mode\n");
}

#[test]
fn process_rejects_uneven_sample_spacing_naming_the_line() {
    let dir = TempDir::new().unwrap();
    let csv = "t_s,ax_g,ay_g,az_g\n\
               0.000000,0.0,0.0,0.0\n\
               0.010000,0.0,0.0,0.0\n\
               0.035000,0.0,0.0,0.0\n";
    fs::write(dir.path().join("jagged.csv"), csv).unwrap();
    let out =
        run_in(dir.path(), &["process", "--input", "jagged.csv", "--mode", "exact", "--out", "w"]);
    assert_exit(&out, 1);
    let msg = stderr_of(&out);
    assert!(msg.contains("spacing"), "stderr: {msg}");
    assert!(msg.contains("jagged.csv:4"), "should name file and line, got: {msg}");
}

#[test]
fn process_names_a_missing_input_column() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("bad.csv"), "t_s,ax_g,ay_g\n0.0,0.0,0.0\n").unwrap();
    let out =
        run_in(dir.path(), &["process", "--input", "bad.csv", "--mode", "exact", "--out", "w"]);
    assert_exit(&out, 1);
    assert!(stderr_of(&out).contains("missing column 'az_g'"), "stderr: {}", stderr_of(&out));
}

#[test]
fn unknown_mode_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("x.csv"), "t_s,ax_g,ay_g,az_g\n").unwrap();
    let out =
        run_in(dir.path(), &["process", "--input", "x.csv", "--mode", "fuzzy", "--out", "w"]);
    assert_exit(&out, 2);
    assert!(stderr_of(&out).contains("fuzzy"));
}

// ------------------------------------------------------------- simulate

#[test]
fn simulate_continuous_dies_at_the_battery_and_its_log_decodes() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["simulate", "--schedule", "continuous", "--out", "cont"]);
    assert_ok(&out);
    assert!(stderr_of(&out).contains("battery"), "schedule warning expected on stderr");

    let report = read_json(&dir.path().join("cont.report.json"));
    assert_eq!(report["run"]["status"], "battery_exhausted");
    assert_eq!(report["run"]["records"], 175);
    assert_eq!(report["run"]["elapsed_s"], 21_600.0);
    assert_eq!(report["schedule"]["window_count"], 703);

    let bytes = fs::read(dir.path().join("cont.bin")).unwrap();
    let log = decode_log(&bytes).expect("download stream decodes");
    assert_eq!(log.header.mode, LogMode::Processed);
    assert_eq!(log.header.record_count, 175);
    assert_eq!(log.records.len(), 175);
    assert!(!log.truncated);
    assert!(dir.path().join("cont.manifest.json").exists());
}

#[test]
fn simulate_week_one_completes_with_one_record_per_window() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["simulate", "--schedule", "week-1", "--out", "week"]);
    assert_ok(&out);
    let report = read_json(&dir.path().join("week.report.json"));
    assert_eq!(report["run"]["status"], "done");
    assert_eq!(report["run"]["records"], 168);
    let log = decode_log(&fs::read(dir.path().join("week.bin")).unwrap()).unwrap();
    assert_eq!(log.records.len(), 168);
    assert!(!log.truncated);
}

#[test]
fn simulate_rejects_a_raw_schedule_beyond_the_capture_buffer() {
    let dir = TempDir::new().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "simulate",
            "--window-s",
            "420",
            "--period-s",
            "3600",
            "--total-s",
            "86400",
            "--log-mode",
            "raw",
            "--out",
            "raw420",
        ],
    );
    assert_exit(&out, 1);
    assert!(stderr_of(&out).contains("raw buffer"), "stderr: {}", stderr_of(&out));
}

#[test]
fn unknown_schedule_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["simulate", "--schedule", "fortnight", "--out", "x"]);
    assert_exit(&out, 2);
    assert!(stderr_of(&out).contains("fortnight"));
}

#[test]
fn schedule_preset_conflicts_with_custom_program_flags() {
    let dir = TempDir::new().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "simulate", "--schedule", "week-1", "--window-s", "60", "--period-s", "120",
            "--total-s", "600", "--out", "x",
        ],
    );
    assert_exit(&out, 2);
}

// -------------------------------------------------------------- analyze

/// Tent profile peaking at `peak_speed`: `top` at the peak, falling by
/// `slope` per BL/s away from it.
fn tent(speed: f64, peak_speed: f64, top: f64, slope: f64) -> f64 {
    top - slope * (speed - peak_speed).abs()
}

/// Builds an 11-step swim protocol (1.0..6.0 BL/s by 0.5) under `dir`:
/// a saturation trace + sidecar per step, and a 2-row windows CSV per step
/// with respiration peaking at 4.0 BL/s and activity at 5.0 BL/s.
fn write_protocol_fixture(dir: &Path) {
    for i in 0..11 {
        let speed = 1.0 + 0.5 * i as f64;
        let mo2 = tent(speed, 4.5, 240.0, 40.0);
        let trace = saturation_trace_for_mo2(mo2, 100.0, 600, 24.0, 35.0, 2.0, 0.2)
            .expect("trace fixture");
        let mut sat = String::from("t_s,o2_sat_pct\n");
        for (t, s) in &trace {
            sat.push_str(&format!("{t:.1},{s:.6}\n"));
        }
        let stem = format!("step_{i:02}");
        fs::write(dir.join(format!("{stem}.csv")), sat).unwrap();

        let resp = tent(speed, 4.0, 3.0, 0.2);
        let act = tent(speed, 5.0, 1.0, 0.14);
        let mut windows = String::from("window_start_s,resp_freq_bps,activity_g,mode\n");
        for (w, jitter) in [(0, 0.02), (1, -0.02)] {
            windows.push_str(&format!(
                "{:.2},{:.6},{:.6},exact\n",
                120.0 * w as f64,
                resp + jitter,
                act + jitter
            ));
        }
        fs::write(dir.join(format!("{stem}.windows.csv")), windows).unwrap();

        let condition = if speed < 4.0 { "aerobic" } else { "anaerobic" };
        let meta = format!(
            "speed_bls = {speed}\n\
             temp_c = 24.0\n\
             salinity_psu = 35.0\n\
             chamber_volume_l = 2.0\n\
             fish_mass_kg = 0.2\n\
             condition = \"{condition}\"\n\
             windows_csv = \"{stem}.windows.csv\"\n"
        );
        fs::write(dir.join(format!("{stem}.meta.toml")), meta).unwrap();
    }
}

/// Runs both estimators over 56 synthetic windows (two species, rest to
/// 6 BL/s) and writes the row-paired exact/onboard windows CSVs.
fn write_agreement_fixture(dir: &Path) {
    let exact_cfg = Config::exact(FS);
    let onboard_cfg = Config::onboard(FS);
    let onboard_len = onboard_cfg.window_len();
    let exact_len = exact_cfg.window_len();

    let mut exact_csv = String::from("window_start_s,resp_freq_bps,activity_g,mode\n");
    let mut onboard_csv = String::from("window_start_s,resp_freq_bps,activity_g,mode\n");
    let presets = [SpeciesPreset::<f64>::sea_bream(), SpeciesPreset::<f64>::sea_bass()];
    for (p_idx, preset) in presets.iter().enumerate() {
        for k in 0..28u64 {
            let speed = match k {
                0 => 0.0,
                1 => 0.5,
                _ => 1.0 + 0.2 * (k - 2) as f64,
            };
            let seed = 1000 + 100 * p_idx as u64 + k;
            let (series, _) =
                generate_swimming(preset, speed, onboard_len as f64 / FS, FS, seed).unwrap();
            let pc = AccelSeries::new(series.samples()[..exact_len].to_vec(), FS).unwrap();
            let we = process_window(&pc, &exact_cfg, Mode::Exact).unwrap();
            let wo = process_window(&series, &onboard_cfg, Mode::Onboard).unwrap();
            let start = (p_idx as u64 * 28 + k) as f64 * 130.0;
            exact_csv.push_str(&format!(
                "{start:.2},{:.6},{:.6},exact\n",
                we.resp_freq, we.activity
            ));
            onboard_csv.push_str(&format!(
                "{start:.2},{:.6},{:.6},onboard\n",
                wo.resp_freq, wo.activity
            ));
        }
    }
    fs::write(dir.join("exact.windows.csv"), exact_csv).unwrap();
    fs::write(dir.join("onboard.windows.csv"), onboard_csv).unwrap();
}

#[test]
fn analyze_builds_the_full_protocol_report() {
    let dir = TempDir::new().unwrap();
    let steps = dir.path().join("steps");
    fs::create_dir(&steps).unwrap();
    write_protocol_fixture(&steps);
    write_agreement_fixture(dir.path());

    let out = run_in(
        dir.path(),
        &[
            "analyze",
            "--steps",
            "steps",
            "--windows-exact",
            "exact.windows.csv",
            "--windows-onboard",
            "onboard.windows.csv",
            "--out",
            "reportdir",
        ],
    );
    assert_ok(&out);
    let report = read_json(&dir.path().join("reportdir/report.json"));

    assert_eq!(report["schema"], "fishbit.analysis.v1");
    let steps_json = report["steps"].as_array().unwrap();
    assert_eq!(steps_json.len(), 11);
    for s in steps_json {
        let speed = s["speed_bls"].as_f64().unwrap();
        let planted = tent(speed, 4.5, 240.0, 40.0);
        let got = s["mo2_mg_per_kg_h"].as_f64().unwrap();
        assert!(
            (got - planted).abs() / planted < 0.01,
            "speed {speed}: mo2 {got} vs planted {planted}"
        );
        assert!(s["fit_r2"].as_f64().unwrap() > 0.999);
        assert_eq!(s["n_windows"], 2);
    }

    // landmark speeds sit where the tents peak
    assert_eq!(report["maxima"]["mmr_speed_bls"], 4.5);
    assert_eq!(report["maxima"]["mrf_speed_bls"], 4.0);
    assert_eq!(report["maxima"]["max_activity_speed_bls"], 5.0);
    let mmr = report["maxima"]["mmr_mg_per_kg_h"].as_f64().unwrap();
    assert!((mmr - 240.0).abs() / 240.0 < 0.01, "mmr {mmr}");

    // onboard estimates track the exact ones
    let resp_r = report["agreement"]["resp_freq"]["pearson_r"].as_f64().unwrap();
    let act_r = report["agreement"]["activity"]["pearson_r"].as_f64().unwrap();
    assert!(resp_r >= 0.99, "respiration agreement r = {resp_r}");
    assert!(act_r >= 0.99, "activity agreement r = {act_r}");
    assert_eq!(report["agreement"]["resp_freq"]["n"], 56);

    // supervised separation of the labelled windows; the steps straddling
    // the aerobic/anaerobic cut have near-identical features by
    // construction (the tents are continuous), so allow one miss
    assert_eq!(report["pls_da"]["n_aerobic"], 12);
    assert_eq!(report["pls_da"]["n_anaerobic"], 10);
    let accuracy = report["pls_da"]["training_accuracy"].as_f64().unwrap();
    assert!(accuracy >= 21.0 / 22.0, "training accuracy = {accuracy}");
    let q2 = report["pls_da"]["q2"].as_f64().unwrap();
    assert!(q2 > 0.5, "q2 = {q2}");
    assert_eq!(report["pls_da"]["windows"].as_array().unwrap().len(), 22);

    // plot-ready companions
    let outdir = dir.path().join("reportdir");
    assert_eq!(data_rows(&outdir.join("mo2_vs_speed.csv")).len(), 11);
    assert_eq!(data_rows(&outdir.join("metrics_vs_speed.csv")).len(), 33);
    assert_eq!(data_rows(&outdir.join("pls_scores.csv")).len(), 22);
    assert!(outdir.join("manifest.json").exists());
}

#[test]
fn analyze_names_the_missing_windows_column() {
    let dir = TempDir::new().unwrap();
    let steps = dir.path().join("steps");
    fs::create_dir(&steps).unwrap();
    write_protocol_fixture(&steps);
    // drop activity_g from one step's windows file
    fs::write(
        steps.join("step_03.windows.csv"),
        "window_start_s,resp_freq_bps,mode\n0.00,2.5,exact\n",
    )
    .unwrap();
    let out = run_in(dir.path(), &["analyze", "--steps", "steps", "--out", "r"]);
    assert_exit(&out, 1);
    assert!(
        stderr_of(&out).contains("missing column 'activity_g'"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn analyze_requires_both_windows_files_for_agreement() {
    let dir = TempDir::new().unwrap();
    let steps = dir.path().join("steps");
    fs::create_dir(&steps).unwrap();
    write_protocol_fixture(&steps);
    fs::write(dir.path().join("exact.windows.csv"), "window_start_s,resp_freq_bps,activity_g,mode\n").unwrap();
    let out = run_in(
        dir.path(),
        &["analyze", "--steps", "steps", "--windows-exact", "exact.windows.csv", "--out", "r"],
    );
    assert_exit(&out, 2);
}

// --------------------------------------------------------------- config

#[test]
fn config_file_values_override_flags() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("rig.toml"), "mode = \"onboard\"\n").unwrap();
    assert_ok(&run_in(dir.path(), &["synth", "--duration-s", "130", "--out", "run"]));
    let out = run_in(
        dir.path(),
        &[
            "process", "--config", "rig.toml", "--input", "run.raw.csv", "--mode", "exact",
            "--out", "w.csv",
        ],
    );
    assert_ok(&out);
    assert!(stderr_of(&out).contains("using config"), "stderr: {}", stderr_of(&out));
    let rows = data_rows(&dir.path().join("w.csv"));
    assert!(!rows.is_empty());
    assert!(
        rows.iter().all(|r| r.ends_with(",onboard")),
        "config mode must override the flag; rows: {rows:?}"
    );
}

#[test]
fn environment_variable_names_the_default_config() {
    let dir = TempDir::new().unwrap();
    let cfg_path = dir.path().join("rig.toml");
    fs::write(&cfg_path, "preset = \"sea_bass\"\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_fishbit"))
        .current_dir(dir.path())
        .env("FISHBIT_CONFIG", &cfg_path)
        .args(["synth", "--preset", "sea_bream", "--duration-s", "30", "--out", "run"])
        .output()
        .expect("spawn fishbit");
    assert_ok(&out);
    // sea_bass rests near 2.0 Hz, sea_bream near 2.35 Hz: the config's
    // preset must win over the flag
    let first = data_rows(&dir.path().join("run.truth.csv"))[0].clone();
    let breath: f64 = first.split(',').nth(2).unwrap().parse().unwrap();
    assert!(breath < 2.2, "expected sea_bass resting rate from config, got {breath} Hz");
}

#[test]
fn bad_config_file_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("rig.toml"), "mod = \"onboard\"\n").unwrap();
    let out = run_in(
        dir.path(),
        &["synth", "--config", "rig.toml", "--duration-s", "30", "--out", "run"],
    );
    assert_exit(&out, 1);
}

// ---------------------------------------------------------------- misc

#[test]
fn help_lists_every_subcommand() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["--help"]);
    assert_ok(&out);
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    for sub in ["synth", "process", "simulate", "analyze"] {
        assert!(text.contains(sub), "--help should list {sub}");
    }
}
