//! `fishbit analyze`: respirometry + estimator-agreement + PLS-DA report
//! over a swim-protocol directory.
//!
//! The input directory holds one saturation CSV per speed step (header
//! `t_s,o2_sat_pct`) with a `<name>.meta.toml` sidecar describing the step.
//! Sidecars may point at a per-step windows CSV (for respiration/activity
//! landmarks) and may label the step's condition (`aerobic`/`anaerobic`)
//! for the PLS-DA section. The report is JSON plus plot-ready long-format
//! CSVs.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use fishbit_core::analysis::{
    agreement, detect_mmr_mrf, pls_da_fit, Agreement, ClassLabel, RespirometryRun, SpeedStep,
};

use crate::config::FileConfig;
use crate::csvio::{self, WindowRow};
use crate::errors::{CliError, CliResult};
use crate::manifest::RunManifest;

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Directory of per-step saturation CSVs with .meta.toml sidecars.
    #[arg(long, value_name = "DIR")]
    pub steps: PathBuf,
    /// Windows CSV from `process --mode exact`, row-paired with --windows-onboard.
    #[arg(long, value_name = "FILE", requires = "windows_onboard")]
    pub windows_exact: Option<PathBuf>,
    /// Windows CSV from `process --mode onboard`, row-paired with --windows-exact.
    #[arg(long, value_name = "FILE", requires = "windows_exact")]
    pub windows_onboard: Option<PathBuf>,
    /// Output directory for report.json and the plot CSVs.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

/// Sidecar metadata for one speed step.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepMeta {
    speed_bls: f64,
    temp_c: f64,
    salinity_psu: f64,
    chamber_volume_l: f64,
    fish_mass_kg: f64,
    /// Experimental condition label for PLS-DA ("aerobic"/"anaerobic").
    condition: Option<String>,
    /// Windows CSV for this step, relative to the sidecar.
    windows_csv: Option<String>,
}

#[derive(Debug, Serialize)]
struct Report {
    schema: &'static str,
    steps: Vec<StepReport>,
    maxima: Option<MaximaReport>,
    agreement: Option<AgreementReport>,
    pls_da: Option<PlsReport>,
}

#[derive(Debug, Serialize)]
struct StepReport {
    speed_bls: f64,
    mo2_mg_per_kg_h: f64,
    slope_mg_per_l_h: f64,
    fit_r2: f64,
    warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    resp_freq_bps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    activity_g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_windows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    condition: Option<String>,
}

#[derive(Debug, Serialize)]
struct MaximaReport {
    mmr_speed_bls: f64,
    mmr_mg_per_kg_h: f64,
    mrf_speed_bls: f64,
    mrf_hz: f64,
    max_activity_speed_bls: f64,
    max_activity_g: f64,
}

#[derive(Debug, Serialize)]
struct AgreementStats {
    pearson_r: f64,
    slope: f64,
    intercept: f64,
    r_squared: f64,
    n: usize,
}

impl From<Agreement> for AgreementStats {
    fn from(a: Agreement) -> Self {
        AgreementStats {
            pearson_r: a.pearson_r,
            slope: a.slope,
            intercept: a.intercept,
            r_squared: a.r_squared,
            n: a.n,
        }
    }
}

#[derive(Debug, Serialize)]
struct AgreementReport {
    resp_freq: AgreementStats,
    activity: AgreementStats,
}

#[derive(Debug, Serialize)]
struct PlsReport {
    r2y: f64,
    q2: f64,
    training_accuracy: f64,
    n_aerobic: usize,
    n_anaerobic: usize,
    warnings: Vec<String>,
    windows: Vec<ScoreRow>,
}

#[derive(Debug, Serialize)]
struct ScoreRow {
    speed_bls: f64,
    window_start_s: f64,
    t1_score: f64,
    label: String,
    predicted_label: String,
}

/// One step as loaded from disk.
struct LoadedStep {
    meta: StepMeta,
    sat_csv: PathBuf,
    meta_path: PathBuf,
    windows_path: Option<PathBuf>,
    windows: Option<Vec<WindowRow>>,
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn load_steps(dir: &Path) -> CliResult<Vec<LoadedStep>> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", dir.display())))?;
    // saturation traces are plain `<step>.csv`; skip the toolkit's own
    // outputs so a protocol dir can also hold synth/process results
    const TOOLKIT_SUFFIXES: [&str; 3] = [".windows.csv", ".raw.csv", ".truth.csv"];
    let mut csvs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|ext| ext == "csv")
                && !TOOLKIT_SUFFIXES.iter().any(|s| p.to_string_lossy().ends_with(s))
        })
        .collect();
    csvs.sort();
    if csvs.is_empty() {
        return Err(CliError::data(format!(
            "{}: no step CSVs found (expecting <step>.csv with <step>.meta.toml)",
            dir.display()
        )));
    }

    let mut steps = Vec::new();
    for sat_csv in csvs {
        let meta_path = sat_csv.with_extension("meta.toml");
        if !meta_path.exists() {
            return Err(CliError::data(format!(
                "{}: missing sidecar {}",
                sat_csv.display(),
                meta_path.display()
            )));
        }
        let meta_text = std::fs::read_to_string(&meta_path)?;
        let meta: StepMeta = toml::from_str(&meta_text)
            .map_err(|e| CliError::data(format!("{}: {e}", meta_path.display())))?;
        let windows_path = meta
            .windows_csv
            .as_ref()
            .map(|rel| meta_path.parent().unwrap_or(Path::new(".")).join(rel));
        let windows = windows_path.as_ref().map(|p| csvio::read_windows_csv(p)).transpose()?;
        if let (Some(p), Some(rows)) = (&windows_path, &windows) {
            if rows.is_empty() {
                return Err(CliError::data(format!("{}: windows file is empty", p.display())));
            }
        }
        steps.push(LoadedStep { meta, sat_csv, meta_path, windows_path, windows });
    }
    steps.sort_by(|a, b| a.meta.speed_bls.partial_cmp(&b.meta.speed_bls).expect("finite speeds"));
    Ok(steps)
}

fn agreement_section(
    exact_path: &Path,
    onboard_path: &Path,
) -> CliResult<AgreementReport> {
    let exact = csvio::read_windows_csv(exact_path)?;
    let onboard = csvio::read_windows_csv(onboard_path)?;
    if exact.len() != onboard.len() {
        return Err(CliError::data(format!(
            "{} holds {} rows but {} holds {}; the files must pair row by row",
            exact_path.display(),
            exact.len(),
            onboard_path.display(),
            onboard.len()
        )));
    }
    let resp = agreement(
        &exact.iter().map(|w| w.resp_freq_bps).collect::<Vec<_>>(),
        &onboard.iter().map(|w| w.resp_freq_bps).collect::<Vec<_>>(),
    )
    .map_err(|e| CliError::data(format!("respiration agreement: {e}")))?;
    let act = agreement(
        &exact.iter().map(|w| w.activity_g).collect::<Vec<_>>(),
        &onboard.iter().map(|w| w.activity_g).collect::<Vec<_>>(),
    )
    .map_err(|e| CliError::data(format!("activity agreement: {e}")))?;
    Ok(AgreementReport { resp_freq: resp.into(), activity: act.into() })
}

fn pls_section(steps: &[LoadedStep]) -> CliResult<Option<PlsReport>> {
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for step in steps {
        let Some(condition) = &step.meta.condition else { continue };
        let label: ClassLabel = condition
            .parse()
            .map_err(|e: String| CliError::data(format!("{}: {e}", step.meta_path.display())))?;
        let Some(windows) = &step.windows else {
            return Err(CliError::data(format!(
                "{}: condition given but no windows_csv to take features from",
                step.meta_path.display()
            )));
        };
        for w in windows {
            features.push(vec![w.resp_freq_bps, w.activity_g]);
            labels.push(label);
            rows.push((step.meta.speed_bls, w.window_start_s));
        }
    }
    if labels.is_empty() {
        return Ok(None);
    }
    let model = pls_da_fit(&features, &labels)
        .map_err(|e| CliError::data(format!("PLS-DA fit: {e}")))?;
    let accuracy = model
        .training_accuracy(&features, &labels)
        .map_err(|e| CliError::data(format!("PLS-DA scoring: {e}")))?;
    let mut score_rows = Vec::with_capacity(rows.len());
    for ((speed, start), (row, label)) in rows.iter().zip(features.iter().zip(&labels)) {
        let c = model.classify(row).map_err(|e| CliError::data(format!("PLS-DA scoring: {e}")))?;
        score_rows.push(ScoreRow {
            speed_bls: *speed,
            window_start_s: *start,
            t1_score: c.score_t1,
            label: label.as_str().to_string(),
            predicted_label: c.label.as_str().to_string(),
        });
    }
    let n_aerobic = labels.iter().filter(|l| **l == ClassLabel::Aerobic).count();
    Ok(Some(PlsReport {
        r2y: model.r2y,
        q2: model.q2,
        training_accuracy: accuracy,
        n_aerobic,
        n_anaerobic: labels.len() - n_aerobic,
        warnings: model.warnings.iter().map(|w| w.to_string()).collect(),
        windows: score_rows,
    }))
}

pub fn run(args: &AnalyzeArgs, _file_cfg: &FileConfig) -> CliResult<()> {
    let loaded = load_steps(&args.steps)?;

    // respirometry over the ascending-speed protocol
    let mut speed_steps = Vec::with_capacity(loaded.len());
    for step in &loaded {
        speed_steps.push(SpeedStep {
            speed_bls: step.meta.speed_bls,
            o2_saturation: csvio::read_saturation_csv(&step.sat_csv)?,
            temp_c: step.meta.temp_c,
            salinity_psu: step.meta.salinity_psu,
            chamber_volume_l: step.meta.chamber_volume_l,
            fish_mass_kg: step.meta.fish_mass_kg,
        });
    }
    let run = RespirometryRun::from_steps(speed_steps)
        .map_err(|e| CliError::data(format!("respirometry: {e}")))?;

    // per-step medians of the windows, for landmark detection
    let per_step_metrics: Option<Vec<(f64, f64, usize)>> = loaded
        .iter()
        .map(|s| {
            s.windows.as_ref().map(|w| {
                (
                    median(&w.iter().map(|r| r.resp_freq_bps).collect::<Vec<_>>()),
                    median(&w.iter().map(|r| r.activity_g).collect::<Vec<_>>()),
                    w.len(),
                )
            })
        })
        .collect();

    let maxima = match &per_step_metrics {
        Some(metrics) if loaded.len() >= 3 => {
            let resp: Vec<f64> = metrics.iter().map(|m| m.0).collect();
            let act: Vec<f64> = metrics.iter().map(|m| m.1).collect();
            let m = detect_mmr_mrf(&run, &resp, &act)
                .map_err(|e| CliError::data(format!("landmark detection: {e}")))?;
            Some(MaximaReport {
                mmr_speed_bls: m.mmr_speed_bls,
                mmr_mg_per_kg_h: m.mmr_mg_per_kg_h,
                mrf_speed_bls: m.mrf_speed_bls,
                mrf_hz: m.mrf_hz,
                max_activity_speed_bls: m.max_activity_speed_bls,
                max_activity_g: m.max_activity_g,
            })
        }
        _ => None,
    };

    let agreement_report = match (&args.windows_exact, &args.windows_onboard) {
        (Some(e), Some(o)) => Some(agreement_section(e, o)?),
        _ => None,
    };
    let pls = pls_section(&loaded)?;

    let steps_report: Vec<StepReport> = loaded
        .iter()
        .zip(run.estimates())
        .enumerate()
        .map(|(i, (step, est))| StepReport {
            speed_bls: step.meta.speed_bls,
            mo2_mg_per_kg_h: est.mo2_mg_per_kg_h,
            slope_mg_per_l_h: est.slope_mg_per_l_h,
            fit_r2: est.fit_r2,
            warnings: est.warnings.iter().map(|w| w.to_string()).collect(),
            resp_freq_bps: per_step_metrics.as_ref().map(|m| m[i].0),
            activity_g: per_step_metrics.as_ref().map(|m| m[i].1),
            n_windows: per_step_metrics.as_ref().map(|m| m[i].2),
            condition: step.meta.condition.clone(),
        })
        .collect();

    let report = Report {
        schema: "fishbit.analysis.v1",
        steps: steps_report,
        maxima,
        agreement: agreement_report,
        pls_da: pls,
    };

    std::fs::create_dir_all(&args.out)?;
    let report_path = args.out.join("report.json");
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::data(format!("report serialization: {e}")))?;
    std::fs::write(&report_path, json + "\n")?;

    // plot-ready CSVs
    let mut outputs: Vec<PathBuf> = vec![report_path.clone()];
    let mo2_path = args.out.join("mo2_vs_speed.csv");
    let mut mo2_csv = String::from("speed_bls,mo2_mg_per_kg_h,fit_r2\n");
    for s in &report.steps {
        mo2_csv.push_str(&format!("{:.3},{:.6},{:.6}\n", s.speed_bls, s.mo2_mg_per_kg_h, s.fit_r2));
    }
    std::fs::write(&mo2_path, mo2_csv)?;
    outputs.push(mo2_path);

    let metrics_path = args.out.join("metrics_vs_speed.csv");
    let mut metrics_csv = String::from("speed_bls,metric,value\n");
    for s in &report.steps {
        metrics_csv.push_str(&format!(
            "{:.3},mo2_mg_per_kg_h,{:.6}\n",
            s.speed_bls, s.mo2_mg_per_kg_h
        ));
        if let Some(r) = s.resp_freq_bps {
            metrics_csv.push_str(&format!("{:.3},resp_freq_bps,{r:.6}\n", s.speed_bls));
        }
        if let Some(a) = s.activity_g {
            metrics_csv.push_str(&format!("{:.3},activity_g,{a:.6}\n", s.speed_bls));
        }
    }
    std::fs::write(&metrics_path, metrics_csv)?;
    outputs.push(metrics_path);

    if let Some(pls) = &report.pls_da {
        let scores_path = args.out.join("pls_scores.csv");
        let mut scores_csv = String::from("speed_bls,window_start_s,t1_score,label,predicted_label\n");
        for w in &pls.windows {
            scores_csv.push_str(&format!(
                "{:.3},{:.2},{:.6},{},{}\n",
                w.speed_bls, w.window_start_s, w.t1_score, w.label, w.predicted_label
            ));
        }
        std::fs::write(&scores_path, scores_csv)?;
        outputs.push(scores_path);
    }

    #[derive(Serialize)]
    struct EffectiveSettings {
        steps: String,
        windows_exact: Option<String>,
        windows_onboard: Option<String>,
    }
    let settings = EffectiveSettings {
        steps: args.steps.display().to_string(),
        windows_exact: args.windows_exact.as_ref().map(|p| p.display().to_string()),
        windows_onboard: args.windows_onboard.as_ref().map(|p| p.display().to_string()),
    };
    let mut inputs: Vec<PathBuf> = Vec::new();
    for step in &loaded {
        inputs.push(step.sat_csv.clone());
        inputs.push(step.meta_path.clone());
        if let Some(p) = &step.windows_path {
            inputs.push(p.clone());
        }
    }
    inputs.extend(args.windows_exact.iter().cloned());
    inputs.extend(args.windows_onboard.iter().cloned());
    let input_refs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    let output_refs: Vec<&Path> = outputs.iter().map(PathBuf::as_path).collect();
    RunManifest::new("analyze", &settings, None, &input_refs, &output_refs)
        .write(&args.out.join("manifest.json"))?;

    println!(
        "wrote {} ({} steps{}{}{})",
        report_path.display(),
        report.steps.len(),
        report.maxima.as_ref().map_or(String::new(), |m| format!(
            ", mmr at {} BL/s, mrf at {} BL/s",
            m.mmr_speed_bls, m.mrf_speed_bls
        )),
        report.agreement.as_ref().map_or(String::new(), |a| format!(
            ", agreement r = {:.3}/{:.3}",
            a.resp_freq.pearson_r, a.activity.pearson_r
        )),
        report.pls_da.as_ref().map_or(String::new(), |p| format!(
            ", PLS-DA r2y = {:.3}, q2 = {:.3}",
            p.r2y, p.q2
        ))
    );
    Ok(())
}
