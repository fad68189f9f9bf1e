//! Two-component PLS-DA for aerobic/anaerobic discrimination.
//!
//! Features (respiration, activity — any column count works) are
//! standardized to zero mean and unit sample variance; the response is a
//! centered one-hot pair of columns. Components come from NIPALS with both
//! X- and Y-deflation, exactly two of them. Model quality is reported as
//! R2Y (explained Y-variance on the training set) and Q2 (1 - PRESS/TSS
//! with PRESS from leave-one-out refits of the whole pipeline,
//! standardization included). Classification thresholds the predicted
//! response at 0.5 — with a centered one-hot response the two predicted
//! columns sum to one, so this is the same as picking the larger one.
//!
//! The implementation is checked against an independent reference to
//! ~1e-12 on a frozen fixture, and the leave-one-out Q2 is the brute-force
//! definition itself, so there is no faster-but-approximate path to drift
//! from it.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Condition classes, in response-column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassLabel {
    Aerobic,
    Anaerobic,
}

impl ClassLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::Aerobic => "aerobic",
            ClassLabel::Anaerobic => "anaerobic",
        }
    }

    /// Response column this class marks.
    fn column(self) -> usize {
        match self {
            ClassLabel::Aerobic => 0,
            ClassLabel::Anaerobic => 1,
        }
    }
}

impl core::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for ClassLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "aerobic" => Ok(ClassLabel::Aerobic),
            "anaerobic" => Ok(ClassLabel::Anaerobic),
            other => {
                Err(format!("unknown class {other:?} (expected 'aerobic' or 'anaerobic')"))
            }
        }
    }
}

/// Fewest samples each class must contribute.
pub const MIN_SAMPLES_PER_CLASS: usize = 6;

/// Components fitted, always two.
pub const N_COMPONENTS: usize = 2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlsError {
    #[error("feature column {column} is constant; cannot standardize")]
    SingularFeatures { column: usize },
    #[error(
        "class counts aerobic={aerobic}, anaerobic={anaerobic}; need at least \
         {MIN_SAMPLES_PER_CLASS} each"
    )]
    ClassImbalanceBelowMinimum { aerobic: usize, anaerobic: usize },
    #[error("row {row} has {got} features, expected {expected}")]
    InconsistentRows { row: usize, expected: usize, got: usize },
    #[error("invalid features: {0}")]
    InvalidFeatures(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlsWarning {
    /// Two feature columns are perfectly correlated; the fit is stable but
    /// their weights share one direction.
    CollinearFeatures { first: usize, second: usize },
    /// A component found no residual variance to model (its score vector is
    /// zero); effectively a one-component model.
    DegenerateComponent { component: usize },
}

impl core::fmt::Display for PlsWarning {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PlsWarning::CollinearFeatures { first, second } => write!(
                f,
                "feature columns {first} and {second} are perfectly correlated; \
                 the model is stable but they carry one direction"
            ),
            PlsWarning::DegenerateComponent { component } => write!(
                f,
                "component {component} found no residual variance; \
                 effectively a {}-component model",
                component - 1
            ),
        }
    }
}

/// Fitted 2-component PLS-DA model.
#[derive(Debug, Clone, PartialEq)]
pub struct PlsModel {
    /// Per-feature training means.
    pub x_means: Vec<f64>,
    /// Per-feature training sample standard deviations (n-1 divisor).
    pub x_stds: Vec<f64>,
    /// Response-column means (class frequencies).
    pub y_means: [f64; 2],
    /// NIPALS weight columns, one Vec per component (length p).
    pub weights: [Vec<f64>; 2],
    /// X-loading columns, one Vec per component (length p).
    pub loadings: [Vec<f64>; 2],
    /// Y-loading vectors per component.
    pub y_loadings: [[f64; 2]; 2],
    /// Rotation W (P'W)^-1 mapping standardized features to scores.
    pub rotation: [Vec<f64>; 2],
    /// Regression coefficients per feature: row j holds the two response
    /// coefficients of feature j (standardized X to centered Y).
    pub coefficients: Vec<[f64; 2]>,
    /// Training score columns t1, t2 (length n), for plots and diagnostics.
    pub scores: [Vec<f64>; 2],
    /// Training labels in row order (for score plots).
    pub labels: Vec<ClassLabel>,
    /// Explained Y-variance on the training set.
    pub r2y: f64,
    /// Leave-one-out predicted Y-variance, 1 - PRESS/TSS.
    pub q2: f64,
    /// Classes in response-column order.
    pub class_labels: (ClassLabel, ClassLabel),
    pub warnings: Vec<PlsWarning>,
}

/// Classification of one feature vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classified {
    pub label: ClassLabel,
    /// First-component score of the standardized input; the axis the
    /// classes separate along, useful for plotting.
    pub score_t1: f64,
    /// Predicted response per class column (they sum to 1).
    pub predicted: [f64; 2],
}

/// Intermediate fit on already-validated data.
struct CoreFit {
    x_means: Vec<f64>,
    x_stds: Vec<f64>,
    y_means: [f64; 2],
    weights: [Vec<f64>; 2],
    loadings: [Vec<f64>; 2],
    y_loadings: [[f64; 2]; 2],
    rotation: [Vec<f64>; 2],
    coefficients: Vec<[f64; 2]>,
    scores: [Vec<f64>; 2],
    degenerate: Vec<usize>,
}

fn one_hot(labels: &[ClassLabel]) -> Vec<[f64; 2]> {
    labels
        .iter()
        .map(|l| {
            let mut row = [0.0; 2];
            row[l.column()] = 1.0;
            row
        })
        .collect()
}

fn column_means(x: &[Vec<f64>]) -> Vec<f64> {
    let p = x[0].len();
    let mut means = vec![0.0; p];
    for row in x {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= x.len() as f64;
    }
    means
}

/// Sample standard deviations (n-1 divisor) per column.
fn column_stds(x: &[Vec<f64>], means: &[f64]) -> Vec<f64> {
    let p = x[0].len();
    let mut ss = vec![0.0; p];
    for row in x {
        for j in 0..p {
            let c = row[j] - means[j];
            ss[j] += c * c;
        }
    }
    ss.iter().map(|s| (s / (x.len() as f64 - 1.0)).sqrt()).collect()
}

/// NIPALS on standardized X (n x p) and centered one-hot Y (n x 2), with
/// X- and Y-deflation, two components.
fn nipals(x_std: &[Vec<f64>], y_centered: &[[f64; 2]]) -> CoreFit {
    let n = x_std.len();
    let p = x_std[0].len();
    let mut xd: Vec<Vec<f64>> = x_std.to_vec();
    let mut yd: Vec<[f64; 2]> = y_centered.to_vec();

    let mut weights: [Vec<f64>; 2] = [vec![0.0; p], vec![0.0; p]];
    let mut loadings: [Vec<f64>; 2] = [vec![0.0; p], vec![0.0; p]];
    let mut y_loadings = [[0.0; 2]; 2];
    let mut scores: [Vec<f64>; 2] = [vec![0.0; n], vec![0.0; n]];
    let mut degenerate = Vec::new();

    for comp in 0..N_COMPONENTS {
        // start from the higher-variance response column (ties pick the first)
        let var = |col: usize| {
            let m: f64 = yd.iter().map(|r| r[col]).sum::<f64>() / n as f64;
            yd.iter().map(|r| (r[col] - m) * (r[col] - m)).sum::<f64>()
        };
        let start_col = if var(1) > var(0) { 1 } else { 0 };
        let mut u: Vec<f64> = yd.iter().map(|r| r[start_col]).collect();

        let mut w = vec![0.0; p];
        for _ in 0..500 {
            // w = Xd' u, normalized
            let mut w_new = vec![0.0; p];
            for (row, &ui) in xd.iter().zip(&u) {
                for j in 0..p {
                    w_new[j] += row[j] * ui;
                }
            }
            let norm = w_new.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-300 {
                w = vec![0.0; p];
                break;
            }
            for v in &mut w_new {
                *v /= norm;
            }
            let t: Vec<f64> = xd.iter().map(|row| dot(row, &w_new)).collect();
            let tt: f64 = t.iter().map(|v| v * v).sum();
            let mut c = [0.0; 2];
            for (row, &ti) in yd.iter().zip(&t) {
                c[0] += row[0] * ti;
                c[1] += row[1] * ti;
            }
            c[0] /= tt;
            c[1] /= tt;
            let cc = c[0] * c[0] + c[1] * c[1];
            let u_new: Vec<f64> = yd.iter().map(|r| (r[0] * c[0] + r[1] * c[1]) / cc).collect();

            let delta = w_new.iter().zip(&w).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            w = w_new;
            if delta < 1e-12 {
                break;
            }
            u = u_new;
        }

        let t: Vec<f64> = xd.iter().map(|row| dot(row, &w)).collect();
        let tt: f64 = t.iter().map(|v| v * v).sum();
        let mut p_load = vec![0.0; p];
        let mut c = [0.0; 2];
        if tt < 1e-300 {
            degenerate.push(comp + 1);
        } else {
            for (row, &ti) in xd.iter().zip(&t) {
                for j in 0..p {
                    p_load[j] += row[j] * ti;
                }
            }
            for v in &mut p_load {
                *v /= tt;
            }
            for (row, &ti) in yd.iter().zip(&t) {
                c[0] += row[0] * ti;
                c[1] += row[1] * ti;
            }
            c[0] /= tt;
            c[1] /= tt;
        }
        for ((row, yrow), &ti) in xd.iter_mut().zip(yd.iter_mut()).zip(&t) {
            for j in 0..p {
                row[j] -= ti * p_load[j];
            }
            yrow[0] -= ti * c[0];
            yrow[1] -= ti * c[1];
        }
        weights[comp] = w;
        loadings[comp] = p_load;
        y_loadings[comp] = c;
        scores[comp] = t;
    }

    // rotation W* = W (P'W)^-1 via the 2x2 inverse, coefficients B = W* C'
    let ptw = [
        [dot(&loadings[0], &weights[0]), dot(&loadings[0], &weights[1])],
        [dot(&loadings[1], &weights[0]), dot(&loadings[1], &weights[1])],
    ];
    let det = ptw[0][0] * ptw[1][1] - ptw[0][1] * ptw[1][0];
    let inv = if det.abs() < 1e-300 {
        // degenerate second component: P'W is effectively [[1,*],[0,0]];
        // fall back to the one-component rotation
        [[1.0, 0.0], [0.0, 0.0]]
    } else {
        [
            [ptw[1][1] / det, -ptw[0][1] / det],
            [-ptw[1][0] / det, ptw[0][0] / det],
        ]
    };
    let rotation: [Vec<f64>; 2] = [
        (0..p).map(|j| weights[0][j] * inv[0][0] + weights[1][j] * inv[1][0]).collect(),
        (0..p).map(|j| weights[0][j] * inv[0][1] + weights[1][j] * inv[1][1]).collect(),
    ];
    let coefficients: Vec<[f64; 2]> = (0..p)
        .map(|j| {
            [
                rotation[0][j] * y_loadings[0][0] + rotation[1][j] * y_loadings[1][0],
                rotation[0][j] * y_loadings[0][1] + rotation[1][j] * y_loadings[1][1],
            ]
        })
        .collect();

    CoreFit {
        x_means: Vec::new(),
        x_stds: Vec::new(),
        y_means: [0.0; 2],
        weights,
        loadings,
        y_loadings,
        rotation,
        coefficients,
        scores,
        degenerate,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Standardize + NIPALS, without the public-API class-count gate (the
/// leave-one-out folds legitimately drop below it).
fn fit_core(x: &[Vec<f64>], labels: &[ClassLabel]) -> Result<CoreFit, PlsError> {
    let x_means = column_means(x);
    let x_stds = column_stds(x, &x_means);
    if let Some(column) = x_stds.iter().position(|&s| !(s > 0.0)) {
        return Err(PlsError::SingularFeatures { column });
    }
    let x_std: Vec<Vec<f64>> = x
        .iter()
        .map(|row| row.iter().zip(&x_means).zip(&x_stds).map(|((v, m), s)| (v - m) / s).collect())
        .collect();
    let y = one_hot(labels);
    let n = y.len() as f64;
    let y_means = [
        y.iter().map(|r| r[0]).sum::<f64>() / n,
        y.iter().map(|r| r[1]).sum::<f64>() / n,
    ];
    let y_centered: Vec<[f64; 2]> =
        y.iter().map(|r| [r[0] - y_means[0], r[1] - y_means[1]]).collect();
    let mut fit = nipals(&x_std, &y_centered);
    fit.x_means = x_means;
    fit.x_stds = x_stds;
    fit.y_means = y_means;
    Ok(fit)
}

impl CoreFit {
    /// Predicted response columns for one raw feature vector.
    fn predict(&self, features: &[f64]) -> [f64; 2] {
        let mut out = self.y_means;
        for (j, &v) in features.iter().enumerate() {
            let z = (v - self.x_means[j]) / self.x_stds[j];
            out[0] += z * self.coefficients[j][0];
            out[1] += z * self.coefficients[j][1];
        }
        out
    }

}

fn validate_features(x: &[Vec<f64>]) -> Result<usize, PlsError> {
    let Some(first) = x.first() else {
        return Err(PlsError::InvalidFeatures("no samples".into()));
    };
    let p = first.len();
    if p == 0 {
        return Err(PlsError::InvalidFeatures("rows have no features".into()));
    }
    for (i, row) in x.iter().enumerate() {
        if row.len() != p {
            return Err(PlsError::InconsistentRows { row: i, expected: p, got: row.len() });
        }
        if let Some(v) = row.iter().find(|v| !v.is_finite()) {
            return Err(PlsError::InvalidFeatures(format!("row {i} holds {v}")));
        }
    }
    Ok(p)
}

/// Sum of squares of Y about its column means.
fn y_total_ss(labels: &[ClassLabel]) -> f64 {
    let y = one_hot(labels);
    let n = y.len() as f64;
    let my = [
        y.iter().map(|r| r[0]).sum::<f64>() / n,
        y.iter().map(|r| r[1]).sum::<f64>() / n,
    ];
    y.iter()
        .map(|r| (r[0] - my[0]) * (r[0] - my[0]) + (r[1] - my[1]) * (r[1] - my[1]))
        .sum()
}

/// Fits the 2-component PLS-DA model and scores it with training R2Y and
/// leave-one-out Q2. Needs at least [`MIN_SAMPLES_PER_CLASS`] samples of
/// each class and non-constant feature columns.
pub fn pls_da_fit(x: &[Vec<f64>], labels: &[ClassLabel]) -> Result<PlsModel, PlsError> {
    let p = validate_features(x)?;
    if x.len() != labels.len() {
        return Err(PlsError::InvalidFeatures(format!(
            "{} rows vs {} labels",
            x.len(),
            labels.len()
        )));
    }
    let aerobic = labels.iter().filter(|l| **l == ClassLabel::Aerobic).count();
    let anaerobic = labels.len() - aerobic;
    if aerobic < MIN_SAMPLES_PER_CLASS || anaerobic < MIN_SAMPLES_PER_CLASS {
        return Err(PlsError::ClassImbalanceBelowMinimum { aerobic, anaerobic });
    }

    let fit = fit_core(x, labels)?;
    let mut warnings = Vec::new();

    // perfectly correlated standardized columns fit stably but redundantly
    for i in 0..p {
        for j in (i + 1)..p {
            let mut sxy = 0.0;
            for row in x {
                sxy += (row[i] - fit.x_means[i]) / fit.x_stds[i]
                    * ((row[j] - fit.x_means[j]) / fit.x_stds[j]);
            }
            let corr = sxy / (x.len() as f64 - 1.0);
            if (corr.abs() - 1.0).abs() < 1e-12 {
                warnings.push(PlsWarning::CollinearFeatures { first: i, second: j });
            }
        }
    }
    for &component in &fit.degenerate {
        warnings.push(PlsWarning::DegenerateComponent { component });
    }

    // training R2Y
    let y = one_hot(labels);
    let mut rss = 0.0;
    for (row, yrow) in x.iter().zip(&y) {
        let pred = fit.predict(row);
        rss += (yrow[0] - pred[0]) * (yrow[0] - pred[0])
            + (yrow[1] - pred[1]) * (yrow[1] - pred[1]);
    }
    let tss = y_total_ss(labels);
    let r2y = 1.0 - rss / tss;

    // leave-one-out Q2: brute-force refits, standardization recomputed per fold
    let mut press = 0.0;
    for i in 0..x.len() {
        let fold_x: Vec<Vec<f64>> = x
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, row)| row.clone())
            .collect();
        let fold_labels: Vec<ClassLabel> = labels
            .iter()
            .enumerate()
            .filter_map(|(k, &l)| (k != i).then_some(l))
            .collect();
        let fold = fit_core(&fold_x, &fold_labels)?;
        let pred = fold.predict(&x[i]);
        press += (y[i][0] - pred[0]) * (y[i][0] - pred[0])
            + (y[i][1] - pred[1]) * (y[i][1] - pred[1]);
    }
    let q2 = 1.0 - press / tss;

    Ok(PlsModel {
        x_means: fit.x_means,
        x_stds: fit.x_stds,
        y_means: fit.y_means,
        weights: fit.weights,
        loadings: fit.loadings,
        y_loadings: fit.y_loadings,
        rotation: fit.rotation,
        coefficients: fit.coefficients,
        scores: fit.scores,
        labels: labels.to_vec(),
        r2y,
        q2,
        class_labels: (ClassLabel::Aerobic, ClassLabel::Anaerobic),
        warnings,
    })
}

impl PlsModel {
    /// Number of features the model was fitted on.
    pub fn n_features(&self) -> usize {
        self.x_means.len()
    }

    /// Predicted response columns for one feature vector.
    pub fn predict(&self, features: &[f64]) -> Result<[f64; 2], PlsError> {
        if features.len() != self.n_features() {
            return Err(PlsError::InconsistentRows {
                row: 0,
                expected: self.n_features(),
                got: features.len(),
            });
        }
        if let Some(v) = features.iter().find(|v| !v.is_finite()) {
            return Err(PlsError::InvalidFeatures(format!("input holds {v}")));
        }
        let mut out = self.y_means;
        for (j, &v) in features.iter().enumerate() {
            let z = (v - self.x_means[j]) / self.x_stds[j];
            out[0] += z * self.coefficients[j][0];
            out[1] += z * self.coefficients[j][1];
        }
        Ok(out)
    }

    /// Classifies one feature vector: larger predicted response column wins
    /// (equivalent to the 0.5 threshold — the columns sum to 1).
    pub fn classify(&self, features: &[f64]) -> Result<Classified, PlsError> {
        let predicted = self.predict(features)?;
        let label = if predicted[0] >= predicted[1] {
            self.class_labels.0
        } else {
            self.class_labels.1
        };
        let score_t1 = features
            .iter()
            .enumerate()
            .map(|(j, &v)| (v - self.x_means[j]) / self.x_stds[j] * self.rotation[0][j])
            .sum();
        Ok(Classified { label, score_t1, predicted })
    }

    /// Fraction of rows classified into their own label.
    pub fn training_accuracy(&self, x: &[Vec<f64>], labels: &[ClassLabel]) -> Result<f64, PlsError> {
        let mut hits = 0usize;
        for (row, &label) in x.iter().zip(labels) {
            if self.classify(row)?.label == label {
                hits += 1;
            }
        }
        Ok(hits as f64 / labels.len() as f64)
    }
}

/// Q2 of label-shuffled refits: a sound model's class structure should not
/// survive shuffling, so these hover at or below zero. Deterministic in the
/// seed; shuffles preserve the class counts.
pub fn permutation_q2(
    x: &[Vec<f64>],
    labels: &[ClassLabel],
    shuffles: usize,
    seed: u64,
) -> Result<Vec<f64>, PlsError> {
    validate_features(x)?;
    let tss = y_total_ss(labels);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled: Vec<ClassLabel> = labels.to_vec();
    let mut out = Vec::with_capacity(shuffles);
    for _ in 0..shuffles {
        shuffled.shuffle(&mut rng);
        let y = one_hot(&shuffled);
        let mut press = 0.0;
        for i in 0..x.len() {
            let fold_x: Vec<Vec<f64>> = x
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, row)| row.clone())
                .collect();
            let fold_labels: Vec<ClassLabel> = shuffled
                .iter()
                .enumerate()
                .filter_map(|(k, &l)| (k != i).then_some(l))
                .collect();
            let fold = fit_core(&fold_x, &fold_labels)?;
            let pred = fold.predict(&x[i]);
            press += (y[i][0] - pred[0]) * (y[i][0] - pred[0])
                + (y[i][1] - pred[1]) * (y[i][1] - pred[1]);
        }
        out.push(1.0 - press / tss);
    }
    Ok(out)
}
