//! Swim-tunnel respirometry: MO2 from saturation declines and detection of
//! the metabolic maxima across a speed protocol.
//!
//! During a closed measurement phase the chamber's O2 saturation falls as
//! the fish respires. The uptake rate is the least-squares slope of the
//! dissolved-oxygen concentration (mg/L) against time, scaled by the water
//! volume the fish actually breathes from and normalized by body mass:
//!
//! ```text
//! MO2 [mg O2 / kg / h] = -slope [mg/L/h] * (V_chamber - m/rho) / m
//! ```
//!
//! with the fish displacing `m / 1.0 kg/L` of water. Concentration comes
//! from the recorded percent saturation via the solubility of O2 in
//! seawater at the step's temperature and salinity.
//!
//! Solubility is a frozen table of the Benson & Krause (1984) unit standard
//! atmospheric concentrations — the same fit behind the USGS DOTABLES
//! service — sampled every 2 degC from 0-40 degC at salinities 0, 10, 20,
//! 30, 35 and 40, interpolated bilinearly. Table error against the
//! underlying fit stays below 0.13% over the whole domain.

use crate::float::Real;

/// Temperatures of the solubility grid rows, degC.
pub const SOLUBILITY_TEMPS_C: [f64; 21] = [
    0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0, 22.0, 24.0, 26.0, 28.0, 30.0,
    32.0, 34.0, 36.0, 38.0, 40.0,
];

/// Salinities of the solubility grid columns, psu.
pub const SOLUBILITY_SALINITIES_PSU: [f64; 6] = [0.0, 10.0, 20.0, 30.0, 35.0, 40.0];

/// O2 solubility at 1 atm moist air, mg/L, rows = temperature, cols =
/// salinity (Benson & Krause 1984 fit).
pub const SOLUBILITY_MG_PER_L: [[f64; 6]; 21] = [
    [14.620834, 13.633029, 12.711962, 11.853124, 11.445716, 11.052310], // 0 C
    [13.830176, 12.912489, 12.055695, 11.255752, 10.875911, 10.508889], // 2 C
    [13.108363, 12.253828, 11.455000, 10.708248, 10.353330, 10.010176], // 4 C
    [12.448218, 11.650680, 10.904239, 10.205622, 9.873281, 9.551763],   // 6 C
    [11.843324, 11.097340, 10.398344, 9.743376, 9.431530, 9.129664],    // 8 C
    [11.287947, 10.588698, 9.932765, 9.317465, 9.024259, 8.740280],     // 10 C
    [10.776966, 10.120178, 9.503418, 8.924244, 8.648032, 8.380368],     // 12 C
    [10.305804, 9.687683, 9.106636, 8.560439, 8.299751, 8.047002],      // 14 C
    [9.870368, 9.287542, 8.739130, 8.223101, 7.976628, 7.737543],       // 16 C
    [9.467000, 8.916465, 8.397946, 7.909579, 7.676152, 7.449613],       // 18 C
    [9.092426, 8.571505, 8.080429, 7.617487, 7.396060, 7.181068],       // 20 C
    [8.743712, 8.250016, 7.784195, 7.344676, 7.134312, 6.929974],       // 22 C
    [8.418231, 7.949623, 7.507100, 7.089210, 6.889071, 6.694583],       // 24 C
    [8.113626, 7.668192, 7.247213, 6.849345, 6.658679, 6.473320],       // 26 C
    [7.827781, 7.403808, 7.002798, 6.623508, 6.441638, 6.264761],       // 28 C
    [7.558796, 7.154744, 6.772290, 6.410281, 6.236598, 6.067622],       // 30 C
    [7.304965, 6.919450, 6.554281, 6.208383, 6.042341, 5.880740],       // 32 C
    [7.064753, 6.696531, 6.347500, 6.016662, 5.857766, 5.703067],       // 34 C
    [6.836781, 6.484728, 6.150804, 5.834075, 5.681880, 5.533655],       // 36 C
    [6.619809, 6.282912, 5.963161, 5.659683, 5.513785, 5.371649],       // 38 C
    [6.412722, 6.090066, 5.783644, 5.492640, 5.352676, 5.216278],       // 40 C
];

/// Fish tissue density used to convert body mass into displaced water
/// volume, kg/L.
pub const FISH_DENSITY_KG_PER_L: f64 = 1.0;

/// Fewest saturation samples a closed phase must hold.
pub const MIN_PHASE_SAMPLES: usize = 30;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RespirometryError {
    #[error("saturation trace has {got} samples, need at least {MIN_PHASE_SAMPLES}")]
    InsufficientSamples { got: usize },
    #[error("invalid step: {0}")]
    InvalidStep(String),
    #[error("steps must ascend in speed: {0}")]
    StepsNotAscending(String),
    #[error("protocol has {got} steps, maxima detection needs at least 3")]
    TooFewSteps { got: usize },
    #[error("per-step series has {got} values for {expected} steps")]
    SeriesMismatch { expected: usize, got: usize },
    #[error("({temp_c} degC, {salinity_psu} psu) outside the solubility table (0-40 degC, 0-40 psu)")]
    OutsideSolubilityTable { temp_c: f64, salinity_psu: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RespirometryWarning {
    /// Saturation did not decline — an open flush valve or a bad seal;
    /// MO2 is reported as zero.
    NonDecreasingSaturation,
}

impl core::fmt::Display for RespirometryWarning {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RespirometryWarning::NonDecreasingSaturation => f.write_str(
                "saturation did not decline during the closed phase (bad seal?); MO2 set to 0",
            ),
        }
    }
}

/// O2 solubility in mg/L at `temp_c` degC and `salinity_psu` psu, by
/// bilinear interpolation of the frozen grid. The domain is the grid hull;
/// extrapolation is refused.
pub fn o2_solubility_mg_per_l(temp_c: f64, salinity_psu: f64) -> Result<f64, RespirometryError> {
    let (t_lo, t_hi) = (SOLUBILITY_TEMPS_C[0], *SOLUBILITY_TEMPS_C.last().unwrap());
    let (s_lo, s_hi) =
        (SOLUBILITY_SALINITIES_PSU[0], *SOLUBILITY_SALINITIES_PSU.last().unwrap());
    if !(t_lo..=t_hi).contains(&temp_c) || !(s_lo..=s_hi).contains(&salinity_psu) {
        return Err(RespirometryError::OutsideSolubilityTable { temp_c, salinity_psu });
    }
    let ti = SOLUBILITY_TEMPS_C
        .iter()
        .rposition(|&t| t <= temp_c)
        .unwrap()
        .min(SOLUBILITY_TEMPS_C.len() - 2);
    let si = SOLUBILITY_SALINITIES_PSU
        .iter()
        .rposition(|&s| s <= salinity_psu)
        .unwrap()
        .min(SOLUBILITY_SALINITIES_PSU.len() - 2);
    let ft = (temp_c - SOLUBILITY_TEMPS_C[ti])
        / (SOLUBILITY_TEMPS_C[ti + 1] - SOLUBILITY_TEMPS_C[ti]);
    let fs = (salinity_psu - SOLUBILITY_SALINITIES_PSU[si])
        / (SOLUBILITY_SALINITIES_PSU[si + 1] - SOLUBILITY_SALINITIES_PSU[si]);
    let g = &SOLUBILITY_MG_PER_L;
    Ok(g[ti][si] * (1.0 - ft) * (1.0 - fs)
        + g[ti + 1][si] * ft * (1.0 - fs)
        + g[ti][si + 1] * (1.0 - ft) * fs
        + g[ti + 1][si + 1] * ft * fs)
}

/// One closed measurement phase of a swim-tunnel protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedStep {
    /// Swim speed the step was run at, body-lengths/s.
    pub speed_bls: f64,
    /// Recorded (time s, percent saturation) samples of the closed phase.
    pub o2_saturation: Vec<(f64, f64)>,
    pub temp_c: f64,
    pub salinity_psu: f64,
    pub chamber_volume_l: f64,
    pub fish_mass_kg: f64,
}

impl SpeedStep {
    pub fn validate(&self) -> Result<(), RespirometryError> {
        let bad = |msg: String| Err(RespirometryError::InvalidStep(msg));
        if !(self.fish_mass_kg > 0.0) {
            return bad(format!("fish mass must be positive, got {} kg", self.fish_mass_kg));
        }
        let fish_volume_l = self.fish_mass_kg / FISH_DENSITY_KG_PER_L;
        if !(self.chamber_volume_l > fish_volume_l) {
            return bad(format!(
                "chamber ({} L) must exceed the fish's displacement ({} L)",
                self.chamber_volume_l, fish_volume_l
            ));
        }
        for (i, &(t, sat)) in self.o2_saturation.iter().enumerate() {
            if !t.is_finite() || !sat.is_finite() {
                return bad(format!("sample {i} is not finite: ({t}, {sat})"));
            }
            if !(0.0..=100.0).contains(&sat) {
                return bad(format!("sample {i}: saturation {sat}% outside [0, 100]"));
            }
            if i > 0 && t <= self.o2_saturation[i - 1].0 {
                return bad(format!("sample {i}: time {t} s does not increase"));
            }
        }
        Ok(())
    }

    /// Water volume available to the fish: chamber minus displacement, L.
    pub fn free_volume_l(&self) -> f64 {
        self.chamber_volume_l - self.fish_mass_kg / FISH_DENSITY_KG_PER_L
    }
}

/// MO2 estimate for one step.
#[derive(Debug, Clone, PartialEq)]
pub struct Mo2Estimate {
    /// Oxygen uptake, mg O2 per kg per hour. Zero when saturation did not
    /// decline (see `warnings`).
    pub mo2_mg_per_kg_h: f64,
    /// Fitted concentration slope, mg/L per hour.
    pub slope_mg_per_l_h: f64,
    /// Coefficient of determination of the linear fit. A constant trace
    /// fits its mean perfectly and scores 1.
    pub fit_r2: f64,
    pub warnings: Vec<RespirometryWarning>,
}

/// Least-squares line through (x, y); returns (slope, intercept, r2).
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    (slope, intercept, r2)
}

/// Oxygen uptake from one closed phase: regresses dissolved O2 (mg/L,
/// from saturation and the solubility table) on time in hours and scales
/// the decline by free volume over fish mass. A non-declining trace is a
/// chamber-seal problem, reported as a warning with MO2 = 0.
pub fn mo2_from_step(step: &SpeedStep) -> Result<Mo2Estimate, RespirometryError> {
    step.validate()?;
    if step.o2_saturation.len() < MIN_PHASE_SAMPLES {
        return Err(RespirometryError::InsufficientSamples { got: step.o2_saturation.len() });
    }
    let solubility = o2_solubility_mg_per_l(step.temp_c, step.salinity_psu)?;
    let hours: Vec<f64> = step.o2_saturation.iter().map(|&(t, _)| t / 3600.0).collect();
    let conc: Vec<f64> =
        step.o2_saturation.iter().map(|&(_, sat)| sat / 100.0 * solubility).collect();
    let (slope, _intercept, r2) = linear_fit(&hours, &conc);

    let mut warnings = Vec::new();
    let mo2 = if slope < 0.0 {
        -slope * step.free_volume_l() / step.fish_mass_kg
    } else {
        warnings.push(RespirometryWarning::NonDecreasingSaturation);
        0.0
    };
    Ok(Mo2Estimate { mo2_mg_per_kg_h: mo2, slope_mg_per_l_h: slope, fit_r2: r2, warnings })
}

/// A full speed protocol with its per-step MO2 estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct RespirometryRun {
    steps: Vec<SpeedStep>,
    estimates: Vec<Mo2Estimate>,
}

impl RespirometryRun {
    /// Estimates MO2 for every step. Steps must strictly ascend in speed.
    pub fn from_steps(steps: Vec<SpeedStep>) -> Result<Self, RespirometryError> {
        for pair in steps.windows(2) {
            if pair[1].speed_bls <= pair[0].speed_bls {
                return Err(RespirometryError::StepsNotAscending(format!(
                    "{} BL/s follows {} BL/s",
                    pair[1].speed_bls, pair[0].speed_bls
                )));
            }
        }
        let estimates =
            steps.iter().map(mo2_from_step).collect::<Result<Vec<_>, _>>()?;
        Ok(Self { steps, estimates })
    }

    pub fn steps(&self) -> &[SpeedStep] {
        &self.steps
    }

    pub fn estimates(&self) -> &[Mo2Estimate] {
        &self.estimates
    }

    pub fn speeds(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.speed_bls).collect()
    }

    pub fn mo2(&self) -> Vec<f64> {
        self.estimates.iter().map(|e| e.mo2_mg_per_kg_h).collect()
    }

    pub fn fit_r2(&self) -> Vec<f64> {
        self.estimates.iter().map(|e| e.fit_r2).collect()
    }
}

/// Speeds (and values) at which MO2, respiration and activity peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetabolicMaxima {
    /// Maximum metabolic rate: speed and value of the MO2 peak.
    pub mmr_speed_bls: f64,
    pub mmr_mg_per_kg_h: f64,
    /// Maximum respiratory frequency: speed and value of the breathing peak.
    pub mrf_speed_bls: f64,
    pub mrf_hz: f64,
    /// Speed and value of the activity-index peak.
    pub max_activity_speed_bls: f64,
    pub max_activity_g: f64,
}

/// First index of the maximum — ties resolve toward the lower speed, a
/// conservative estimate. Invariant under monotone increasing transforms.
fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Locates MMR (MO2 peak), MRF (respiration peak) and the activity peak
/// over an ascending-speed protocol. The per-step series must be aligned
/// with the run's steps.
pub fn detect_mmr_mrf(
    run: &RespirometryRun,
    resp_freq_per_step: &[f64],
    activity_per_step: &[f64],
) -> Result<MetabolicMaxima, RespirometryError> {
    let n = run.steps.len();
    if n < 3 {
        return Err(RespirometryError::TooFewSteps { got: n });
    }
    for series in [resp_freq_per_step, activity_per_step] {
        if series.len() != n {
            return Err(RespirometryError::SeriesMismatch { expected: n, got: series.len() });
        }
    }
    let speeds = run.speeds();
    let mo2 = run.mo2();
    let i_mo2 = argmax_first(&mo2);
    let i_resp = argmax_first(resp_freq_per_step);
    let i_act = argmax_first(activity_per_step);
    Ok(MetabolicMaxima {
        mmr_speed_bls: speeds[i_mo2],
        mmr_mg_per_kg_h: mo2[i_mo2],
        mrf_speed_bls: speeds[i_resp],
        mrf_hz: resp_freq_per_step[i_resp],
        max_activity_speed_bls: speeds[i_act],
        max_activity_g: activity_per_step[i_act],
    })
}

/// Builds a saturation trace that an ideal fish consuming `mo2` mg/kg/h
/// would produce: linear decline from `start_sat` for `seconds` at 1 Hz.
/// The inverse of [`mo2_from_step`]'s arithmetic; mainly for tests and the
/// synthetic protocol generator.
pub fn saturation_trace_for_mo2(
    mo2_mg_per_kg_h: f64,
    start_sat_pct: f64,
    seconds: usize,
    temp_c: f64,
    salinity_psu: f64,
    chamber_volume_l: f64,
    fish_mass_kg: f64,
) -> Result<Vec<(f64, f64)>, RespirometryError> {
    let solubility = o2_solubility_mg_per_l(temp_c, salinity_psu)?;
    let free_volume = chamber_volume_l - fish_mass_kg / FISH_DENSITY_KG_PER_L;
    if !(free_volume > 0.0) {
        return Err(RespirometryError::InvalidStep(format!(
            "chamber ({chamber_volume_l} L) must exceed the fish's displacement"
        )));
    }
    let slope_mg_l_h = -mo2_mg_per_kg_h * fish_mass_kg / free_volume;
    let slope_sat_s = slope_mg_l_h / solubility * 100.0 / 3600.0;
    Ok((0..=seconds).map(|i| (i as f64, start_sat_pct + slope_sat_s * i as f64)).collect())
}

/// Convenience used by tests and the synthetic protocol: the generic-float
/// estimator outputs convert through here.
pub fn to_f64_series<F: Real>(values: &[F]) -> Vec<f64> {
    values.iter().map(|v| v.as_f64()).collect()
}
