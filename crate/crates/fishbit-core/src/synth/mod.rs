//! Seeded synthetic accelerometer signals with ground truth.
//!
//! The generator writes what the tag would see on a fish: a breathing tone
//! on z (operculum beat plus a second harmonic and sensor noise) and
//! swimming on x/y (tail-beat oscillation whose amplitude grows
//! exponentially with speed, occasional turn bursts, noise). Every run is
//! fully determined by a 64-bit seed, so estimator tests can pin expected
//! outputs.
//!
//! Physiology knobs follow what juvenile seabream/seabass show in
//! swim-tunnel work: breathing effort rises roughly linearly with speed up
//! to a fatigue knee (default 4 body-lengths/s) and falls beyond it, while
//! whole-body activity keeps climbing to a later maximum before collapsing.

mod preset_file;

pub use preset_file::{load_preset_file, save_preset_file, PresetFile};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::float::Real;
use crate::signal::{AccelSample, AccelSeries, FULL_SCALE_G};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("unknown preset {0:?} (built-ins: sea_bream, sea_bass)")]
    UnknownPreset(String),
    #[error("preset file error: {0}")]
    PresetFile(String),
}

/// Opercular (breathing) signal model for the z axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreathingModel<F> {
    /// Resting beat frequency, Hz.
    pub base_freq_hz: F,
    /// Std of the slow per-second frequency wander, Hz.
    pub freq_jitter_hz: F,
    /// Fundamental amplitude, g.
    pub amplitude_g: F,
    /// Second-harmonic amplitude as a fraction of the fundamental.
    pub harmonic2_fraction: F,
    /// White sensor noise std, g.
    pub noise_std_g: F,
}

/// Tail-beat / body-motion model for the x and y axes, plus how swimming
/// speed feeds back on breathing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwimModel<F> {
    /// Tail-beat frequency at zero speed, Hz (affine growth with speed).
    pub tailbeat_base_hz: F,
    /// Tail-beat frequency gain, Hz per body-length/s.
    pub tailbeat_per_bls_hz: F,
    /// Oscillation amplitude at vanishing speed, g.
    pub amp_base_g: F,
    /// Exponential amplitude growth rate per body-length/s.
    pub amp_growth_per_bls: F,
    /// Speed of maximum activity; beyond it the amplitude declines. `None`
    /// disables the taper.
    pub activity_knee_bls: Option<F>,
    /// Mean turn-event rate, events/s (exponential inter-arrivals).
    pub turn_rate_hz: F,
    /// Turn impulse amplitude, g (smoothed by a 0.2 s kernel).
    pub turn_amp_g: F,
    /// White sensor noise std on x/y, g.
    pub noise_std_g: F,
    /// Breathing-frequency growth with speed, Hz per body-length/s.
    pub breath_per_bls_hz: F,
    /// Fatigue knee: breathing growth stops here and reverses. `None`
    /// disables the knee (monotone growth).
    pub fatigue_knee_bls: Option<F>,
    /// Breathing decline rate beyond the knee, Hz per body-length/s.
    pub fatigue_decline_per_bls_hz: F,
}

/// Named parameter set for one species.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesPreset<F> {
    pub name: String,
    pub breathing: BreathingModel<F>,
    pub swim: SwimModel<F>,
}

impl<F: Real> SpeciesPreset<F> {
    /// Gilthead seabream: resting beat in the 2.3-2.4 breaths/s band.
    pub fn sea_bream() -> Self {
        Self {
            name: "sea_bream".into(),
            breathing: BreathingModel {
                base_freq_hz: F::of(2.35),
                freq_jitter_hz: F::of(0.02),
                amplitude_g: F::of(0.25),
                harmonic2_fraction: F::of(0.25),
                noise_std_g: F::of(0.04),
            },
            swim: SwimModel {
                tailbeat_base_hz: F::of(1.5),
                tailbeat_per_bls_hz: F::of(0.5),
                amp_base_g: F::of(0.05),
                amp_growth_per_bls: F::of(0.55),
                activity_knee_bls: Some(F::of(5.0)),
                turn_rate_hz: F::of(0.05),
                turn_amp_g: F::of(0.6),
                noise_std_g: F::of(0.02),
                breath_per_bls_hz: F::of(0.3),
                fatigue_knee_bls: Some(F::of(4.0)),
                fatigue_decline_per_bls_hz: F::of(0.3),
            },
        }
    }

    /// European seabass: slower resting beat, 1.8-2.2 breaths/s.
    pub fn sea_bass() -> Self {
        Self {
            name: "sea_bass".into(),
            breathing: BreathingModel {
                base_freq_hz: F::of(2.0),
                freq_jitter_hz: F::of(0.03),
                amplitude_g: F::of(0.3),
                harmonic2_fraction: F::of(0.2),
                noise_std_g: F::of(0.04),
            },
            swim: SwimModel {
                tailbeat_base_hz: F::of(1.6),
                tailbeat_per_bls_hz: F::of(0.55),
                amp_base_g: F::of(0.045),
                amp_growth_per_bls: F::of(0.5),
                activity_knee_bls: Some(F::of(5.0)),
                turn_rate_hz: F::of(0.06),
                turn_amp_g: F::of(0.6),
                noise_std_g: F::of(0.02),
                breath_per_bls_hz: F::of(0.28),
                fatigue_knee_bls: Some(F::of(4.0)),
                fatigue_decline_per_bls_hz: F::of(0.28),
            },
        }
    }

    /// Built-in preset by name.
    pub fn builtin(name: &str) -> Result<Self, SynthError> {
        match name {
            "sea_bream" => Ok(Self::sea_bream()),
            "sea_bass" => Ok(Self::sea_bass()),
            other => Err(SynthError::UnknownPreset(other.to_string())),
        }
    }

    /// Names of the built-in presets.
    pub fn builtin_names() -> &'static [&'static str] {
        &["sea_bream", "sea_bass"]
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |msg: String| Err(SynthError::InvalidModel(msg));
        let b = &self.breathing;
        if !(b.base_freq_hz > F::zero()) {
            return bad(format!("breathing base frequency must be positive, got {}", b.base_freq_hz));
        }
        for (name, v) in [
            ("freq_jitter_hz", b.freq_jitter_hz),
            ("amplitude_g", b.amplitude_g),
            ("harmonic2_fraction", b.harmonic2_fraction),
            ("noise_std_g", b.noise_std_g),
        ] {
            if v < F::zero() || !v.is_finite() {
                return bad(format!("breathing {name} must be non-negative, got {v}"));
            }
        }
        let s = &self.swim;
        for (name, v) in [
            ("tailbeat_base_hz", s.tailbeat_base_hz),
            ("tailbeat_per_bls_hz", s.tailbeat_per_bls_hz),
            ("amp_base_g", s.amp_base_g),
            ("turn_rate_hz", s.turn_rate_hz),
            ("turn_amp_g", s.turn_amp_g),
            ("noise_std_g", s.noise_std_g),
            ("breath_per_bls_hz", s.breath_per_bls_hz),
            ("fatigue_decline_per_bls_hz", s.fatigue_decline_per_bls_hz),
        ] {
            if v < F::zero() || !v.is_finite() {
                return bad(format!("swim {name} must be non-negative, got {v}"));
            }
        }
        Ok(())
    }

    /// Breathing frequency at a given swim speed: affine growth up to the
    /// fatigue knee, linear decline beyond it, floored at a fifth of the
    /// resting rate.
    pub fn breathing_freq_at(&self, speed_bls: F) -> F {
        let s = &self.swim;
        let knee = s.fatigue_knee_bls.unwrap_or(F::infinity());
        let below = speed_bls.min(knee);
        let above = (speed_bls - knee).max(F::zero());
        let f = self.breathing.base_freq_hz + s.breath_per_bls_hz * below
            - s.fatigue_decline_per_bls_hz * above;
        f.max(self.breathing.base_freq_hz * F::of(0.2))
    }

    /// Tail-beat amplitude at a given swim speed: exponential growth with a
    /// taper past the activity knee. Zero at rest.
    pub fn swim_amplitude_at(&self, speed_bls: F) -> F {
        if speed_bls <= F::zero() {
            return F::zero();
        }
        let s = &self.swim;
        let knee = s.activity_knee_bls.unwrap_or(F::infinity());
        let below = speed_bls.min(knee);
        let above = (speed_bls - knee).max(F::zero());
        // decline past the knee at double the growth rate: fatigue is fast
        let exponent = s.amp_growth_per_bls * below - (s.amp_growth_per_bls + s.amp_growth_per_bls) * above;
        s.amp_base_g * exponent.exp()
    }

    /// Tail-beat frequency at a given swim speed.
    pub fn tailbeat_freq_at(&self, speed_bls: F) -> F {
        self.swim.tailbeat_base_hz + self.swim.tailbeat_per_bls_hz * speed_bls
    }
}

/// Per-tick ground truth accompanying a generated series.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth<F> {
    /// Reporting cadence, s (1.0).
    pub tick_seconds: F,
    /// Swim speed the series was generated at, body-lengths/s (0 = rest).
    pub speed_bls: F,
    /// Instantaneous breathing frequency per tick, Hz.
    pub breath_hz: Vec<F>,
    /// Exact jerk energy of the noise-free x/y per tick, g.
    pub clean_jerk_g: Vec<F>,
}

/// One step of a swim protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct SwimStep<F> {
    pub speed_bls: F,
    pub series: AccelSeries<F>,
    pub truth: GroundTruth<F>,
}

/// Generates a resting recording (breathing only, no swimming).
pub fn generate<F: Real>(
    preset: &SpeciesPreset<F>,
    duration_s: F,
    fs: F,
    seed: u64,
) -> Result<(AccelSeries<F>, GroundTruth<F>), SynthError> {
    generate_swimming(preset, F::zero(), duration_s, fs, seed)
}

/// Generates a recording at a constant swim speed (0 = rest).
pub fn generate_swimming<F: Real>(
    preset: &SpeciesPreset<F>,
    speed_bls: F,
    duration_s: F,
    fs: F,
    seed: u64,
) -> Result<(AccelSeries<F>, GroundTruth<F>), SynthError> {
    preset.validate()?;
    if !(fs > F::zero()) || !fs.is_finite() {
        return Err(SynthError::InvalidModel(format!("fs must be positive, got {fs}")));
    }
    if !(duration_s > F::zero()) {
        return Err(SynthError::InvalidModel(format!(
            "duration must be positive, got {duration_s}"
        )));
    }
    if speed_bls < F::zero() {
        return Err(SynthError::InvalidModel(format!("speed must be >= 0, got {speed_bls}")));
    }

    let n = (duration_s * fs).round().as_f64() as usize;
    let n = n.max(1);
    let fs64 = fs.as_f64();
    let dt = 1.0 / fs64;
    let ticks = n.div_ceil(fs64.round() as usize).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gauss = Normal::new(0.0, 1.0).expect("unit normal");

    // per-tick breathing frequency: slow wander around the speed-dependent
    // mean, floored away from zero
    let mean_breath = preset.breathing_freq_at(speed_bls).as_f64();
    let jitter = preset.breathing.freq_jitter_hz.as_f64();
    let breath_hz: Vec<f64> = (0..ticks)
        .map(|_| (mean_breath + jitter * gauss.sample(&mut rng)).max(0.2 * mean_breath).max(0.05))
        .collect();

    // z: phase-continuous breathing tone + second harmonic + noise
    let amp = preset.breathing.amplitude_g.as_f64();
    let h2 = preset.breathing.harmonic2_fraction.as_f64() * amp;
    let noise_z = preset.breathing.noise_std_g.as_f64();
    let mut z = Vec::with_capacity(n);
    let mut phase = 0.0f64;
    for i in 0..n {
        let tick = ((i as f64 * dt) as usize).min(ticks - 1);
        // keep the tone inside the counting band
        let f_inst = breath_hz[tick].min(0.45 * fs64);
        phase += core::f64::consts::TAU * f_inst * dt;
        let v = amp * phase.sin() + h2 * (2.0 * phase).sin() + noise_z * gauss.sample(&mut rng);
        z.push(v);
    }

    // x/y: tail-beat with species amplitude curve + turn bursts + noise
    let tail_f = preset.tailbeat_freq_at(speed_bls).as_f64();
    let tail_a = preset.swim_amplitude_at(speed_bls).as_f64();
    let noise_xy = preset.swim.noise_std_g.as_f64();
    let phase_x = rng.random_range(0.0..core::f64::consts::TAU);
    let phase_y = phase_x + core::f64::consts::FRAC_PI_2 + rng.random_range(-0.3..0.3);

    let mut x_clean = vec![0.0f64; n];
    let mut y_clean = vec![0.0f64; n];
    for i in 0..n {
        let t = i as f64 * dt;
        let w = core::f64::consts::TAU * tail_f * t;
        x_clean[i] = tail_a * (w + phase_x).sin();
        y_clean[i] = 0.8 * tail_a * (w + phase_y).sin();
    }

    // turn events: exponential inter-arrivals, raised-cosine bump of 0.2 s
    if speed_bls > F::zero() && preset.swim.turn_rate_hz > F::zero() {
        let rate = preset.swim.turn_rate_hz.as_f64();
        let turn_amp = preset.swim.turn_amp_g.as_f64();
        let kernel_s = 0.2;
        let kn = (kernel_s * fs64).round() as usize;
        let mut t_event = 0.0f64;
        loop {
            // exponential inter-arrival via inverse CDF
            let u: f64 = rng.random_range(f64::EPSILON..1.0);
            t_event += -u.ln() / rate;
            if t_event >= n as f64 * dt {
                break;
            }
            let a = turn_amp * rng.random_range(0.5..1.0);
            let wx = rng.random_range(-1.0..1.0);
            let wy = rng.random_range(-1.0..1.0);
            let start = (t_event * fs64) as usize;
            for j in 0..kn {
                let idx = start + j;
                if idx >= n {
                    break;
                }
                let u = j as f64 / kn as f64;
                let bump = 0.5 * (1.0 - (core::f64::consts::TAU * u).cos());
                x_clean[idx] += a * wx * bump;
                y_clean[idx] += a * wy * bump;
            }
        }
    }

    // ground-truth clean jerk per tick (exact flavour, straight loops)
    let tick_len = fs64.round() as usize;
    let clean_jerk: Vec<f64> = (0..ticks)
        .map(|k| {
            let lo = k * tick_len;
            let hi = ((k + 1) * tick_len).min(n);
            if hi - lo < 2 {
                return 0.0;
            }
            let var = |c: &[f64]| {
                let d: Vec<f64> = c.windows(2).map(|w| w[1] - w[0]).collect();
                let len = c.len() as f64;
                let mu = d.iter().sum::<f64>() / len;
                d.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / len
            };
            (var(&x_clean[lo..hi]) + var(&y_clean[lo..hi])).sqrt()
        })
        .collect();

    let full = FULL_SCALE_G;
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let nx = x_clean[i] + noise_xy * gauss.sample(&mut rng);
        let ny = y_clean[i] + noise_xy * gauss.sample(&mut rng);
        samples.push(AccelSample {
            ax: F::of(nx.clamp(-full, full)),
            ay: F::of(ny.clamp(-full, full)),
            az: F::of(z[i].clamp(-full, full)),
        });
    }

    let series = AccelSeries::new(samples, fs)
        .map_err(|e| SynthError::InvalidModel(e.to_string()))?;
    let truth = GroundTruth {
        tick_seconds: F::one(),
        speed_bls,
        breath_hz: breath_hz.iter().map(|&v| F::of(v)).collect(),
        clean_jerk_g: clean_jerk.iter().map(|&v| F::of(v)).collect(),
    };
    Ok((series, truth))
}

/// Generates one series per speed step, each `step_seconds` long.
/// Steps are seeded independently (seed mixed with the step index), so the
/// protocol is reproducible and steps are statistically independent.
pub fn swim_protocol<F: Real>(
    preset: &SpeciesPreset<F>,
    speeds: &[F],
    step_seconds: F,
    fs: F,
    seed: u64,
) -> Result<Vec<SwimStep<F>>, SynthError> {
    if speeds.is_empty() {
        return Err(SynthError::InvalidModel("protocol needs at least one speed".into()));
    }
    speeds
        .iter()
        .enumerate()
        .map(|(k, &speed)| {
            let step_seed = seed.wrapping_add((k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let (series, truth) = generate_swimming(preset, speed, step_seconds, fs, step_seed)?;
            Ok(SwimStep { speed_bls: speed, series, truth })
        })
        .collect()
}
