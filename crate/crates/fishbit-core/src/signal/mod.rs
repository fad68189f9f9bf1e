//! Respiration-frequency and physical-activity estimators.
//!
//! A recording is split into windows of `frames_per_window` frames of
//! `frame_seconds` each. Per window the pipeline computes:
//!
//! - **respiration frequency** from the z axis: band-pass, first difference,
//!   zero-crossing count per frame, then the 25 % nearest-rank percentile of
//!   the per-frame counts divided by the frame length (breaths/s);
//! - **activity index** from the x/y axes: per-frame jerk energy (spread of
//!   the first differences), then the same 25 % percentile (g).
//!
//! Two execution modes share this structure. [`Mode::Exact`] is the
//! full-precision PC path (population standard deviations, RSS combination,
//! 10 s frames). [`Mode::Onboard`] mirrors the tag firmware: mean absolute
//! deviation instead of a standard deviation, plain sum instead of RSS, and
//! 10.24 s frames (1024 samples at 100 Hz — a power of two, so the firmware
//! divisions are shifts). On a pure single-axis sinusoid the onboard energy
//! is (2/pi)*sqrt(2) ~ 0.9003 of the exact one.

mod filter;
mod jerk;
mod peaks;
mod window;

pub use filter::{Bandpass, BiquadCoeffs};
pub use jerk::{jerk_energy_exact, jerk_energy_onboard};
pub use peaks::{count_peaks_in_frame, count_zero_crossings};
pub use window::{
    activity_index, percentile_nearest_rank, process_window, process_windows, respiratory_frequency,
};

use crate::float::Real;

/// Errors from the estimator layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SignalError {
    /// Window holds fewer samples than `frames_per_window * frame_len`.
    #[error("window needs at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    /// Frame too short for a first difference.
    #[error("frame needs at least 2 samples, got {got}")]
    FrameTooShort { got: usize },
    /// Paired channels of different lengths.
    #[error("x and y frames differ in length: {x} vs {y}")]
    ChannelMismatch { x: usize, y: usize },
    /// Configuration violates its invariants.
    #[error("invalid estimator config: {0}")]
    InvalidConfig(String),
}

/// One tri-axial accelerometer sample, in g.
///
/// The sensor full scale is +-8 g; producers (synthesis, CSV ingestion, log
/// decoding) are responsible for keeping components in range.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AccelSample<F> {
    pub ax: F,
    pub ay: F,
    pub az: F,
}

impl<F: Real> AccelSample<F> {
    pub fn new(ax: F, ay: F, az: F) -> Self {
        Self { ax, ay, az }
    }

    /// True when all components are inside the +-8 g sensor full scale.
    pub fn in_range(&self) -> bool {
        let fs = F::of(FULL_SCALE_G);
        self.ax.abs() <= fs && self.ay.abs() <= fs && self.az.abs() <= fs
    }
}

/// Sensor full scale in g.
pub const FULL_SCALE_G: f64 = 8.0;

/// Uniformly sampled tri-axial series.
#[derive(Debug, Clone, PartialEq)]
pub struct AccelSeries<F> {
    samples: Vec<AccelSample<F>>,
    fs: F,
}

impl<F: Real> AccelSeries<F> {
    /// New series at sampling rate `fs` (Hz). `fs` must be positive.
    pub fn new(samples: Vec<AccelSample<F>>, fs: F) -> Result<Self, SignalError> {
        if !(fs > F::zero()) || !fs.is_finite() {
            return Err(SignalError::InvalidConfig(format!(
                "sampling rate must be positive and finite, got {fs}"
            )));
        }
        Ok(Self { samples, fs })
    }

    /// Build from per-axis channels of equal length.
    pub fn from_channels(x: &[F], y: &[F], z: &[F], fs: F) -> Result<Self, SignalError> {
        if x.len() != y.len() || x.len() != z.len() {
            return Err(SignalError::ChannelMismatch { x: x.len(), y: y.len().max(z.len()) });
        }
        let samples = x
            .iter()
            .zip(y)
            .zip(z)
            .map(|((&ax, &ay), &az)| AccelSample { ax, ay, az })
            .collect();
        Self::new(samples, fs)
    }

    pub fn fs(&self) -> F {
        self.fs
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Duration in seconds.
    pub fn duration(&self) -> F {
        F::of_usize(self.len()) / self.fs
    }

    pub fn samples(&self) -> &[AccelSample<F>] {
        &self.samples
    }

    pub fn push(&mut self, s: AccelSample<F>) {
        self.samples.push(s);
    }

    /// Copy of one axis as a contiguous channel.
    pub fn channel(&self, axis: Axis) -> Vec<F> {
        self.samples
            .iter()
            .map(|s| match axis {
                Axis::X => s.ax,
                Axis::Y => s.ay,
                Axis::Z => s.az,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Which estimator flavour computed a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Full-precision PC path: population std of the jerk, RSS of the axes.
    Exact,
    /// Firmware path: mean absolute deviation, sum of the axes, no sqrt.
    Onboard,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Onboard => "onboard",
        }
    }
}

impl core::fmt::Display for Mode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "onboard" => Ok(Mode::Onboard),
            other => Err(format!("unknown mode {other:?} (expected 'exact' or 'onboard')")),
        }
    }
}

/// Estimator knobs. Defaults follow the tag firmware: 100 Hz sampling,
/// 12 frames per window, 0.5-8 Hz respiration band, 25 % percentile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig<F> {
    /// Sampling rate, Hz.
    pub fs: F,
    /// Frame length T in seconds; `frame_seconds * fs` must land on an
    /// integer sample count. 10.0 in exact mode, 10.24 onboard.
    pub frame_seconds: F,
    /// Frames per window (N).
    pub frames_per_window: usize,
    /// Respiration band lower edge, Hz.
    pub band_low: F,
    /// Respiration band upper edge, Hz. Reported frequencies are capped here.
    pub band_high: F,
    /// Percentile (fraction in (0, 1]) applied to per-frame counts/energies.
    pub percentile: F,
    /// Band-pass the z axis before counting. On in both modes by default;
    /// turning it off reproduces a firmware build without the filter stage.
    pub filter_z: bool,
    /// Band-pass x/y before the jerk energies. Off by default: the jerk is a
    /// derivative and needs no detrending, and the firmware filters z only.
    pub filter_xy: bool,
    /// Filter warm-up discarded from peak counting at the window start, s.
    pub warmup_seconds: F,
}

impl<F: Real> EstimatorConfig<F> {
    /// PC-side defaults: 10 s frames.
    pub fn exact(fs: F) -> Self {
        Self::with_frame(fs, F::of(10.0))
    }

    /// Firmware defaults: 1024-sample frames at 100 Hz (10.24 s).
    pub fn onboard(fs: F) -> Self {
        Self::with_frame(fs, F::of(10.24))
    }

    fn with_frame(fs: F, frame_seconds: F) -> Self {
        Self {
            fs,
            frame_seconds,
            frames_per_window: 12,
            band_low: F::of(0.5),
            band_high: F::of(8.0),
            percentile: F::of(0.25),
            filter_z: true,
            filter_xy: false,
            warmup_seconds: F::of(2.0),
        }
    }

    /// Matching default config for a mode at sampling rate `fs`.
    pub fn for_mode(fs: F, mode: Mode) -> Self {
        match mode {
            Mode::Exact => Self::exact(fs),
            Mode::Onboard => Self::onboard(fs),
        }
    }

    /// Samples per frame. Valid configs land exactly on an integer.
    pub fn frame_len(&self) -> usize {
        (self.frame_seconds * self.fs).round().as_f64() as usize
    }

    /// Samples per window.
    pub fn window_len(&self) -> usize {
        self.frame_len() * self.frames_per_window
    }

    /// Window duration in seconds.
    pub fn window_seconds(&self) -> F {
        self.frame_seconds * F::of_usize(self.frames_per_window)
    }

    pub fn validate(&self) -> Result<(), SignalError> {
        let bad = |msg: String| Err(SignalError::InvalidConfig(msg));
        if !(self.fs > F::zero()) || !self.fs.is_finite() {
            return bad(format!("fs must be positive, got {}", self.fs));
        }
        if !(self.frame_seconds > F::zero()) {
            return bad(format!("frame_seconds must be positive, got {}", self.frame_seconds));
        }
        let count = self.frame_seconds * self.fs;
        if (count - count.round()).abs().as_f64() > 1e-9 {
            return bad(format!(
                "frame_seconds * fs must be an integer sample count, got {count}"
            ));
        }
        if self.frame_len() < 2 {
            return bad("frame shorter than 2 samples".into());
        }
        if self.frames_per_window == 0 {
            return bad("frames_per_window must be at least 1".into());
        }
        let nyquist = self.fs / F::of(2.0);
        if !(F::zero() < self.band_low && self.band_low < self.band_high && self.band_high < nyquist)
        {
            return bad(format!(
                "band must satisfy 0 < low < high < fs/2, got [{}, {}] at fs {}",
                self.band_low, self.band_high, self.fs
            ));
        }
        if !(self.percentile > F::zero() && self.percentile <= F::one()) {
            return bad(format!("percentile must be in (0, 1], got {}", self.percentile));
        }
        if self.warmup_seconds < F::zero() || self.warmup_seconds >= self.frame_seconds {
            return bad(format!(
                "warm-up ({}) must be non-negative and shorter than one frame ({})",
                self.warmup_seconds, self.frame_seconds
            ));
        }
        Ok(())
    }
}

impl<F: Real> Default for EstimatorConfig<F> {
    fn default() -> Self {
        Self::exact(F::of(100.0))
    }
}

/// Per-window estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowResult<F> {
    /// Start of the window, seconds since acquisition start.
    pub window_start: F,
    /// Respiration frequency, breaths/s. Never negative, capped at the
    /// filter band upper edge.
    pub resp_freq: F,
    /// Activity index, g. Never negative.
    pub activity: F,
    /// Which estimator produced the numbers.
    pub mode: Mode,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_channels_round_trip() {
        let s = AccelSeries::from_channels(&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0], 100.0).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.channel(Axis::X), vec![1.0, 2.0]);
        assert_eq!(s.channel(Axis::Y), vec![3.0, 4.0]);
        assert_eq!(s.channel(Axis::Z), vec![5.0, 6.0]);
        assert_eq!(s.duration(), 0.02);
    }

    #[test]
    fn series_rejects_mismatched_channels() {
        let err = AccelSeries::from_channels(&[1.0], &[1.0, 2.0], &[1.0], 100.0).unwrap_err();
        assert!(matches!(err, SignalError::ChannelMismatch { .. }));
    }

    #[test]
    fn series_rejects_bad_fs() {
        assert!(AccelSeries::<f64>::new(vec![], 0.0).is_err());
        assert!(AccelSeries::<f64>::new(vec![], -1.0).is_err());
        assert!(AccelSeries::<f64>::new(vec![], f64::NAN).is_err());
    }

    #[test]
    fn config_frame_lengths() {
        let exact = EstimatorConfig::<f64>::exact(100.0);
        assert_eq!(exact.frame_len(), 1000);
        assert_eq!(exact.window_len(), 12_000);
        let onboard = EstimatorConfig::<f64>::onboard(100.0);
        assert_eq!(onboard.frame_len(), 1024);
        assert_eq!(onboard.window_len(), 12_288);
        assert!((onboard.window_seconds() - 122.88).abs() < 1e-12);
        exact.validate().unwrap();
        onboard.validate().unwrap();
    }

    #[test]
    fn config_validation_catches_bad_fields() {
        let mut c = EstimatorConfig::<f64>::exact(100.0);
        c.band_high = 60.0; // above Nyquist
        assert!(matches!(c.validate(), Err(SignalError::InvalidConfig(_))));

        let mut c = EstimatorConfig::<f64>::exact(100.0);
        c.frame_seconds = 10.003; // 1000.3 samples
        assert!(c.validate().is_err());

        let mut c = EstimatorConfig::<f64>::exact(100.0);
        c.percentile = 0.0;
        assert!(c.validate().is_err());

        let mut c = EstimatorConfig::<f64>::exact(100.0);
        c.frames_per_window = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn sample_range_check() {
        assert!(AccelSample::new(7.9f64, -8.0, 0.0).in_range());
        assert!(!AccelSample::new(8.1f64, 0.0, 0.0).in_range());
    }

    #[test]
    fn mode_round_trips_through_strings() {
        assert_eq!("exact".parse::<Mode>().unwrap(), Mode::Exact);
        assert_eq!("onboard".parse::<Mode>().unwrap(), Mode::Onboard);
        assert_eq!(Mode::Onboard.to_string(), "onboard");
        assert!("fast".parse::<Mode>().is_err());
    }
}
