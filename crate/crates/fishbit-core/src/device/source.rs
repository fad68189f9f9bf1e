//! Signal supplies for the scheduler.
//!
//! The simulated tag asks its source for one window of samples at a time;
//! where they come from — a pre-recorded series, the synthetic generator,
//! or a plain function of time — is the source's business.

use super::DeviceError;
use crate::float::Real;
use crate::signal::{AccelSample, AccelSeries};
use crate::synth::{generate_swimming, SpeciesPreset};

/// Supplies samples for scheduled acquisition windows.
///
/// `window_index` counts scheduled windows from 0; `start_s` is the window's
/// start on the device clock; the returned series must hold exactly `len`
/// samples at the device's sampling rate.
pub trait SignalSource<F: Real> {
    fn acquire(
        &mut self,
        window_index: u64,
        start_s: f64,
        len: usize,
    ) -> Result<AccelSeries<F>, DeviceError>;
}

/// Replays one long recording, slicing each window out by its start time.
#[derive(Debug, Clone)]
pub struct SeriesSource<F> {
    series: AccelSeries<F>,
}

impl<F: Real> SeriesSource<F> {
    pub fn new(series: AccelSeries<F>) -> Self {
        Self { series }
    }
}

impl<F: Real> SignalSource<F> for SeriesSource<F> {
    fn acquire(
        &mut self,
        window_index: u64,
        start_s: f64,
        len: usize,
    ) -> Result<AccelSeries<F>, DeviceError> {
        let fs = self.series.fs();
        let first = (start_s * fs.as_f64()).round() as usize;
        let end = first.checked_add(len).filter(|&e| e <= self.series.len());
        let Some(end) = end else {
            return Err(DeviceError::SourceExhausted {
                window: window_index,
                reason: format!(
                    "recording holds {} samples, window needs {}..{}",
                    self.series.len(),
                    first,
                    first + len
                ),
            });
        };
        AccelSeries::new(self.series.samples()[first..end].to_vec(), fs)
            .map_err(DeviceError::Signal)
    }
}

/// Generates each window with the synthetic species model at a fixed swim
/// speed. Windows are seeded independently from the base seed and the
/// window index, so a schedule replays identically but windows differ.
#[derive(Debug, Clone)]
pub struct PresetSource<F> {
    preset: SpeciesPreset<F>,
    speed_bls: F,
    fs: F,
    seed: u64,
}

impl<F: Real> PresetSource<F> {
    pub fn new(preset: SpeciesPreset<F>, speed_bls: F, fs: F, seed: u64) -> Self {
        Self { preset, speed_bls, fs, seed }
    }
}

impl<F: Real> SignalSource<F> for PresetSource<F> {
    fn acquire(
        &mut self,
        window_index: u64,
        _start_s: f64,
        len: usize,
    ) -> Result<AccelSeries<F>, DeviceError> {
        let window_seed = self.seed.wrapping_add(window_index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let duration = F::of_usize(len) / self.fs;
        let (series, _truth) =
            generate_swimming(&self.preset, self.speed_bls, duration, self.fs, window_seed)
                .map_err(|e| DeviceError::SourceExhausted {
                    window: window_index,
                    reason: e.to_string(),
                })?;
        Ok(series)
    }
}

/// Evaluates a function of absolute time, `t -> (ax, ay, az)` in g.
/// Deterministic and allocation-light; handy for tests and demos.
#[derive(Debug, Clone)]
pub struct FunctionSource<F, G> {
    fs: F,
    f: G,
}

impl<F: Real, G: FnMut(f64) -> (f64, f64, f64)> FunctionSource<F, G> {
    pub fn new(fs: F, f: G) -> Self {
        Self { fs, f }
    }
}

impl<F: Real, G: FnMut(f64) -> (f64, f64, f64)> SignalSource<F> for FunctionSource<F, G> {
    fn acquire(
        &mut self,
        _window_index: u64,
        start_s: f64,
        len: usize,
    ) -> Result<AccelSeries<F>, DeviceError> {
        let dt = 1.0 / self.fs.as_f64();
        let samples = (0..len)
            .map(|i| {
                let (ax, ay, az) = (self.f)(start_s + i as f64 * dt);
                AccelSample::new(F::of(ax), F::of(ay), F::of(az))
            })
            .collect();
        AccelSeries::new(samples, self.fs).map_err(DeviceError::Signal)
    }
}
