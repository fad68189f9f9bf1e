//! Window-level estimators: percentile selection over per-frame statistics.
//!
//! The 25 % nearest-rank percentile over the frames of a window is what makes
//! the pipeline robust on a free-swimming animal: frames disturbed by bursts,
//! turns or filter warm-up inflate their statistic and are simply never
//! selected as long as a quarter of the frames are quiet.

use super::{
    count_peaks_in_frame, jerk_energy_exact, jerk_energy_onboard, AccelSeries, Axis, Bandpass,
    EstimatorConfig, Mode, SignalError, WindowResult,
};
use crate::float::Real;

/// Nearest-rank percentile: the k-th smallest value with k = ceil(q * n),
/// 1-based. `q` must lie in (0, 1]; returns `None` on an empty slice.
/// Values must be totally ordered (no NaN).
pub fn percentile_nearest_rank<T: PartialOrd + Copy>(values: &[T], q: f64) -> Option<T> {
    if values.is_empty() || !(0.0..=1.0).contains(&q) || q == 0.0 {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let k = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    Some(sorted[k - 1])
}

fn check_window<F: Real>(len: usize, cfg: &EstimatorConfig<F>) -> Result<(), SignalError> {
    cfg.validate()?;
    let needed = cfg.window_len();
    if len < needed {
        return Err(SignalError::InsufficientData { needed, got: len });
    }
    Ok(())
}

/// Respiration frequency of one window of the z channel, breaths/s.
///
/// Band-pass (when `cfg.filter_z`), first difference, zero-crossing count
/// per frame, 25 % percentile over the `frames_per_window` counts, divided
/// by the frame length. Excess samples past the window are dropped. The
/// filter runs causally over the whole window and the configured warm-up is
/// excluded from the first frame's count. The result is capped at
/// `band_high`: the estimator cannot claim content above its own passband.
pub fn respiratory_frequency<F: Real>(
    z: &[F],
    cfg: &EstimatorConfig<F>,
) -> Result<F, SignalError> {
    check_window(z.len(), cfg)?;
    let frame_len = cfg.frame_len();
    let window = &z[..cfg.window_len()];

    let filtered;
    let (signal, warmup_samples): (&[F], usize) = if cfg.filter_z {
        let filt = Bandpass::design(cfg.band_low, cfg.band_high, cfg.fs)?;
        filtered = filt.apply(window);
        let warm = (cfg.warmup_seconds * cfg.fs).round().as_f64() as usize;
        (&filtered, warm)
    } else {
        (window, 0)
    };

    let mut counts = Vec::with_capacity(cfg.frames_per_window);
    for (i, frame) in signal.chunks_exact(frame_len).enumerate() {
        let skip = warmup_samples.saturating_sub(i * frame_len).min(frame_len);
        counts.push(count_peaks_in_frame(&frame[skip..])?);
    }

    let n_p = percentile_nearest_rank(&counts, cfg.percentile.as_f64())
        .expect("frames_per_window >= 1 after validation");
    let freq = F::of_usize(n_p) / cfg.frame_seconds;
    Ok(freq.min(cfg.band_high))
}

/// Activity index of one window from the x and y channels, in g.
///
/// Per-frame jerk energy (exact or onboard flavour), then the 25 %
/// percentile over frames. x/y are used raw unless `cfg.filter_xy` is set.
pub fn activity_index<F: Real>(
    x: &[F],
    y: &[F],
    cfg: &EstimatorConfig<F>,
    mode: Mode,
) -> Result<F, SignalError> {
    if x.len() != y.len() {
        return Err(SignalError::ChannelMismatch { x: x.len(), y: y.len() });
    }
    check_window(x.len(), cfg)?;
    let frame_len = cfg.frame_len();
    let n = cfg.window_len();

    let (xf, yf);
    let (xs, ys): (&[F], &[F]) = if cfg.filter_xy {
        let filt = Bandpass::design(cfg.band_low, cfg.band_high, cfg.fs)?;
        xf = filt.apply(&x[..n]);
        yf = filt.apply(&y[..n]);
        (&xf, &yf)
    } else {
        (&x[..n], &y[..n])
    };

    let mut energies = Vec::with_capacity(cfg.frames_per_window);
    for (fx, fy) in xs.chunks_exact(frame_len).zip(ys.chunks_exact(frame_len)) {
        let e = match mode {
            Mode::Exact => jerk_energy_exact(fx, fy)?,
            Mode::Onboard => jerk_energy_onboard(fx, fy)?,
        };
        energies.push(e);
    }

    Ok(percentile_nearest_rank(&energies, cfg.percentile.as_f64())
        .expect("frames_per_window >= 1 after validation"))
}

/// Full estimate of the first window of `series` (respiration + activity),
/// reported with `window_start = 0`.
pub fn process_window<F: Real>(
    series: &AccelSeries<F>,
    cfg: &EstimatorConfig<F>,
    mode: Mode,
) -> Result<WindowResult<F>, SignalError> {
    let z = series.channel(Axis::Z);
    let x = series.channel(Axis::X);
    let y = series.channel(Axis::Y);
    Ok(WindowResult {
        window_start: F::zero(),
        resp_freq: respiratory_frequency(&z, cfg)?,
        activity: activity_index(&x, &y, cfg, mode)?,
        mode,
    })
}

/// Splits `series` into consecutive complete windows and estimates each.
/// Returns the results plus the number of leftover samples in the
/// incomplete tail (zero when the length divides evenly).
pub fn process_windows<F: Real>(
    series: &AccelSeries<F>,
    cfg: &EstimatorConfig<F>,
    mode: Mode,
) -> Result<(Vec<WindowResult<F>>, usize), SignalError> {
    cfg.validate()?;
    let n = cfg.window_len();
    let complete = series.len() / n;
    let leftover = series.len() - complete * n;

    let x = series.channel(Axis::X);
    let y = series.channel(Axis::Y);
    let z = series.channel(Axis::Z);

    let mut out = Vec::with_capacity(complete);
    for w in 0..complete {
        let lo = w * n;
        let hi = lo + n;
        out.push(WindowResult {
            window_start: F::of_usize(w) * cfg.window_seconds(),
            resp_freq: respiratory_frequency(&z[lo..hi], cfg)?,
            activity: activity_index(&x[lo..hi], &y[lo..hi], cfg, mode)?,
            mode,
        });
    }
    Ok((out, leftover))
}
