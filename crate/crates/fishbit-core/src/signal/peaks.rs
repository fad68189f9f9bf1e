//! Peak counting on the filtered respiration channel.
//!
//! A breathing cycle produces one maximum per period; the firmware finds
//! them without any thresholding by differentiating once and counting zero
//! crossings of the derivative (each extremum is one crossing, so peaks are
//! crossings/2).

use super::SignalError;
use crate::float::Real;

/// Counts strict sign changes in `xs`. A zero sample inherits the previous
/// sign, so touching zero without crossing does not count, and a
/// plus-zero-minus run counts exactly once.
pub fn count_zero_crossings<F: Real>(xs: &[F]) -> usize {
    let mut crossings = 0usize;
    let mut prev = 0i8;
    for &x in xs {
        let s = if x > F::zero() {
            1
        } else if x < F::zero() {
            -1
        } else {
            prev
        };
        if prev != 0 && s != prev {
            crossings += 1;
        }
        if s != 0 {
            prev = s;
        }
    }
    crossings
}

/// Peaks in one frame of the (already filtered) z channel: zero crossings of
/// the first difference, halved. Needs at least two samples for one
/// difference.
pub fn count_peaks_in_frame<F: Real>(frame: &[F]) -> Result<usize, SignalError> {
    if frame.len() < 2 {
        return Err(SignalError::FrameTooShort { got: frame.len() });
    }
    let mut diffs = Vec::with_capacity(frame.len() - 1);
    for w in frame.windows(2) {
        diffs.push(w[1] - w[0]);
    }
    Ok(count_zero_crossings(&diffs) / 2)
}
