//! Per-frame jerk energies for the activity index.
//!
//! Both estimators work on the first differences d(n) = a(n) - a(n-1) of the
//! x and y channels within one frame (L samples give L-1 differences; sums
//! are divided by L, matching a firmware that divides by the power-of-two
//! frame size with a shift).
//!
//! - exact: population standard deviation per axis, axes combined as
//!   sqrt(sx^2 + sy^2);
//! - onboard: mean absolute deviation per axis, axes combined as a plain
//!   sum. Only additions, subtractions, absolute values and divisions — the
//!   firmware has no sqrt.
//!
//! On a pure single-axis sinusoid the MAD of a sinusoidal difference series
//! is 2A/pi against A/sqrt(2) for the standard deviation, so onboard/exact
//! approaches (2/pi)*sqrt(2) ~ 0.9003.

use super::SignalError;
use crate::float::Real;

fn diffs<F: Real>(frame: &[F]) -> Vec<F> {
    frame.windows(2).map(|w| w[1] - w[0]).collect()
}

fn check<F: Real>(x: &[F], y: &[F]) -> Result<(), SignalError> {
    if x.len() != y.len() {
        return Err(SignalError::ChannelMismatch { x: x.len(), y: y.len() });
    }
    if x.len() < 2 {
        return Err(SignalError::FrameTooShort { got: x.len() });
    }
    Ok(())
}

/// Population standard deviation of the first differences, divisor = frame
/// length `len`.
fn diff_std<F: Real>(frame: &[F]) -> F {
    let d = diffs(frame);
    let n = F::of_usize(frame.len());
    let mean = d.iter().fold(F::zero(), |a, &v| a + v) / n;
    let ss = d.iter().fold(F::zero(), |a, &v| {
        let c = v - mean;
        a + c * c
    });
    (ss / n).sqrt()
}

/// Mean absolute deviation of the first differences about their mean,
/// divisor = frame length `len`.
fn diff_mad<F: Real>(frame: &[F]) -> F {
    let d = diffs(frame);
    let n = F::of_usize(frame.len());
    let mean = d.iter().fold(F::zero(), |a, &v| a + v) / n;
    d.iter().fold(F::zero(), |a, &v| a + (v - mean).abs()) / n
}

/// Exact jerk energy of one frame: sqrt(std_x^2 + std_y^2) of the first
/// differences. Invariant under rotation of the (x, y) plane because the
/// axis variances add.
pub fn jerk_energy_exact<F: Real>(x: &[F], y: &[F]) -> Result<F, SignalError> {
    check(x, y)?;
    let sx = diff_std(x);
    let sy = diff_std(y);
    Ok((sx * sx + sy * sy).sqrt())
}

/// Onboard jerk energy of one frame: MAD_x + MAD_y of the first differences.
/// Uses only add/sub/abs/divide.
pub fn jerk_energy_onboard<F: Real>(x: &[F], y: &[F]) -> Result<F, SignalError> {
    check(x, y)?;
    Ok(diff_mad(x) + diff_mad(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    const FS: f64 = 100.0;

    fn sine(freq: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| (2.0 * core::f64::consts::PI * freq * i as f64 / FS).sin()).collect()
    }

    #[test]
    fn constant_frames_have_zero_energy() {
        let x = vec![0.7f64; 1000];
        let y = vec![-1.3f64; 1000];
        assert_eq!(jerk_energy_exact(&x, &y).unwrap(), 0.0);
        assert_eq!(jerk_energy_onboard(&x, &y).unwrap(), 0.0);
    }

    // Frozen from a brute-force evaluation of the definitions on a unit
    // 2 Hz sine in x with y = 0. The analytic values are A_d/sqrt(2) and
    // 2*A_d/pi with difference amplitude A_d = 2*sin(pi*f/fs).
    #[test]
    fn unit_sine_energies_match_brute_force() {
        let zeros = vec![0.0f64; 1000];
        let e = jerk_energy_exact(&sine(2.0, 1000), &zeros).unwrap();
        assert!((e - 0.088710622486592).abs() < 1e-12, "exact {e}");

        let zeros = vec![0.0f64; 1024];
        let o = jerk_energy_onboard(&sine(2.0, 1024), &zeros).unwrap();
        assert!((o - 0.079686497491653).abs() < 1e-12, "onboard {o}");
    }

    #[test]
    fn onboard_to_exact_ratio_is_two_root_two_over_pi() {
        let target = 2.0 * core::f64::consts::SQRT_2 / core::f64::consts::PI;
        let zeros = vec![0.0f64; 1024];
        for i in 0..31 {
            let f = 0.5 + 0.25 * i as f64;
            let x = sine(f, 1024);
            let ratio =
                jerk_energy_onboard(&x, &zeros).unwrap() / jerk_energy_exact(&x, &zeros).unwrap();
            assert!(
                (ratio / target - 1.0).abs() < 0.01,
                "f = {f} Hz: ratio {ratio} vs {target}"
            );
        }
    }

    #[test]
    fn energy_scales_linearly_with_amplitude() {
        let x = sine(2.0, 1000);
        let y = sine(3.0, 1000);
        let x4: Vec<f64> = x.iter().map(|v| v * 4.0).collect();
        let y4: Vec<f64> = y.iter().map(|v| v * 4.0).collect();
        let e1 = jerk_energy_exact(&x, &y).unwrap();
        let e4 = jerk_energy_exact(&x4, &y4).unwrap();
        assert!((e4 / e1 - 4.0).abs() < 1e-12);
        let o1 = jerk_energy_onboard(&x, &y).unwrap();
        let o4 = jerk_energy_onboard(&x4, &y4).unwrap();
        assert!((o4 / o1 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn constant_offsets_do_not_change_energy() {
        let x = sine(2.0, 1000);
        let y = sine(3.0, 1000);
        let xo: Vec<f64> = x.iter().map(|v| v + 1.5).collect();
        let yo: Vec<f64> = y.iter().map(|v| v - 2.5).collect();
        let e = jerk_energy_exact(&x, &y).unwrap();
        let eo = jerk_energy_exact(&xo, &yo).unwrap();
        assert!((e - eo).abs() < 1e-12);
        let o = jerk_energy_onboard(&x, &y).unwrap();
        let oo = jerk_energy_onboard(&xo, &yo).unwrap();
        assert!((o - oo).abs() < 1e-12);
    }

    #[test]
    fn exact_energy_is_rotation_invariant() {
        let x = sine(2.0, 1000);
        let y = sine(3.5, 1000);
        let e0 = jerk_energy_exact(&x, &y).unwrap();
        for deg in [15.0f64, 45.0, 90.0, 137.0] {
            let (s, c) = deg.to_radians().sin_cos();
            let xr: Vec<f64> = x.iter().zip(&y).map(|(&a, &b)| c * a - s * b).collect();
            let yr: Vec<f64> = x.iter().zip(&y).map(|(&a, &b)| s * a + c * b).collect();
            let e = jerk_energy_exact(&xr, &yr).unwrap();
            assert!(((e - e0) / e0).abs() < 1e-9, "rotation {deg} deg: {e} vs {e0}");
        }
    }

    #[test]
    fn mismatched_or_short_frames_are_rejected() {
        assert_eq!(
            jerk_energy_exact(&[1.0f64; 3], &[1.0; 4]),
            Err(SignalError::ChannelMismatch { x: 3, y: 4 })
        );
        assert_eq!(
            jerk_energy_onboard(&[1.0f64], &[1.0]),
            Err(SignalError::FrameTooShort { got: 1 })
        );
    }
}
