//! Causal band-pass filter for the respiration channel.
//!
//! Fourth-order Butterworth band-pass realized as a cascade of two biquads:
//! an order-2 analog low-pass prototype is band-transformed around the
//! prewarped edges and mapped with the bilinear transform. The filter runs
//! forward only, like the firmware, so each window carries a start-up
//! transient; the estimators discard a configurable warm-up from peak
//! counting instead of filtering twice.
//!
//! The default design edges are 0.5-7.5 Hz (-3 dB). The upper edge sits
//! slightly below the 8 Hz band edge used for counting so that 20 Hz tail
//! noise is attenuated by more than 20 dB; in exchange the response at the
//! very edges of the 0.5-8 Hz band droops to about -3 dB, which leaves the
//! zero-crossing counts untouched (counting is amplitude-invariant).
//! A flatter passband together with >= 20 dB stopbands this close to the
//! band would need twice the filter order, which the firmware budget rules
//! out.

use num_complex::Complex64;

use super::SignalError;
use crate::float::Real;

/// One second-order section in direct form I.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiquadCoeffs<F> {
    pub b0: F,
    pub b1: F,
    pub b2: F,
    /// Denominator coefficients with a0 normalized to 1.
    pub a1: F,
    pub a2: F,
}

impl<F: Real> BiquadCoeffs<F> {
    /// Complex gain at normalized angular frequency `w` (rad/sample).
    fn response(&self, w: f64) -> Complex64 {
        let z1 = Complex64::from_polar(1.0, -w);
        let z2 = z1 * z1;
        let num = Complex64::from(self.b0.as_f64()) + z1 * self.b1.as_f64() + z2 * self.b2.as_f64();
        let den = Complex64::from(1.0) + z1 * self.a1.as_f64() + z2 * self.a2.as_f64();
        num / den
    }
}

#[derive(Debug, Clone, Copy)]
struct BiquadState<F> {
    x1: F,
    x2: F,
    y1: F,
    y2: F,
}

impl<F: Real> BiquadState<F> {
    fn zeroed() -> Self {
        Self { x1: F::zero(), x2: F::zero(), y1: F::zero(), y2: F::zero() }
    }
}

/// Two-section Butterworth band-pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Bandpass<F> {
    sections: [BiquadCoeffs<F>; 2],
    fs: F,
}

impl<F: Real> Bandpass<F> {
    /// Designs the cascade for passband `[low, high]` Hz (-3 dB edges) at
    /// sampling rate `fs`. Requires `0 < low < high < fs/2`.
    ///
    /// The design runs in `f64` regardless of `F`: coefficient accuracy
    /// should not depend on the processing precision.
    pub fn design(low: F, high: F, fs: F) -> Result<Self, SignalError> {
        let (f1, f2, fsr) = (low.as_f64(), high.as_f64(), fs.as_f64());
        if !(0.0 < f1 && f1 < f2 && f2 < fsr / 2.0) {
            return Err(SignalError::InvalidConfig(format!(
                "band edges must satisfy 0 < low < high < fs/2, got [{f1}, {f2}] at fs {fsr}"
            )));
        }

        // Prewarped analog edges, rad/s.
        let w1 = 2.0 * fsr * (core::f64::consts::PI * f1 / fsr).tan();
        let w2 = 2.0 * fsr * (core::f64::consts::PI * f2 / fsr).tan();
        let w0sq = w1 * w2;
        let bw = w2 - w1;

        // Order-2 Butterworth prototype pole in the upper half plane; the
        // band transform splits it into one pole pair per section:
        // s^2 - (bw*p)*s + w0^2 = 0.
        let proto = Complex64::from_polar(1.0, 3.0 * core::f64::consts::PI / 4.0);
        let bp = proto * bw;
        let disc = (bp * bp - 4.0 * w0sq).sqrt();
        let s_a = (bp + disc) / 2.0;
        let s_b = (bp - disc) / 2.0;

        // Bilinear transform; the four analog zeros (two at s=0, two at
        // infinity) give double digital zeros at z=+1 and z=-1.
        let c = 2.0 * fsr;
        let bil = |s: Complex64| (s + c) / (-s + c);
        let z_a = bil(s_a);
        let z_b = bil(s_b);

        // Cascade gain: bw^2 * (2fs)^2 / prod(2fs - s_k) over all four poles.
        let denom = (Complex64::from(c) - s_a).norm_sqr() * (Complex64::from(c) - s_b).norm_sqr();
        let k = bw * bw * c * c / denom;

        // Section A carries the gain and the zeros at z=-1, section B the
        // zeros at z=+1; a0 is normalized away.
        let sec_a = BiquadCoeffs {
            b0: F::of(k),
            b1: F::of(2.0 * k),
            b2: F::of(k),
            a1: F::of(-2.0 * z_a.re),
            a2: F::of(z_a.norm_sqr()),
        };
        let sec_b = BiquadCoeffs {
            b0: F::one(),
            b1: F::of(-2.0),
            b2: F::one(),
            a1: F::of(-2.0 * z_b.re),
            a2: F::of(z_b.norm_sqr()),
        };
        Ok(Self { sections: [sec_a, sec_b], fs })
    }

    pub fn sections(&self) -> &[BiquadCoeffs<F>; 2] {
        &self.sections
    }

    /// Filters `input` causally (forward only) from zero initial state and
    /// returns a same-length series.
    pub fn apply(&self, input: &[F]) -> Vec<F> {
        let mut out = Vec::with_capacity(input.len());
        let mut states = [BiquadState::<F>::zeroed(); 2];
        for &x in input {
            let mut v = x;
            for (coef, st) in self.sections.iter().zip(states.iter_mut()) {
                let y = coef.b0 * v + coef.b1 * st.x1 + coef.b2 * st.x2
                    - coef.a1 * st.y1
                    - coef.a2 * st.y2;
                st.x2 = st.x1;
                st.x1 = v;
                st.y2 = st.y1;
                st.y1 = y;
                v = y;
            }
            out.push(v);
        }
        out
    }

    /// Magnitude response at `freq` Hz.
    pub fn gain_at(&self, freq: F) -> F {
        let w = 2.0 * core::f64::consts::PI * freq.as_f64() / self.fs.as_f64();
        let h = self.sections.iter().map(|s| s.response(w)).product::<Complex64>();
        F::of(h.norm())
    }
}
