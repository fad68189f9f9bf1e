//! Scalar abstraction for the numeric kernels.
//!
//! Everything that does signal math is generic over [`Real`], which is any
//! IEEE float with the conversions the kernels need. `f32` and `f64` satisfy
//! it automatically through the blanket impl.

use num_traits::{Float, FromPrimitive, NumCast};

/// Floating-point scalar usable by the estimators and analytics.
pub trait Real: Float + FromPrimitive + NumCast + core::fmt::Debug + core::fmt::Display {
    /// Lossy conversion from `f64`, used for constants and filter
    /// coefficients that are designed in double precision.
    fn of(v: f64) -> Self {
        NumCast::from(v).expect("finite f64 converts to any Real")
    }

    /// Conversion from a sample count.
    fn of_usize(v: usize) -> Self {
        FromPrimitive::from_usize(v).expect("usize converts to any Real")
    }

    /// Widening conversion to `f64` for I/O and quantization boundaries.
    fn as_f64(self) -> f64 {
        NumCast::from(self).expect("Real converts to f64")
    }
}

impl<T> Real for T where T: Float + FromPrimitive + NumCast + core::fmt::Debug + core::fmt::Display {}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_of_squares<F: Real>(xs: &[F]) -> F {
        xs.iter().fold(F::zero(), |acc, &x| acc + x * x)
    }

    #[test]
    fn works_for_both_widths() {
        assert_eq!(sum_of_squares(&[1.0f32, 2.0]), 5.0);
        assert_eq!(sum_of_squares(&[1.0f64, 2.0]), 5.0);
        assert_eq!(f32::of(0.5), 0.5f32);
        assert_eq!(f64::of_usize(12), 12.0);
        assert_eq!(1.5f32.as_f64(), 1.5);
    }
}
