//! Core library for an accelerometer-based fish biologging pipeline.
//!
//! The crate models the full data path of a small tri-axial accelerometer tag
//! mounted on the operculum of a swimming fish:
//!
//! - [`signal`] — respiration-frequency and physical-activity estimators in
//!   two flavours: the full-precision *exact* path used for PC-side analysis
//!   and the integer-friendly *onboard* path that mirrors what the tag
//!   firmware computes in place (no square roots, power-of-two frame sizes).
//! - [`device`] — a simulator for the tag itself: flash/RAM/battery budgets,
//!   duty-cycle schedules, and the little-endian download log format.
//! - [`synth`] — a seeded generator of synthetic breathing/swimming signals
//!   with ground truth, used to validate the estimators end to end.
//! - [`analysis`] — validation analytics: closed-respirometry oxygen
//!   consumption (MO2), metabolic landmark detection, onboard-vs-exact
//!   agreement statistics, and a NIPALS PLS-DA classifier for
//!   aerobic/anaerobic window separation.
//!
//! All numeric kernels are generic over the scalar type through the
//! [`float::Real`] trait so the same code runs in `f32` or `f64`. The aliases
//! below fix the default double-precision pipeline used by the CLI and the
//! device simulator.

// `!(x > 0)` is the NaN-rejecting form of `x <= 0`: parameter guards here
// use it deliberately so non-finite inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// frozen filter/solubility constants keep every digit their reference
// implementation printed, even where f64 cannot distinguish the last one
#![allow(clippy::excessive_precision)]

pub mod analysis;
pub mod device;
pub mod float;
pub mod signal;
pub mod synth;

/// Default scalar type for the PC-side pipeline.
pub type Scalar = f64;

/// Double-precision tri-axial sample.
pub type Sample = signal::AccelSample<Scalar>;
/// Double-precision sample series.
pub type Series = signal::AccelSeries<Scalar>;
/// Double-precision estimator configuration.
pub type Config = signal::EstimatorConfig<Scalar>;
/// Double-precision per-window estimate.
pub type Window = signal::WindowResult<Scalar>;
