//! Validation analytics for tag deployments.
//!
//! Three independent tool sets:
//!
//! - [`respirometry`]: oxygen-uptake rates (MO2) from swim-tunnel
//!   saturation traces, plus detection of the metabolic maxima (MMR, MRF,
//!   peak activity) across a speed protocol;
//! - [`agreement`]: Pearson/least-squares agreement between the onboard and
//!   exact estimator outputs;
//! - [`pls`]: two-component PLS-DA separating aerobic from anaerobic
//!   condition on (respiration, activity) features, scored by R2Y and
//!   leave-one-out Q2.
//!
//! Unlike the estimator layer these run on the PC after download, so they
//! work in plain `f64` — their reference fixtures are double-precision and
//! nothing here runs on the tag.

pub mod agreement;
pub mod pls;
pub mod respirometry;

pub use agreement::{agreement, Agreement, AgreementError};
pub use pls::{permutation_q2, pls_da_fit, ClassLabel, Classified, PlsError, PlsModel, PlsWarning};
pub use respirometry::{
    detect_mmr_mrf, mo2_from_step, o2_solubility_mg_per_l, saturation_trace_for_mo2,
    MetabolicMaxima, Mo2Estimate, RespirometryError, RespirometryRun, RespirometryWarning,
    SpeedStep,
};
