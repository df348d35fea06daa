//! Gradient descent-ascent iterations, parameter derivation, the run loop
//! and stationarity certificates.

mod certificate;
mod params;
mod run;
mod steps;

pub use certificate::{certificate, Certificate};
pub use params::{derive_params, with_horizon, DEFAULT_SAFETY};
pub use run::{run, run_observed, RecordOptions, RunOutcome, StepObserver, StopReason, StopRule};
pub use steps::{gda_step, smoothed_bgda_step, smoothed_gda_step, step};
