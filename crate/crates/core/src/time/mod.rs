//! BDF time discretisation on moving meshes.

pub mod bdf;
pub mod stepper;

pub use bdf::{bdf_coefficients, sbdf_coefficients, History};
pub use stepper::{Mode, SchemeConfig, StepData, StepRecord, Stepper};
