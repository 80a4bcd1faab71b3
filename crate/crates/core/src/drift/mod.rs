//! Generalized diffusions `(B_t, ∫_0^t F(B_s) ds)` with structured drifts.

mod profile;
mod simulate;
mod spec;
mod validate;

pub use profile::{Outer, Profile, ProfileFn, Smoothed};
pub use simulate::{
    map_endpoint_blocks, simulate_y, DriftShift, DriftState, EndpointOptions, GeneralizedPath,
};
pub use spec::{
    builtin_drift, builtin_drifts, project_drift, CoefficientSequence, DriftComponent, DriftSpec,
    Target,
};
pub use validate::{
    validate_assumption, AssumptionMode, ComponentCheck, ValidatedDrift, ValidationReport, Verdict,
};
