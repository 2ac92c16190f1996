//! One corrugation step for a primitive metric, corrugation-number
//! selection, and successive corrugation over a decomposition.

pub mod amplitude;
pub mod loops;
pub mod quadrature;
mod select;
mod step;

pub use amplitude::{
    amplitude, amplitude_from_default, phi, phi_inverse, phi_minus_one, phi_prime, radial_factor,
    AmplitudeSolveResult,
};
pub use loops::Quadrature;
pub use select::{
    select_corrugation_number, select_step, successive_cp, SelectOptions, Selected, DEFAULT_N0, DEFAULT_N_CAP,
};
pub use step::{
    apply_step, audit_step, cp_step, metric_error, phase, BoundAudit, CorrugationStepRecord, Primitive,
    StepOutput, StepParams,
};
