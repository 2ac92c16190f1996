//! Nash–Kuiper style corrugation of spacelike surfaces in Minkowski 3-space.
//!
//! Starting from a long spacelike embedding of the unit square into
//! `R^{2,1}`, the engine repeatedly applies the corrugation process to
//! drive the induced metric towards a prescribed Riemannian target, and
//! audits the quantitative estimates of the construction at every step.

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod config;
pub mod corrugation;
pub mod decomp;
pub mod error;
pub mod fields;
pub mod lorentz;
pub mod par;
pub mod scenario;
pub mod scheduler;
pub mod verify;

pub use error::{Error, Result};
