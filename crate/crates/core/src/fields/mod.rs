//! Grid discretisation of the parameter square and the measurement layer:
//! jets, induced metrics, isometric defaults, operator norms, C⁰/C¹
//! distances and corrugation frames.

mod frame;
mod grid;
pub mod io;
mod jet;
mod metric;
mod norms;
mod sym2;

pub use frame::{corrugation_frame, frame_at, FrameNode, LinearForm};
pub use grid::Grid;
pub use jet::{EmbeddingJet, FdConsistency};
pub use metric::{isometric_default, pullback_metric, MetricField, PSD_TOL};
pub use norms::{
    c0_distance, c1_increment, c1_increment_coordinate, covector_norm, operator_norm_form,
    operator_norm_map, sup_differential_norm, sup_operator_norm_form,
};
pub use sym2::{Cholesky2, Sym2};
