//! Operator norms `‖·‖_{g,h̃}` and the C⁰/C¹ distances built from them.
//!
//! A linear map `A: T_pC → R³` is measured as the supremum of the
//! Euclidean length of `A u` over `g`-unit vectors `u`; a bilinear form `B`
//! by its largest absolute eigenvalue relative to `g`.

use crate::error::Result;
use crate::fields::{EmbeddingJet, MetricField, Sym2};
use crate::lorentz::{euclidean_inner, Vec3M};
use crate::par;

/// Largest singular value of the map with columns `(fx, fy)` measured from
/// `g` to the Euclidean reference metric.
pub fn operator_norm_map(fx: Vec3M, fy: Vec3M, g: &Sym2) -> Result<f64> {
    let gram = Sym2::new(euclidean_inner(fx, fx), euclidean_inner(fx, fy), euclidean_inner(fy, fy));
    let (_, hi) = gram.eigenvalues_relative_to(g)?;
    Ok(hi.max(0.0).sqrt())
}

/// Largest absolute generalised eigenvalue of `b` relative to `g`.
pub fn operator_norm_form(b: &Sym2, g: &Sym2) -> Result<f64> {
    let (lo, hi) = b.eigenvalues_relative_to(g)?;
    Ok(lo.abs().max(hi.abs()))
}

/// `sup_p operator_norm_form(B(p), g(p))`.
pub fn sup_operator_norm_form(b: &MetricField, g: &MetricField) -> Result<f64> {
    b.grid().ensure_same(g.grid())?;
    let vals = par::try_map_indexed(b.grid().len(), |idx| {
        operator_norm_form(&b.data[idx], &g.data[idx]).map_err(|e| e.at_node(idx))
    })?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// Norm of the covector `a dx + b dy` dual to `g`: `sup |dl(u)|` over `g`-unit `u`.
pub fn covector_norm(a: f64, b: f64, g: &Sym2) -> Result<f64> {
    let w = g.solve([a, b])?;
    Ok((a * w[0] + b * w[1]).max(0.0).sqrt())
}

/// `sup_p ‖df(p)‖_{g,h̃}`.
pub fn sup_differential_norm(f: &EmbeddingJet, g: &MetricField) -> Result<f64> {
    f.grid().ensure_same(g.grid())?;
    let vals = par::try_map_indexed(f.grid().len(), |idx| {
        operator_norm_map(f.dx[idx], f.dy[idx], &g.data[idx]).map_err(|e| e.at_node(idx))
    })?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// Largest Euclidean distance between corresponding positions.
pub fn c0_distance(f1: &EmbeddingJet, f2: &EmbeddingJet) -> Result<f64> {
    f1.grid().ensure_same(f2.grid())?;
    Ok(par::max_indexed(f1.grid().len(), |idx| (f2.pos[idx] - f1.pos[idx]).norm()).max(0.0))
}

/// `sup_p ‖df2(p) - df1(p)‖_{g,h̃}`.
pub fn c1_increment(f1: &EmbeddingJet, f2: &EmbeddingJet, g: &MetricField) -> Result<f64> {
    f1.grid().ensure_same(f2.grid())?;
    f1.grid().ensure_same(g.grid())?;
    let vals = par::try_map_indexed(f1.grid().len(), |idx| {
        operator_norm_map(f2.dx[idx] - f1.dx[idx], f2.dy[idx] - f1.dy[idx], &g.data[idx])
            .map_err(|e| e.at_node(idx))
    })?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// `sup_p ‖df2(p) - df1(p)‖` with the coordinate metric on the source,
/// i.e. the plain spectral norm of the difference of Jacobians.
pub fn c1_increment_coordinate(f1: &EmbeddingJet, f2: &EmbeddingJet) -> Result<f64> {
    f1.grid().ensure_same(f2.grid())?;
    let vals = par::try_map_indexed(f1.grid().len(), |idx| {
        operator_norm_map(f2.dx[idx] - f1.dx[idx], f2.dy[idx] - f1.dy[idx], &Sym2::IDENTITY)
    })?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}
