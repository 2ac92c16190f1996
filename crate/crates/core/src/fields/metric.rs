use crate::error::{Error, Result};
use crate::fields::{EmbeddingJet, Grid, Sym2};
use crate::lorentz::minkowski_inner;
use crate::par;

/// Tolerance below which a negative eigenvalue of a default is treated as
/// round-off and clamped to zero.
pub const PSD_TOL: f64 = 1e-12;

/// A symmetric 2×2 form at every grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField {
    grid: Grid,
    pub data: Vec<Sym2>,
}

impl MetricField {
    pub fn new(grid: Grid, data: Vec<Sym2>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::Parse(format!(
                "metric field has {} nodes, grid has {}",
                data.len(),
                grid.len()
            )));
        }
        Ok(MetricField { grid, data })
    }

    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn(f64, f64) -> Sym2 + Sync + Send,
    {
        let data = par::map_indexed(grid.len(), |idx| {
            let (x, y) = grid.coords(idx);
            f(x, y)
        });
        MetricField { grid, data }
    }

    pub fn from_indexed<F>(grid: Grid, f: F) -> Self
    where
        F: Fn(usize) -> Sym2 + Sync + Send,
    {
        MetricField { grid, data: par::map_indexed(grid.len(), f) }
    }

    pub fn constant(grid: Grid, m: Sym2) -> Self {
        MetricField { grid, data: vec![m; grid.len()] }
    }

    pub fn zeros(grid: Grid) -> Self {
        MetricField::constant(grid, Sym2::ZERO)
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn at(&self, idx: usize) -> Sym2 {
        self.data[idx]
    }

    /// Node-wise `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &MetricField, b: f64) -> Result<MetricField> {
        self.grid.ensure_same(&other.grid)?;
        let data = self.data.iter().zip(&other.data).map(|(&x, &y)| x * a + y * b).collect();
        Ok(MetricField { grid: self.grid, data })
    }

    pub fn sub(&self, other: &MetricField) -> Result<MetricField> {
        self.grid.ensure_same(&other.grid)?;
        let data = self.data.iter().zip(&other.data).map(|(&x, &y)| x - y).collect();
        Ok(MetricField { grid: self.grid, data })
    }

    pub fn add(&self, other: &MetricField) -> Result<MetricField> {
        self.grid.ensure_same(&other.grid)?;
        let data = self.data.iter().zip(&other.data).map(|(&x, &y)| x + y).collect();
        Ok(MetricField { grid: self.grid, data })
    }

    pub fn scale(&self, s: f64) -> MetricField {
        MetricField { grid: self.grid, data: self.data.iter().map(|&m| m * s).collect() }
    }

    /// Largest entry magnitude over all nodes.
    pub fn sup_abs_entry(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, m| acc.max(m.max_abs_entry()))
    }

    /// Largest Frobenius norm over all nodes.
    pub fn sup_frobenius(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, m| acc.max(m.frobenius()))
    }

    /// Smallest ordinary eigenvalue over all nodes, with its node.
    pub fn min_eigenvalue(&self) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (idx, m) in self.data.iter().enumerate() {
            let lo = m.eigenvalues().0;
            if lo < best.1 || lo.is_nan() {
                best = (idx, lo);
            }
        }
        best
    }

    /// Fails with `NotPsd` at the first node with an eigenvalue below `-tol`.
    pub fn ensure_psd(&self, tol: f64) -> Result<()> {
        for (idx, m) in self.data.iter().enumerate() {
            let lo = m.eigenvalues().0;
            if !(lo >= -tol) {
                return Err(Error::NotPsd { node: idx, min_eig: lo });
            }
        }
        Ok(())
    }
}

/// The induced metric `f*h`: `E = h(fx, fx)`, `F = h(fx, fy)`, `G = h(fy, fy)`.
pub fn pullback_metric(f: &EmbeddingJet) -> MetricField {
    let data = par::map_indexed(f.grid().len(), |idx| {
        let a = f.dx[idx];
        let b = f.dy[idx];
        Sym2::new(minkowski_inner(a, a), minkowski_inner(a, b), minkowski_inner(b, b))
    });
    MetricField { grid: *f.grid(), data }
}

/// `induced - target`, required to be positive semi-definite (the embedding
/// is long for `target`). Eigenvalues in `[-PSD_TOL, 0)` are clamped to zero.
pub fn isometric_default(induced: &MetricField, target: &MetricField) -> Result<MetricField> {
    let diff = induced.sub(target)?;
    let data = diff
        .data
        .iter()
        .enumerate()
        .map(|(idx, m)| {
            m.clamp_psd(PSD_TOL)
                .ok_or(Error::NotLong { node: idx, min_eig: m.eigenvalues().0 })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricField { grid: *induced.grid(), data })
}
