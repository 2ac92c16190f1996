use crate::error::{Error, Result};
use crate::fields::Grid;
use crate::lorentz::{spacelike_margin, timelike_unit_normal, Vec3M, SPACELIKE_EIG_MIN};
use crate::par;

/// A map `[0,1]² → R^{2,1}` sampled on a grid together with its
/// differential: positions and the columns `∂x f`, `∂y f` at every node.
///
/// Differentials are stored, never re-derived from positions.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingJet {
    grid: Grid,
    pub pos: Vec<Vec3M>,
    pub dx: Vec<Vec3M>,
    pub dy: Vec<Vec3M>,
}

/// Result of comparing stored differentials with finite differences of the
/// stored positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConsistency {
    /// Largest Euclidean deviation over nodes and both columns.
    pub max_deviation: f64,
    /// `max_deviation / (hx + hy)`.
    pub constant: f64,
}

impl EmbeddingJet {
    pub fn new(grid: Grid, pos: Vec<Vec3M>, dx: Vec<Vec3M>, dy: Vec<Vec3M>) -> Result<Self> {
        let n = grid.len();
        if pos.len() != n || dx.len() != n || dy.len() != n {
            return Err(Error::Parse(format!(
                "jet arrays have lengths {}/{}/{} for a grid of {n} nodes",
                pos.len(),
                dx.len(),
                dy.len()
            )));
        }
        Ok(EmbeddingJet { grid, pos, dx, dy })
    }

    /// Sample an analytic map given as `(x, y) ↦ (f, ∂x f, ∂y f)`.
    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn(f64, f64) -> (Vec3M, Vec3M, Vec3M) + Sync + Send,
    {
        let samples = par::map_indexed(grid.len(), |idx| {
            let (x, y) = grid.coords(idx);
            f(x, y)
        });
        let mut pos = Vec::with_capacity(samples.len());
        let mut dx = Vec::with_capacity(samples.len());
        let mut dy = Vec::with_capacity(samples.len());
        for (p, a, b) in samples {
            pos.push(p);
            dx.push(a);
            dy.push(b);
        }
        EmbeddingJet { grid, pos, dx, dy }
    }

    /// The inclusion `(x, y) ↦ (x, y, 0)`.
    pub fn flat_inclusion(grid: Grid) -> Self {
        EmbeddingJet::from_fn(grid, |x, y| {
            (Vec3M::new(x, y, 0.0), Vec3M::new(1.0, 0.0, 0.0), Vec3M::new(0.0, 1.0, 0.0))
        })
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `df(w)` at a node for a parameter-plane vector `w`.
    #[inline]
    pub fn push_forward(&self, idx: usize, w: [f64; 2]) -> Vec3M {
        self.dx[idx] * w[0] + self.dy[idx] * w[1]
    }

    /// Check that every node has finite data and a spacelike tangent plane.
    pub fn validate_spacelike(&self) -> Result<()> {
        for idx in 0..self.grid.len() {
            if !(self.pos[idx].is_finite() && self.dx[idx].is_finite() && self.dy[idx].is_finite()) {
                return Err(Error::DegeneratePlane { node: Some(idx), min_eig: f64::NAN });
            }
            let m = spacelike_margin(self.dx[idx], self.dy[idx]);
            if !(m >= SPACELIKE_EIG_MIN) {
                return Err(Error::DegeneratePlane { node: Some(idx), min_eig: m });
            }
        }
        Ok(())
    }

    /// Future-pointing unit timelike normals at every node.
    pub fn normals(&self) -> Result<Vec<Vec3M>> {
        par::try_map_indexed(self.grid.len(), |idx| {
            timelike_unit_normal(self.dx[idx], self.dy[idx]).map_err(|e| e.at_node(idx))
        })
    }

    /// Compare stored differentials to finite differences of positions.
    pub fn fd_consistency(&self) -> FdConsistency {
        let g = self.grid;
        let max_deviation = par::max_indexed(g.len(), |idx| {
            let ddx = g.diff_x(idx, |k| self.pos[k]);
            let ddy = g.diff_y(idx, |k| self.pos[k]);
            (ddx - self.dx[idx]).norm().max((ddy - self.dy[idx]).norm())
        });
        FdConsistency { max_deviation, constant: max_deviation / (g.hx() + g.hy()) }
    }
}
