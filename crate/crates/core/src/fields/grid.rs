use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform node grid on the unit square, stored row-major (`j * nx + i`,
/// with `i` along `x`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    nx: usize,
    ny: usize,
}

impl Grid {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::InvalidGrid(nx, ny));
        }
        Ok(Grid { nx, ny })
    }

    pub fn square(n: usize) -> Result<Self> {
        Grid::new(n, n)
    }

    #[inline]
    pub fn nx(&self) -> usize {
        self.nx
    }

    #[inline]
    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn hx(&self) -> f64 {
        1.0 / (self.nx - 1) as f64
    }

    #[inline]
    pub fn hy(&self) -> f64 {
        1.0 / (self.ny - 1) as f64
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn ij(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (f64, f64) {
        let (i, j) = self.ij(idx);
        (i as f64 * self.hx(), j as f64 * self.hy())
    }

    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(self.nx, self.ny, other.nx, other.ny));
        }
        Ok(())
    }

    /// First derivative of a node field along `x` at `idx`: central in the
    /// interior, second-order one-sided on the boundary.
    #[inline]
    pub fn diff_x<T, F>(&self, idx: usize, at: F) -> T
    where
        F: Fn(usize) -> T,
        T: std::ops::Sub<Output = T> + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        let (i, j) = self.ij(idx);
        let h = self.hx();
        stencil(i, self.nx, h, |k| at(self.index(k, j)))
    }

    #[inline]
    pub fn diff_y<T, F>(&self, idx: usize, at: F) -> T
    where
        F: Fn(usize) -> T,
        T: std::ops::Sub<Output = T> + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        let (i, j) = self.ij(idx);
        let h = self.hy();
        stencil(j, self.ny, h, |k| at(self.index(i, k)))
    }
}

#[inline]
fn stencil<T, F>(k: usize, n: usize, h: f64, at: F) -> T
where
    F: Fn(usize) -> T,
    T: std::ops::Sub<Output = T> + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    if k == 0 {
        (at(1) * 4.0 - at(0) * 3.0 - at(2)) * (0.5 / h)
    } else if k == n - 1 {
        (at(n - 1) * 3.0 - at(n - 2) * 4.0 + at(n - 3)) * (0.5 / h)
    } else {
        (at(k + 1) - at(k - 1)) * (0.5 / h)
    }
}
