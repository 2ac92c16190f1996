use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric bilinear form `E dx² + 2F dx dy + G dy²` on the parameter plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Sym2 {
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

impl Sym2 {
    pub const ZERO: Sym2 = Sym2 { e: 0.0, f: 0.0, g: 0.0 };
    pub const IDENTITY: Sym2 = Sym2 { e: 1.0, f: 0.0, g: 1.0 };

    #[inline]
    pub const fn new(e: f64, f: f64, g: f64) -> Self {
        Sym2 { e, f, g }
    }

    pub const fn diag(e: f64, g: f64) -> Self {
        Sym2 { e, f: 0.0, g }
    }

    /// `dl ⊗ dl` for the covector `(a, b)`.
    #[inline]
    pub fn form_square(a: f64, b: f64) -> Self {
        Sym2::new(a * a, a * b, b * b)
    }

    #[inline]
    pub fn det(&self) -> f64 {
        self.e * self.g - self.f * self.f
    }

    #[inline]
    pub fn trace(&self) -> f64 {
        self.e + self.g
    }

    #[inline]
    pub fn apply(&self, u: [f64; 2], w: [f64; 2]) -> f64 {
        u[0] * (self.e * w[0] + self.f * w[1]) + u[1] * (self.f * w[0] + self.g * w[1])
    }

    #[inline]
    pub fn quad(&self, u: [f64; 2]) -> f64 {
        self.apply(u, u)
    }

    /// Ordinary eigenvalues `(min, max)`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        sym_eigs(self.e, self.f, self.g)
    }

    pub fn frobenius(&self) -> f64 {
        (self.e * self.e + 2.0 * self.f * self.f + self.g * self.g).sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.e.abs().max(self.f.abs()).max(self.g.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.e.is_finite() && self.f.is_finite() && self.g.is_finite()
    }

    /// Solve `self · x = rhs`.
    pub fn solve(&self, rhs: [f64; 2]) -> Result<[f64; 2]> {
        let det = self.det();
        if !(det.abs() > 1e-300) {
            return Err(Error::SingularMetric { node: None });
        }
        Ok([
            (self.g * rhs[0] - self.f * rhs[1]) / det,
            (self.e * rhs[1] - self.f * rhs[0]) / det,
        ])
    }

    /// Generalised eigenvalues `(min, max)` of `self` relative to the
    /// positive definite `metric`, i.e. the eigenvalues of `L⁻¹ B L⁻ᵀ`
    /// with `metric = L Lᵀ`.
    pub fn eigenvalues_relative_to(&self, metric: &Sym2) -> Result<(f64, f64)> {
        let chol = Cholesky2::new(metric)?;
        let m = chol.congruence(self);
        Ok(m.eigenvalues())
    }

    /// Replace eigenvalues in `[-tol, 0)` by zero. Returns `None` if an
    /// eigenvalue is below `-tol`.
    pub fn clamp_psd(&self, tol: f64) -> Option<Sym2> {
        let (lo, hi) = self.eigenvalues();
        if lo < -tol || lo.is_nan() {
            return None;
        }
        if lo >= 0.0 {
            return Some(*self);
        }
        // Rank-one projection on the top eigenvector.
        if hi <= 0.0 {
            return Some(Sym2::ZERO);
        }
        let (vx, vy) = top_eigenvector(self, hi);
        Some(Sym2::new(hi * vx * vx, hi * vx * vy, hi * vy * vy))
    }
}

impl Add for Sym2 {
    type Output = Sym2;
    #[inline]
    fn add(self, o: Sym2) -> Sym2 {
        Sym2::new(self.e + o.e, self.f + o.f, self.g + o.g)
    }
}

impl Sub for Sym2 {
    type Output = Sym2;
    #[inline]
    fn sub(self, o: Sym2) -> Sym2 {
        Sym2::new(self.e - o.e, self.f - o.f, self.g - o.g)
    }
}

impl Mul<f64> for Sym2 {
    type Output = Sym2;
    #[inline]
    fn mul(self, s: f64) -> Sym2 {
        Sym2::new(self.e * s, self.f * s, self.g * s)
    }
}

impl Mul<Sym2> for f64 {
    type Output = Sym2;
    #[inline]
    fn mul(self, m: Sym2) -> Sym2 {
        m * self
    }
}

#[inline]
fn sym_eigs(a: f64, b: f64, c: f64) -> (f64, f64) {
    let mean = 0.5 * (a + c);
    let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    (mean - rad, mean + rad)
}

fn top_eigenvector(m: &Sym2, lambda: f64) -> (f64, f64) {
    // Rows of (M - λI) are orthogonal to the eigenvector; use the larger one.
    let r1 = (m.e - lambda, m.f);
    let r2 = (m.f, m.g - lambda);
    let (px, py) = if r1.0.hypot(r1.1) >= r2.0.hypot(r2.1) { r1 } else { r2 };
    let (vx, vy) = (-py, px);
    let n = vx.hypot(vy);
    if n == 0.0 {
        (1.0, 0.0)
    } else {
        (vx / n, vy / n)
    }
}

/// Cholesky factor of a 2×2 positive definite form.
#[derive(Debug, Clone, Copy)]
pub struct Cholesky2 {
    l11: f64,
    l21: f64,
    l22: f64,
}

impl Cholesky2 {
    pub fn new(m: &Sym2) -> Result<Self> {
        let scale = m.e.abs().max(m.g.abs());
        if !(m.e > 0.0) || !(m.g > 0.0) {
            return Err(Error::SingularMetric { node: None });
        }
        let l11 = m.e.sqrt();
        let l21 = m.f / l11;
        let s = m.g - l21 * l21;
        if !(s > 1e-14 * scale) {
            return Err(Error::SingularMetric { node: None });
        }
        Ok(Cholesky2 { l11, l21, l22: s.sqrt() })
    }

    /// `L⁻¹ B L⁻ᵀ`.
    pub fn congruence(&self, b: &Sym2) -> Sym2 {
        // L⁻¹ = [[p, 0], [q, s]]
        let p = 1.0 / self.l11;
        let s = 1.0 / self.l22;
        let q = -self.l21 * p * s;
        let e = p * p * b.e;
        let f = p * (q * b.e + s * b.f);
        let g = q * q * b.e + 2.0 * q * s * b.f + s * s * b.g;
        Sym2::new(e, f, g)
    }

    /// Columns of `L⁻ᵀ`: a basis of the parameter plane that is orthonormal
    /// for the factored form.
    pub fn orthonormal_basis(&self) -> ([f64; 2], [f64; 2]) {
        let p = 1.0 / self.l11;
        let s = 1.0 / self.l22;
        let q = -self.l21 * p * s;
        // L⁻ᵀ = [[p, q], [0, s]]
        ([p, 0.0], [q, s])
    }
}
