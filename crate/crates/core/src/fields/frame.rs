use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{EmbeddingJet, Sym2};
use crate::lorentz::{minkowski_inner, timelike_unit_normal, Vec3M};
use crate::par;

/// A unit linear form `ℓ(x, y) = a x + b y` on the parameter square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearForm {
    a: f64,
    b: f64,
}

impl LinearForm {
    /// Normalises `(a, b)`; the zero form is rejected.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let n = a.hypot(b);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Domain(format!("linear form ({a}, {b}) has no direction")));
        }
        Ok(LinearForm { a: a / n, b: b / n })
    }

    /// Direction at angle `theta` from the `x` axis.
    pub fn from_angle(theta: f64) -> Self {
        LinearForm { a: theta.cos(), b: theta.sin() }
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> f64 {
        self.b
    }

    /// `ℓ(p)`; the affine offset is zero.
    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.a * x + self.b * y
    }

    #[inline]
    pub fn apply(&self, w: [f64; 2]) -> f64 {
        self.a * w[0] + self.b * w[1]
    }

    /// `dℓ ⊗ dℓ`.
    pub fn square(&self) -> Sym2 {
        Sym2::form_square(self.a, self.b)
    }

    pub fn angle(&self) -> f64 {
        self.b.atan2(self.a)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*x + {}*y", self.a, self.b)
    }
}

/// Corrugation frame at one node.
///
/// `(v, u)` is an `f*h`-orthonormal basis of the parameter plane with
/// `v ∈ ker dℓ` and `dℓ(u) > 0`; `vhat = df(v)`, `t = df(u)` and `n` is the
/// future-pointing unit timelike normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameNode {
    pub v: [f64; 2],
    pub u: [f64; 2],
    pub vhat: Vec3M,
    pub t: Vec3M,
    pub n: Vec3M,
    /// `dℓ(u)`.
    pub dlu: f64,
}

pub fn frame_at(f: &EmbeddingJet, idx: usize, ell: &LinearForm) -> Result<FrameNode> {
    let fx = f.dx[idx];
    let fy = f.dy[idx];
    let induced = Sym2::new(minkowski_inner(fx, fx), minkowski_inner(fx, fy), minkowski_inner(fy, fy));
    // u is the normalised f*h-gradient of ℓ, which is f*h-orthogonal to ker dℓ.
    let grad = induced.solve([ell.a(), ell.b()]).map_err(|e| e.at_node(idx))?;
    let dl_grad = ell.apply(grad);
    if !(dl_grad > 0.0) {
        return Err(Error::DegeneratePlane { node: Some(idx), min_eig: dl_grad });
    }
    let dlu = dl_grad.sqrt();
    let u = [grad[0] / dlu, grad[1] / dlu];
    let v0 = [-ell.b(), ell.a()];
    let vn = induced.quad(v0).sqrt();
    let v = [v0[0] / vn, v0[1] / vn];
    let vhat = f.push_forward(idx, v);
    let t = f.push_forward(idx, u);
    let n = timelike_unit_normal(vhat, t).map_err(|e| e.at_node(idx))?;
    Ok(FrameNode { v, u, vhat, t, n, dlu })
}

/// Corrugation frame at every node.
pub fn corrugation_frame(f: &EmbeddingJet, ell: &LinearForm) -> Result<Vec<FrameNode>> {
    par::try_map_indexed(f.grid().len(), |idx| frame_at(f, idx, ell))
}
