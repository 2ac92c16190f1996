//! Minkowski 3-space `R^{2,1}`.
//!
//! Signature `(+, +, -)` with `z` the timelike axis. The ambient space is
//! flat, so the exponential map at a point is translation.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest Gram eigenvalue for which a tangent plane counts as spacelike.
pub const SPACELIKE_EIG_MIN: f64 = 1e-10;

/// A vector (or point) of `R^{2,1}`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3M {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3M {
    pub const ZERO: Vec3M = Vec3M { x: 0.0, y: 0.0, z: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3M { x, y, z }
    }

    /// Euclidean length, i.e. the norm of the reference metric.
    #[inline]
    pub fn norm(self) -> f64 {
        euclidean_inner(self, self).sqrt()
    }

    #[inline]
    pub fn cross(self, o: Vec3M) -> Vec3M {
        Vec3M::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Add for Vec3M {
    type Output = Vec3M;
    #[inline]
    fn add(self, o: Vec3M) -> Vec3M {
        Vec3M::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3M {
    #[inline]
    fn add_assign(&mut self, o: Vec3M) {
        *self = *self + o;
    }
}

impl Sub for Vec3M {
    type Output = Vec3M;
    #[inline]
    fn sub(self, o: Vec3M) -> Vec3M {
        Vec3M::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Vec3M {
    #[inline]
    fn sub_assign(&mut self, o: Vec3M) {
        *self = *self - o;
    }
}

impl Mul<f64> for Vec3M {
    type Output = Vec3M;
    #[inline]
    fn mul(self, s: f64) -> Vec3M {
        Vec3M::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3M> for f64 {
    type Output = Vec3M;
    #[inline]
    fn mul(self, v: Vec3M) -> Vec3M {
        v * self
    }
}

impl Div<f64> for Vec3M {
    type Output = Vec3M;
    #[inline]
    fn div(self, s: f64) -> Vec3M {
        Vec3M::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Vec3M {
    type Output = Vec3M;
    #[inline]
    fn neg(self) -> Vec3M {
        Vec3M::new(-self.x, -self.y, -self.z)
    }
}

/// The Lorentzian metric `h = dx² + dy² - dz²`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LorentzMetric;

impl LorentzMetric {
    pub fn inner(&self, a: Vec3M, b: Vec3M) -> f64 {
        minkowski_inner(a, b)
    }
}

/// The fixed Euclidean reference metric `dx² + dy² + dz²` used for C⁰/C¹ norms.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReferenceMetric;

impl ReferenceMetric {
    pub fn inner(&self, a: Vec3M, b: Vec3M) -> f64 {
        euclidean_inner(a, b)
    }

    pub fn norm(&self, a: Vec3M) -> f64 {
        a.norm()
    }
}

#[inline]
pub fn minkowski_inner(a: Vec3M, b: Vec3M) -> f64 {
    a.x * b.x + a.y * b.y - a.z * b.z
}

#[inline]
pub fn euclidean_inner(a: Vec3M, b: Vec3M) -> f64 {
    a.x * b.x + a.y * b.y + a.z * b.z
}

/// Smallest eigenvalue of the `h`-Gram matrix of `(t1, t2)`.
pub fn spacelike_margin(t1: Vec3M, t2: Vec3M) -> f64 {
    let a = minkowski_inner(t1, t1);
    let b = minkowski_inner(t1, t2);
    let c = minkowski_inner(t2, t2);
    let mean = 0.5 * (a + c);
    let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    mean - rad
}

/// Future-pointing unit timelike normal to the plane spanned by `t1, t2`.
///
/// The result satisfies `h(n, n) = -1`, `h(n, t1) = h(n, t2) = 0` and `n.z > 0`.
pub fn timelike_unit_normal(t1: Vec3M, t2: Vec3M) -> Result<Vec3M> {
    let min_eig = spacelike_margin(t1, t2);
    if !(min_eig >= SPACELIKE_EIG_MIN) {
        return Err(Error::DegeneratePlane { node: None, min_eig });
    }
    // h(J c, t) = c·t, so J(t1 × t2) is h-orthogonal to both.
    let c = t1.cross(t2);
    let n0 = Vec3M::new(c.x, c.y, -c.z);
    let q = -minkowski_inner(n0, n0);
    if !(q > 0.0) {
        return Err(Error::DegeneratePlane { node: None, min_eig });
    }
    let mut n = n0 / q.sqrt();
    if n.z < 0.0 {
        n = -n;
    }
    Ok(polish_normal(n, t1, t2))
}

// One Gram–Schmidt sweep against the tangents followed by renormalisation;
// takes the orthogonality residuals from ~1e-15·|t|² down to round-off.
fn polish_normal(n: Vec3M, t1: Vec3M, t2: Vec3M) -> Vec3M {
    let g11 = minkowski_inner(t1, t1);
    let g12 = minkowski_inner(t1, t2);
    let g22 = minkowski_inner(t2, t2);
    let det = g11 * g22 - g12 * g12;
    let r1 = minkowski_inner(n, t1);
    let r2 = minkowski_inner(n, t2);
    let c1 = (g22 * r1 - g12 * r2) / det;
    let c2 = (g11 * r2 - g12 * r1) / det;
    let m = n - t1 * c1 - t2 * c2;
    m / (-minkowski_inner(m, m)).sqrt()
}

/// Exponential map of the flat ambient space: `p + w`.
#[inline]
pub fn exp_point(p: Vec3M, w: Vec3M) -> Vec3M {
    p + w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64, z: f64) -> Vec3M {
        Vec3M::new(x, y, z)
    }

    #[test]
    fn inner_products() {
        assert_eq!(minkowski_inner(v(1., 0., 0.), v(1., 0., 0.)), 1.0);
        assert_eq!(minkowski_inner(v(0., 0., 1.), v(0., 0., 1.)), -1.0);
        assert_eq!(minkowski_inner(v(1., 0., 1.), v(1., 0., 1.)), 0.0);
        assert_eq!(euclidean_inner(v(0., 0., 1.), v(0., 0., 1.)), 1.0);
        assert_eq!(euclidean_inner(v(1., 2., 3.), v(1., 2., 3.)), 14.0);
        assert_eq!(euclidean_inner(v(1., 0., 0.), v(0., 1., 0.)), 0.0);
        assert_eq!(LorentzMetric.inner(v(0., 0., 2.), v(0., 0., 1.)), -2.0);
        assert_eq!(ReferenceMetric.norm(v(3., 4., 0.)), 5.0);
    }

    #[test]
    fn horizontal_plane_normal() {
        let n = timelike_unit_normal(v(1., 0., 0.), v(0., 1., 0.)).unwrap();
        assert_eq!(n, v(0., 0., 1.));
    }

    #[test]
    fn tilted_plane_normal() {
        // Oracle: solve h(n, t1) = h(n, t2) = 0 directly. With t2 = e_y the
        // normal has n.y = 0 and n.x - 0.5 n.z = 0, so n ∝ (0.5, 0, 1);
        // h-normalising gives 1/sqrt(0.75).
        let t1 = v(1., 0., 0.5);
        let t2 = v(0., 1., 0.);
        let n = timelike_unit_normal(t1, t2).unwrap();
        let s = 1.0 / 0.75f64.sqrt();
        assert!((n.x - 0.5 * s).abs() < 1e-14);
        assert!(n.y.abs() < 1e-14);
        assert!((n.z - s).abs() < 1e-14);
        assert!((minkowski_inner(n, n) + 1.0).abs() <= 1e-12);
        assert!(minkowski_inner(n, t1).abs() <= 1e-12);
        assert!(minkowski_inner(n, t2).abs() <= 1e-12);
    }

    #[test]
    fn null_tangent_is_degenerate() {
        let err = timelike_unit_normal(v(1., 0., 1.), v(0., 1., 0.)).unwrap_err();
        assert!(matches!(err, Error::DegeneratePlane { .. }));
        let err = timelike_unit_normal(v(1., 0., 0.), v(2., 0., 0.)).unwrap_err();
        assert!(matches!(err, Error::DegeneratePlane { .. }));
    }

    #[test]
    fn exp_is_translation() {
        assert_eq!(exp_point(v(0., 0., 0.), v(1., 2., 3.)), v(1., 2., 3.));
        assert_eq!(exp_point(v(1., 1., 1.), Vec3M::ZERO), v(1., 1., 1.));
        assert_eq!(exp_point(v(0.5, 0.5, 0.), v(0., 0., -0.25)), v(0.5, 0.5, -0.25));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn vec3() -> impl Strategy<Value = Vec3M> {
            (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64).prop_map(|(x, y, z)| v(x, y, z))
        }

        proptest! {
            #[test]
            fn minkowski_symmetric_bilinear(a in vec3(), b in vec3(), c in vec3(), s in -2.0..2.0f64) {
                prop_assert_eq!(minkowski_inner(a, b), minkowski_inner(b, a));
                let lhs = minkowski_inner(a * s + b, c);
                let rhs = s * minkowski_inner(a, c) + minkowski_inner(b, c);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
            }

            #[test]
            fn normal_of_spacelike_plane(
                x1 in -1.0..1.0f64, y1 in -1.0..1.0f64,
                x2 in -1.0..1.0f64, y2 in -1.0..1.0f64,
                slope_x in -0.7..0.7f64, slope_y in -0.7..0.7f64,
            ) {
                // Tangents of the graph z = slope·(x, y) with |slope| < 1 span a spacelike plane.
                prop_assume!(slope_x * slope_x + slope_y * slope_y < 0.8);
                prop_assume!((x1 * y2 - x2 * y1).abs() > 0.05);
                let t1 = v(x1, y1, slope_x * x1 + slope_y * y1);
                let t2 = v(x2, y2, slope_x * x2 + slope_y * y2);
                let n = timelike_unit_normal(t1, t2).unwrap();
                prop_assert!((minkowski_inner(n, n) + 1.0).abs() <= 1e-12);
                prop_assert!(minkowski_inner(n, t1).abs() <= 1e-12);
                prop_assert!(minkowski_inner(n, t2).abs() <= 1e-12);
                prop_assert!(n.z > 0.0);
                // Swapping the tangents flips the raw normal; orientation is still future.
                let m = timelike_unit_normal(t2, t1).unwrap();
                prop_assert!((m - n).norm() <= 1e-12);
            }
        }
    }
}
